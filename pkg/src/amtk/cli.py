"""``amtk`` command line.

Exit status: 0 on success, 1 on usage errors (bad flags, malformed
expressions), 2 on domain or numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import aminverse, ampoly, amcore, critpoints
from .errors import AmError, ParseError
from .expr import evaluate, parse
from .polynomial import RatPoly

FORMATS = ("csv", "json", "text")
DEFAULT_STEP = 1e-3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _num(s):
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a decimal number: {s!r}") from None


def _count(s):
    try:
        n = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    return n


def _phases(s):
    try:
        return [float(t) for t in s.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad phase list: {s!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="amtk", description="Amplitude Modulation transform toolkit")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, fmt="text"):
        p.add_argument("--format", choices=FORMATS, default=fmt)
        p.add_argument("-o", "--output", help="write to this file instead of stdout")

    def interval(p, required=True):
        p.add_argument("--from", dest="a", type=_num, required=required)
        p.add_argument("--to", dest="b", type=_num, required=required)

    p = sub.add_parser("transform", help="sample AM(f) on an interval")
    p.add_argument("--expr", required=True)
    interval(p)
    p.add_argument("--samples", type=_count, default=200)
    common(p, "csv")

    p = sub.add_parser("critical", help="critical points of f(x) sin(x + k)")
    p.add_argument("--expr", required=True)
    p.add_argument("--phase", type=_num, default=0.0)
    interval(p)
    p.add_argument("--grid", type=_count)
    common(p, "csv")

    p = sub.add_parser("certify", help="check |critical values| = AM(f) for several phases")
    p.add_argument("--expr", required=True)
    p.add_argument("--phases", type=_phases, required=True)
    interval(p)
    p.add_argument("--grid", type=_count)
    common(p)

    p = sub.add_parser("invert", help="solve AM(f) = g for f")
    p.add_argument("--g", required=True)
    interval(p)
    p.add_argument("--f0", type=_num)
    p.add_argument("--step", type=_num, default=DEFAULT_STEP)
    p.add_argument("--weak", action="store_true", help="stitch across critical points of g")
    common(p, "csv")

    p = sub.add_parser("ratio-invert", help="f with f / AM(f) = r")
    p.add_argument("--r", required=True)
    interval(p)
    p.add_argument("--sign", choices=("plus", "minus"), default="plus")
    p.add_argument("--samples", type=_count, default=101)
    common(p, "csv")

    p = sub.add_parser("annihilate", help="polynomial A(x, z) vanishing on z = AM(f)")
    p.add_argument("--poly", required=True)
    p.add_argument("--verify-expr")
    interval(p, required=False)
    p.add_argument("--samples", type=_count, default=32)
    common(p)

    p = sub.add_parser("sinc-table", help="local maxima of sin(x)/x")
    p.add_argument("--count", type=_count, required=True)
    common(p)
    return ap


# --------------------------------------------------------------------------
# rendering
# --------------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _render(fmt, columns, rows, meta, text_header=None):
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()
    if fmt == "json":
        body = {"meta": meta, "rows": [dict(zip(columns, r)) for r in rows]}
        return json.dumps(body, indent=2, default=str) + "\n"
    lines = list(text_header or [])
    cells = [columns] + [[_fmt(v) for v in r] for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(columns))]
    for c in cells:
        lines.append("  ".join(s.rjust(wd) for s, wd in zip(c, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _check_interval(args):
    if args.a is not None and args.b is not None and not args.a < args.b:
        raise UsageError("--from must be less than --to")


def _expr(text):
    return parse(text)


def cmd_transform(args, meta):
    if args.samples < 2:
        raise UsageError("--samples must be >= 2")
    curve = amcore.am_curve(_expr(args.expr), args.a, args.b, args.samples)
    meta.update(label=curve.label, omitted=curve.omitted)
    header = [f"# {curve.label} on [{_fmt(args.a)}, {_fmt(args.b)}], omitted {curve.omitted}"]
    return _render(args.format, ["x", "y"], curve.points, meta, header)


def cmd_critical(args, meta):
    grid = args.grid or critpoints.default_grid(args.a, args.b)
    meta["grid"] = grid
    if grid < critpoints.MIN_GRID:
        raise UsageError(f"--grid must be >= {critpoints.MIN_GRID}")
    pts = critpoints.find_critical_points(_expr(args.expr), args.phase, args.a, args.b, grid)
    rows = [(p.x, p.value, p.kind.value, p.deriv_residual, p.envelope_residual) for p in pts]
    cols = ["x", "value", "kind", "deriv_residual", "envelope_residual"]
    return _render(args.format, cols, rows, meta, [f"# {len(pts)} critical points"])


def cmd_certify(args, meta):
    if not args.phases:
        raise UsageError("--phases must list at least one phase")
    grid = args.grid or critpoints.default_grid(args.a, args.b)
    meta["grid"] = grid
    rep = critpoints.envelope_certificate(_expr(args.expr), args.phases, args.a, args.b, grid)
    meta["max_envelope_residual"] = rep.max_envelope_residual
    rows = [(s.phase, s.count, s.max_envelope_residual) for s in rep.phases]
    header = [
        f"# envelope certificate for AM({args.expr}) on [{_fmt(args.a)}, {_fmt(args.b)}]",
        f"# max envelope residual {_fmt(rep.max_envelope_residual)} over {rep.total_points} points",
    ]
    return _render(args.format, ["phase", "count", "max_envelope_residual"], rows, meta, header)


def cmd_invert(args, meta):
    g = _expr(args.g)
    if not args.step > 0:
        raise UsageError("--step must be positive")
    if args.weak:
        sol = aminverse.weak_invert(g, args.a, args.b, args.step)
    else:
        f0 = args.f0
        if f0 is None:
            start = args.a if aminverse.monotonicity(g, args.a, args.b) < 0 else args.b
            f0 = evaluate(g, start)
        meta["f0"] = f0
        sol = aminverse.invert_monotone(g, args.a, args.b, f0, args.step)
    meta["roundtrip_error"] = sol.roundtrip_error
    meta["segments"] = [
        {"from": s.curve.points[0][0], "to": s.curve.points[-1][0],
         "branch": s.branch.value, "direction": s.direction.value}
        for s in sol.segments
    ]
    header = [f"# roundtrip error {_fmt(sol.roundtrip_error)}"]
    header += [f"# segment [{_fmt(s['from'])}, {_fmt(s['to'])}] {s['branch']} {s['direction']}" for s in meta["segments"]]
    return _render(args.format, ["x", "y"], sol.points, meta, header)


def cmd_ratio_invert(args, meta):
    if args.samples < 2:
        raise UsageError("--samples must be >= 2")
    curve = aminverse.ratio_invert(_expr(args.r), args.a, args.b, args.sign, args.samples)
    return _render(args.format, ["x", "y"], curve.points, meta, [f"# {curve.label}"])


def cmd_annihilate(args, meta):
    P = RatPoly.parse(args.poly)
    A = ampoly.am_annihilator(P)
    residual = ampoly.curve_residual(A, P)
    rows = [("annihilator", str(A)), ("curve_residual", residual)]
    if args.verify_expr is not None:
        if args.a is None or args.b is None:
            raise UsageError("--verify-expr needs --from and --to")
        res = ampoly.verify_annihilator(A, _expr(args.verify_expr), args.a, args.b, args.samples)
        rows.append(("verify_residual", res))
    if args.format == "text":
        return "".join(f"{k}: {_fmt(v)}\n" for k, v in rows)
    return _render(args.format, ["name", "value"], rows, meta)


def cmd_sinc_table(args, meta):
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    rows = [(r.x, r.sinc, r.bound) for r in critpoints.sinc_maxima(args.count)]
    return _render(args.format, ["x", "sinc", "bound"], rows, meta)


COMMANDS = {
    "transform": cmd_transform,
    "critical": cmd_critical,
    "certify": cmd_certify,
    "invert": cmd_invert,
    "ratio-invert": cmd_ratio_invert,
    "annihilate": cmd_annihilate,
    "sinc-table": cmd_sinc_table,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        if hasattr(args, "a"):
            _check_interval(args)
        meta = {"argv": argv, "command": args.command}
        if args.command == "invert":
            meta["step"] = args.step
        out = COMMANDS[args.command](args, meta)
    except UsageError as exc:
        print(exc, file=stderr)
        return 1
    except ParseError as exc:
        print(f"amtk: {exc}", file=stderr)
        return 1
    except (AmError, ArithmeticError, ValueError) as exc:
        print(f"amtk: {exc}", file=stderr)
        return 2
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(out)
    else:
        stdout.write(out)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
