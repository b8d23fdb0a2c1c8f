"""Amplitude Modulation transform toolkit."""

from .amcore import SampledCurve, am_curve, am_of_exp_check, am_transform, ratio
from .aminverse import InverseSolution, invert_monotone, ratio_invert, verify_roundtrip, weak_invert
from .ampoly import am_annihilator, implicit_derivative_relation, verify_annihilator
from .critpoints import CriticalPoint, envelope_certificate, find_critical_points, sinc_maxima
from .errors import AmError, DomainError, ParseError
from .expr import Jet2, eval_jet2, parse
from .polynomial import RatPoly, resultant

__version__ = "0.1.0"

__all__ = [
    "AmError", "CriticalPoint", "DomainError", "InverseSolution", "Jet2", "ParseError",
    "RatPoly", "SampledCurve", "am_annihilator", "am_curve", "am_of_exp_check",
    "am_transform", "envelope_certificate", "eval_jet2", "find_critical_points",
    "implicit_derivative_relation", "invert_monotone", "parse", "ratio", "ratio_invert",
    "resultant", "sinc_maxima", "verify_annihilator", "verify_roundtrip", "weak_invert",
]
