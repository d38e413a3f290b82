"""Milnor vector fields and the a(x) > 0 condition for real polynomial map germs."""

from .certificate import CertifyOptions, ProductInput, certify, load_input, validate_certificate
from .errors import GermError, PreconditionError
from .germ import PolyMapGerm, parse_germ
from .milnor import Tolerances, a_coefficient, analyze_point, build_D_M, sample_milnor_set
from .mixed import MixedFunction, msl_check, msl_generate, parse_mixed, realify
from .polynomial import Polynomial

__version__ = "0.1.0"

__all__ = [
    "CertifyOptions",
    "GermError",
    "MixedFunction",
    "PolyMapGerm",
    "Polynomial",
    "PreconditionError",
    "ProductInput",
    "Tolerances",
    "a_coefficient",
    "analyze_point",
    "build_D_M",
    "certify",
    "load_input",
    "msl_check",
    "msl_generate",
    "parse_germ",
    "parse_mixed",
    "realify",
    "sample_milnor_set",
    "validate_certificate",
]
