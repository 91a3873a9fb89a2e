"""Exact arithmetic for imaginary quadratic fields and their CM theory."""

from .config import Config
from .errors import CapExceeded, CMLLError, InternalConsistencyError, PrecisionError, ValidationError
from .ideals import FracIdeal, ideal_from_gens, one_ideal, principal_ideal
from .quadfield import FieldElt, QuadInt, make_field, parse_element

__version__ = "0.1.0"

__all__ = [
    "CMLLError",
    "CapExceeded",
    "Config",
    "FieldElt",
    "FracIdeal",
    "InternalConsistencyError",
    "PrecisionError",
    "QuadInt",
    "ValidationError",
    "ideal_from_gens",
    "make_field",
    "one_ideal",
    "parse_element",
    "principal_ideal",
]
