"""Exact rectangle-chain limit functions, crossing trees and permeation."""

from .bv import Length, Polyline, PiecewiseFn, variation
from .chains import Orientation, Rect, Scheme, get_scheme, scheme_gC, scheme_gH
from .errors import (
    BudgetError,
    EnumerationLimitExceeded,
    PermealabError,
    VerificationFailed,
)
from .funcs import Enclosure, eval, eval_enclosure

__version__ = "0.1.0"

__all__ = [
    "Length", "Polyline", "PiecewiseFn", "variation", "Orientation", "Rect", "Scheme",
    "get_scheme", "scheme_gC", "scheme_gH", "BudgetError", "EnumerationLimitExceeded",
    "PermealabError", "VerificationFailed", "Enclosure", "eval", "eval_enclosure",
    "__version__",
]
