"""Certified non-redundancy exponents for symmetric Boolean CSP predicates."""

from .balance import (
    CapturingPolynomial,
    find_capturing_polynomial,
    is_t_balanced,
    lift,
    upper_exponent,
    verify_capturing,
)
from .cube import CubeFailure, lower_exponent, preserves_generic, preserves_symmetric
from .predicates import SymmetricPredicate, TupleRelation, canonicalize, enumerate_nontrivial, expand, flip

__version__ = "0.1.0"

__all__ = [
    "CapturingPolynomial",
    "CubeFailure",
    "SymmetricPredicate",
    "TupleRelation",
    "canonicalize",
    "enumerate_nontrivial",
    "expand",
    "find_capturing_polynomial",
    "flip",
    "is_t_balanced",
    "lift",
    "lower_exponent",
    "preserves_generic",
    "preserves_symmetric",
    "upper_exponent",
    "verify_capturing",
]
