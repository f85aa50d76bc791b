"""Precision-aware scalar arithmetic, quadrature and the target-function catalog."""

from .airy import airy_ai
from .functions import TestFunction, UnknownFunctionError, catalog_keys, eval_test_function, make_function
from .precision import (
    DOUBLE,
    EXTENDED,
    PrecisionError,
    as_float,
    backend_for,
    parse_value,
    precision_label,
    resolve_precision,
    working_precision,
)
from .quadrature import composite_rule, gauss_legendre, round_nodes

__all__ = [
    "DOUBLE",
    "EXTENDED",
    "PrecisionError",
    "TestFunction",
    "UnknownFunctionError",
    "airy_ai",
    "as_float",
    "backend_for",
    "catalog_keys",
    "composite_rule",
    "eval_test_function",
    "gauss_legendre",
    "make_function",
    "parse_value",
    "precision_label",
    "resolve_precision",
    "round_nodes",
    "working_precision",
]
