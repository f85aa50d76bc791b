"""Argument checks shared by the estimator classes."""

from __future__ import annotations

from typing import Union

import numpy as np

from .numkit.functions import TestFunction, make_function
from .numkit.precision import DOUBLE, parse_value, resolve_precision


def check_degree(n, name: str = "n") -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {n!r}")
    return int(n)


def check_T(T):
    """Return ``T`` unchanged after checking it parses to a number above 1."""
    try:
        v = parse_value(T, DOUBLE)
    except (ValueError, SyntaxError, TypeError) as exc:
        raise ValueError(f"cannot parse T={T!r}") from exc
    if not np.isfinite(v) or v <= 1:
        raise ValueError(f"T must exceed 1, got {T!r}")
    return T


def check_precision(prec, allow_auto: bool = False):
    if allow_auto and isinstance(prec, str) and prec.strip().lower().startswith("auto"):
        return prec
    resolve_precision(prec)
    return prec


def check_points(x, name: str = "X") -> np.ndarray:
    """1-D float array of finite points in [-1, 1]; a single column 2-D array is flattened."""
    a = np.asarray(x, dtype=float)
    if a.ndim == 2 and a.shape[1] == 1:
        a = a[:, 0]
    if a.ndim != 1:
        raise ValueError(f"{name} must be 1-D or a single column, got shape {a.shape}")
    if a.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite values")
    if np.any(np.abs(a) > 1):
        raise ValueError(f"{name} must lie in [-1, 1]")
    return a


def check_target(target: Union[str, TestFunction], **params) -> TestFunction:
    if isinstance(target, TestFunction):
        if params:
            raise ValueError("parameters go into the TestFunction, not fit()")
        return target
    if isinstance(target, str):
        return make_function(target, **params)
    raise TypeError(f"expected a catalog name or TestFunction, got {type(target).__name__}")


def check_values(y, n_samples: int) -> np.ndarray:
    a = np.asarray(y)
    if a.ndim != 1 or a.shape[0] != n_samples:
        raise ValueError(f"y must have shape ({n_samples},), got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("y contains non-finite values")
    return a.astype(complex if np.iscomplexobj(a) else float)
