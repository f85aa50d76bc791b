"""Gauss-Legendre rules at native or extended precision.

Extended-precision rules are refined by Newton iteration on the Legendre
three-term recurrence, starting from the double-precision nodes.  Rules are
cached per ``(N, prec)`` since sweeps reuse a handful of sizes.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence, Tuple

import gmpy2
import numpy as np
from scipy.special import roots_legendre

from .precision import DOUBLE, PrecisionError, backend_for, resolve_precision, working_precision


def round_nodes(count: int, multiple: int = 32) -> int:
    """Round a node count up to a multiple so cached rules get reused across a sweep."""
    return max(multiple, int(math.ceil(count / multiple)) * multiple)


@lru_cache(maxsize=64)
def _gl_double(N: int) -> Tuple[np.ndarray, np.ndarray]:
    x, _ = roots_legendre(N)
    # scipy's large-N nodes carry ~1e-14 errors; two Newton steps restore full accuracy.
    for _ in range(2):
        p, dp = _legendre_and_derivative(N, x)
        x = x - p / dp
    _, dp = _legendre_and_derivative(N, x)
    w = 2 / ((1 - x * x) * dp * dp)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=64)
def _gl_multi(N: int, prec: int) -> Tuple[np.ndarray, np.ndarray]:
    x0, _ = roots_legendre(N)
    # Nodes are symmetric; refine the non-negative half only.
    half = x0[N // 2:]
    with working_precision(prec) as bk:
        x = bk.array(half)
        target = gmpy2.mpfr(2) ** (-(prec - 4))
        for _ in range(64):
            p, dp = _legendre_and_derivative(N, x)
            step = p / dp
            x = x - step
            if max(abs(s) for s in step) < target:
                break
        else:  # pragma: no cover - Newton from double nodes always converges
            raise PrecisionError(f"Gauss-Legendre refinement stalled for N={N}")
        _, dp = _legendre_and_derivative(N, x)
        w = 2 / ((1 - x * x) * dp * dp)
        if N % 2:
            x[0] = gmpy2.mpfr(0)
            nodes = np.concatenate([-x[:0:-1], x])
            weights = np.concatenate([w[:0:-1], w])
        else:
            nodes = np.concatenate([-x[::-1], x])
            weights = np.concatenate([w[::-1], w])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _legendre_and_derivative(N: int, x: np.ndarray):
    p_prev = np.ones_like(x) * (gmpy2.mpfr(1) if x.dtype == object else 1.0)
    p = x.copy()
    for k in range(2, N + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    dp = N * (x * p - p_prev) / (x * x - 1)
    return p, dp


def gauss_legendre(N: int, prec=DOUBLE) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``N``-point Gauss-Legendre rule on [-1, 1].

    Extended-precision arrays hold MPFR values at ``prec`` bits.  The returned
    arrays are read-only and shared between callers.
    """
    if N < 1:
        raise ValueError("need at least one node")
    prec = resolve_precision(prec)
    if prec == DOUBLE:
        return _gl_double(N)
    return _gl_multi(N, prec)


def composite_rule(a, b, N: int, prec=DOUBLE, breakpoints: Sequence = ()) -> Tuple[np.ndarray, np.ndarray]:
    """``N``-point Gauss-Legendre rule on every piece of [a, b] split at ``breakpoints``.

    Must run inside the working-precision context for extended precision.
    """
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    a = bk.scalar(a)
    b = bk.scalar(b)
    cuts = [a] + sorted(bk.scalar(c) for c in breakpoints if a < bk.scalar(c) < b) + [b]
    t, w = gauss_legendre(N, prec)
    xs, ws = [], []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        half = (hi - lo) / 2
        mid = (hi + lo) / 2
        xs.append(mid + half * t)
        ws.append(half * w)
    return np.concatenate(xs), np.concatenate(ws)
