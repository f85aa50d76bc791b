"""Chebyshev expansion baseline.

    f(x) ~ a_0 / 2 + sum_{k>=1} a_k T_k(x),   a_k = (2/pi) integral_0^pi f(cos t) cos(k t) dt.

The 2/pi factor is the one for which f = 1 is reproduced exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .continuous import GRID_POINTS, QuadratureError, _grid
from .numkit.functions import TestFunction
from .numkit.precision import DOUBLE, decimal_digits, resolve_precision, working_precision
from .numkit.quadrature import composite_rule, round_nodes


@dataclass
class ChebExpansion:
    """Coefficients a_0..a_n of a truncated Chebyshev series (first term halved on evaluation)."""

    coeffs: np.ndarray
    precision: int = DOUBLE
    function: Optional[TestFunction] = None

    @property
    def n(self) -> int:
        return len(self.coeffs) - 1

    @property
    def dof(self) -> int:
        return self.n + 1

    def __call__(self, x, m: Optional[int] = None):
        return cheb_eval(self, x, m)

    def partial_errors(self, points: int = GRID_POINTS) -> np.ndarray:
        """Max-norm error of the degree-m truncation on a uniform grid for every m = 0..n."""
        if self.function is None:
            raise ValueError("expansion has no target function")
        prec = self.precision
        x, fx = _grid(self.function, prec, points)
        with working_precision(prec):
            t_prev = x * 0 + 1
            resid = fx - self.coeffs[0] / 2 * t_prev
            errs = [float(max(abs(v) for v in resid))]
            t = x
            for k in range(1, self.n + 1):
                resid = resid - self.coeffs[k] * t
                errs.append(float(max(abs(v) for v in resid)))
                t_prev, t = t, 2 * x * t - t_prev
        return np.array(errs)


@lru_cache(maxsize=32)
def _theta_rule(f: TestFunction, N: int, prec: int):
    with working_precision(prec) as bk:
        # Breakpoints of f in x become breakpoints in theta.
        cuts = [bk.acos(bk.scalar(b)) for b in f.breakpoints]
        t, w = composite_rule(0, bk.pi, N, prec, cuts)
        ft = f(bk.cos(t), prec)
    for a in (t, w, ft):
        a.setflags(write=False)
    return t, w, ft


def _coeffs(f, n, N, prec, bk):
    t, w, ft = _theta_rule(f, N, prec)
    fw = ft * w
    scale = 2 / bk.pi
    if not bk.is_extended:
        C = np.cos(np.multiply.outer(np.arange(n + 1), t))
        return scale * (C @ fw)
    c1 = bk.cos(t)
    ck_prev, ck = t * 0 + 1, c1
    out = [scale * np.sum(fw)]
    for k in range(1, n + 1):
        out.append(scale * np.sum(fw * ck))
        ck_prev, ck = ck, 2 * c1 * ck - ck_prev
    return np.array(out, dtype=object)


def cheb_coeffs(f: TestFunction, n: int, prec=DOUBLE, nodes: Optional[int] = None) -> ChebExpansion:
    """Chebyshev coefficients a_0..a_n by Gauss-Legendre quadrature in theta, checked by doubling.

    >>> from fourext.numkit import make_function
    >>> round(float(cheb_coeffs(make_function("expx"), 4).coeffs[0]), 10)
    2.5321317555
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    prec = resolve_precision(prec)
    N = nodes or round_nodes(4 * (n + int(math.ceil(f.frequency)) + 16))
    with working_precision(prec) as bk:
        a1 = _coeffs(f, n, N, prec, bk)
        a2 = _coeffs(f, n, 2 * N, prec, bk)
        diff = max(abs(u - v) for u, v in zip(a1, a2))
        scale = max(max(abs(v) for v in a2), 1)
        if float(diff) > 10.0 ** (-decimal_digits(prec) / 4) * float(scale):
            raise QuadratureError(f"Chebyshev coefficients of {f} not converged at {N} nodes")
    return ChebExpansion(a2, prec, f)


def cheb_eval(exp: ChebExpansion, x, m: Optional[int] = None):
    """Clenshaw evaluation of the (optionally degree-m truncated) series at ``x``."""
    a = exp.coeffs[: (exp.n if m is None else m) + 1]
    prec = exp.precision
    with working_precision(prec) as bk:
        scalar = np.ndim(x) == 0
        xa = np.atleast_1d(np.asarray(x, dtype=float if prec == DOUBLE else object))
        if prec != DOUBLE:
            xa = bk.array(xa)
        b1 = xa * 0
        b2 = xa * 0
        for k in range(len(a) - 1, 0, -1):
            b1, b2 = 2 * xa * b1 - b2 + a[k], b1
        val = xa * b1 - b2 + a[0] / 2
    return val[0] if scalar else val


def cheb_error(f: TestFunction, n: int, prec=DOUBLE, points: int = GRID_POINTS) -> float:
    """Max-norm error of the degree-n truncated expansion on a uniform grid."""
    exp = cheb_coeffs(f, n, prec)
    return float(exp.partial_errors(points)[-1])
