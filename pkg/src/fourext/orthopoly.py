"""Orthogonal-polynomial form of the continuous Fourier extension.

Under y = cos(pi x / T) the even part of span{e^{i k pi x / T}}_{|k|<=n} becomes
the polynomials of degree n in y on [c(T), 1], orthonormal for

    w1(y) = (2T/pi) / sqrt(1 - y^2),

and the odd part becomes sin(pi x / T) times polynomials of degree n-1,
orthonormal for w2(y) = (2T/pi) sqrt(1 - y^2).  Writing T_k and U_k for the
two orthonormal families, the extension is

    g_n(x) = sum_{k<=n} a_k T_k(y) + sin(pi x / T) sum_{k<n} b_k U_k(y),
    a_k = integral f T_k(y) dx,   b_k = integral f sin(pi x / T) U_k(y) dx.

Recurrence coefficients are generated by a discretised Stieltjes procedure
on Gauss-Legendre nodes in x on [0, 1].  Working in x is the natural
square-root substitution for both weights, so the discretisation sees a
smooth integrand and converges geometrically.  No Gram matrix is formed,
which makes this route well conditioned: it is used both as an
independent check of the Gram solve and for cheap n-sweeps of the exact
extension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import gmpy2
import numpy as np

from .continuous import GRID_POINTS, QuadratureError, _grid, _sampled, quadrature_size
from .numkit.functions import TestFunction
from .numkit.precision import DOUBLE, EXTENDED, PrecisionError, backend_for, decimal_digits, parse_value, resolve_precision, working_precision
from .numkit.quadrature import gauss_legendre, round_nodes

WEIGHTS = ("w1", "w2")


@dataclass(frozen=True)
class Recurrence:
    """Three-term recurrence of an orthonormal family.

    sqrt(beta[k+1]) p_{k+1}(y) = (y - alpha[k]) p_k(y) - sqrt(beta[k]) p_{k-1}(y),
    with p_0 = 1 / sqrt(beta[0]) and beta[0] the total mass (2 for w1).
    """

    weight: str
    T: object
    alpha: np.ndarray
    beta: np.ndarray
    precision: int
    nodes: int

    @property
    def degree(self) -> int:
        return len(self.alpha) - 1


def _discretisation(weight: str, T, N: int, prec: int, bk):
    t, w = gauss_legendre(N, prec)
    x = (t + 1) / 2
    Tv = parse_value(T, prec)
    y = bk.cos(bk.pi * x / Tv)
    if weight == "w1":
        ww = w  # 2 * (half-interval Jacobian 1/2)
    else:
        s = bk.sin(bk.pi * x / Tv)
        ww = w * s * s
    return y, ww


def _stieltjes(y, ww, K: int, bk):
    alpha, beta = [], []
    mu0 = np.sum(ww)
    beta.append(mu0)
    p_prev = y * 0
    p = y * 0 + 1 / bk.sqrt(mu0)
    sq_prev = bk.scalar(0)
    for k in range(K + 1):
        wp = ww * p
        a = np.sum(wp * y * p)
        alpha.append(a)
        if k == K:
            break
        q = (y - a) * p - sq_prev * p_prev
        b = np.sum(ww * q * q)
        if not b > 0:
            raise PrecisionError(f"Stieltjes recurrence lost positivity at degree {k + 1}")
        beta.append(b)
        sq = bk.sqrt(b)
        p_prev, p = p, q / sq
        sq_prev = sq
    return alpha, beta


def stieltjes_recurrence(weight: str, T, K: int, prec=EXTENDED, nodes: Optional[int] = None) -> Recurrence:
    """Recurrence coefficients alpha[0..K], beta[0..K] for weight ``"w1"`` or ``"w2"``.

    The discretisation is doubled once and the result accepted only if
    beta[K] changes by less than 10^(-digits/8) relative.
    """
    if weight not in WEIGHTS:
        raise ValueError(f"weight must be one of {WEIGHTS}")
    if not 0 <= K <= 400:
        raise ValueError("K must lie in [0, 400]")
    prec = resolve_precision(prec)
    if parse_value(T, DOUBLE) <= 1:
        raise ValueError("T must exceed 1")
    N = nodes or round_nodes(2 * K + 32)
    with working_precision(prec) as bk:
        y, ww = _discretisation(weight, T, N, prec, bk)
        a1, b1 = _stieltjes(y, ww, K, bk)
        y, ww = _discretisation(weight, T, 2 * N, prec, bk)
        a2, b2 = _stieltjes(y, ww, K, bk)
        rel = abs(b2[-1] - b1[-1]) / b2[-1] if K > 0 else abs(b2[0] - b1[0])
        if float(rel) > 10.0 ** (-decimal_digits(prec) / 8):
            raise QuadratureError(f"Stieltjes discretisation not converged at {N} nodes")
        dtype = float if prec == DOUBLE else object
        alpha = np.array(a2, dtype=dtype)
        beta = np.array(b2, dtype=dtype)
    alpha.setflags(write=False)
    beta.setflags(write=False)
    return Recurrence(weight, T, alpha, beta, prec, 2 * N)


def eval_all(rec: Recurrence, K: int, y) -> List[np.ndarray]:
    """[p_0(y), ..., p_K(y)]; must run inside the recurrence's working precision."""
    if K > rec.degree:
        raise ValueError(f"recurrence only reaches degree {rec.degree}")
    bk = backend_for(rec.precision)
    sq = [bk.sqrt(b) for b in rec.beta]
    p_prev = y * 0
    p = y * 0 + 1 / sq[0]
    out = [p]
    for k in range(K):
        q = ((y - rec.alpha[k]) * p - (sq[k] if k > 0 else 0) * p_prev) / sq[k + 1]
        p_prev, p = p, q
        out.append(p)
    return out


def eval_poly(rec: Recurrence, k: int, y):
    """Orthonormal polynomial p_k at ``y`` (scalar or array)."""
    with working_precision(rec.precision) as bk:
        scalar = np.ndim(y) == 0
        ya = np.atleast_1d(np.asarray(y, dtype=float if rec.precision == DOUBLE else object))
        if rec.precision != DOUBLE:
            ya = bk.array(ya)
        val = eval_all(rec, k, ya)[k]
    return val[0] if scalar else val


def poly_sup_norm(rec: Recurrence, k: int, points: int = 4001) -> Tuple[float, float]:
    """max |p_k(y)| over y in [-1, 1] on a Chebyshev-clustered grid; returns (value, argmax y)."""
    with working_precision(rec.precision) as bk:
        j = np.arange(points)
        if rec.precision == DOUBLE:
            y = np.cos(np.pi * j / (points - 1))
        else:
            y = bk.cos(bk.array(j) * bk.pi / (points - 1))
        p = eval_all(rec, k, y)[k]
        mags = [abs(v) for v in p]
        i = int(np.argmax(np.array([float(m) for m in mags])))
        return float(mags[i]), float(y[i])


# -- expansion -------------------------------------------------------------------------------


@dataclass
class OrthoExtension:
    """Continuous Fourier extension in orthogonal-polynomial form.

    ``a`` has n+1 entries and ``b`` has n entries; truncating to ``a[:m+1]``
    and ``b[:m]`` gives the degree-m extension for every m <= n.
    """

    f: TestFunction
    n: int
    T: object
    a: np.ndarray
    b: np.ndarray
    rec1: Recurrence
    rec2: Optional[Recurrence]
    precision: int
    quad_nodes: int = 0

    @property
    def dof(self) -> int:
        return 2 * self.n + 1

    def __call__(self, x, m: Optional[int] = None):
        return reconstruct(self.a, self.b, self.T, x, self.rec1, self.rec2, m=m)

    def partial_errors(self, points: int = GRID_POINTS) -> np.ndarray:
        """Max-norm error of g_m on a uniform grid for every m = 0..n (float array)."""
        prec = self.precision
        xg, fx = _grid(self.f, prec, points)
        with working_precision(prec) as bk:
            Tv = parse_value(self.T, prec)
            y = bk.cos(bk.pi * xg / Tv)
            s = bk.sin(bk.pi * xg / Tv)
            P = eval_all(self.rec1, self.n, y)
            Q = eval_all(self.rec2, self.n - 1, y) if self.n > 0 else []
            resid = fx - self.a[0] * P[0]
            errs = [float(max(abs(v) for v in resid))]
            for m in range(1, self.n + 1):
                resid = resid - self.a[m] * P[m] - self.b[m - 1] * (s * Q[m - 1])
                errs.append(float(max(abs(v) for v in resid)))
        return np.array(errs)


def expansion_coeffs(
    f: TestFunction,
    n: int,
    T,
    prec=EXTENDED,
    rec1: Optional[Recurrence] = None,
    rec2: Optional[Recurrence] = None,
    nodes: Optional[int] = None,
) -> OrthoExtension:
    """Coefficients a_0..a_n, b_0..b_{n-1} by Gauss-Legendre quadrature in x over [-1, 1].

    The rule is doubled once as a convergence check, as for the Gram
    right-hand side.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    prec = resolve_precision(prec)
    rec1 = rec1 if rec1 is not None and rec1.degree >= n else stieltjes_recurrence("w1", T, n, prec)
    if n > 0:
        rec2 = rec2 if rec2 is not None and rec2.degree >= n - 1 else stieltjes_recurrence("w2", T, n - 1, prec)
    N = nodes or quadrature_size(n, f)
    with working_precision(prec) as bk:
        Tv = parse_value(T, prec)

        def coeffs(M):
            x, w, fx = _sampled(f, M, prec)
            y = bk.cos(bk.pi * x / Tv)
            s = bk.sin(bk.pi * x / Tv)
            fw = fx * w
            a = [np.sum(fw * p) for p in eval_all(rec1, n, y)]
            b = [np.sum(fw * s * q) for q in eval_all(rec2, n - 1, y)] if n > 0 else []
            return a, b

        a1, b1 = coeffs(N)
        a2, b2 = coeffs(2 * N)
        diff = max(abs(u - v) for u, v in zip(a1 + b1, a2 + b2))
        scale = max(max(abs(v) for v in a2 + b2), 1)
        if float(diff) > 10.0 ** (-decimal_digits(prec) / 4) * float(scale):
            raise QuadratureError(f"expansion coefficients of {f} not converged at {N} nodes")
        dtype = np.result_type(*a2) if prec == DOUBLE else object
        a = np.array(a2, dtype=dtype)
        b = np.array(b2, dtype=dtype)
    return OrthoExtension(f, n, T, a, b, rec1, rec2 if n > 0 else None, prec, 2 * N)


def reconstruct(a, b, T, x, rec1: Recurrence, rec2: Optional[Recurrence] = None, m: Optional[int] = None):
    """Evaluate sum a_k T_k(y) + sin(pi x / T) sum b_k U_k(y) at ``x``.

    ``m`` truncates to the degree-m extension (``a[:m+1]``, ``b[:m]``).
    """
    n = len(a) - 1 if m is None else m
    if n < 0:
        raise ValueError("need at least one coefficient")
    prec = rec1.precision
    with working_precision(prec) as bk:
        scalar = np.ndim(x) == 0
        xa = np.atleast_1d(np.asarray(x, dtype=float if prec == DOUBLE else object))
        if prec != DOUBLE:
            xa = bk.array(xa)
        Tv = parse_value(T, prec)
        y = bk.cos(bk.pi * xa / Tv)
        s = bk.sin(bk.pi * xa / Tv)
        P = eval_all(rec1, n, y)
        acc = a[0] * P[0]
        for k in range(1, n + 1):
            acc = acc + a[k] * P[k]
        nb = min(len(b), n)
        if nb > 0:
            if rec2 is None:
                raise ValueError("sine coefficients need the w2 recurrence")
            Q = eval_all(rec2, nb - 1, y)
            acc = acc + s * sum((b[k] * Q[k] for k in range(1, nb)), b[0] * Q[0])
    return acc[0] if scalar else acc
