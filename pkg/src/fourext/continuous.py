"""Continuous Fourier extension: the L2[-1, 1] best approximation from span{e^{i k pi x / T}}_{|k| <= n}.

The Gram matrix has closed-form entries G(k - j) with
G(0) = 2 and G(d) = 2T sin(d pi / T) / (d pi).  Internally the solve runs in
the unitary real basis

    u_0 = 1,  u_k = sqrt(2) cos(k theta),  v_k = sqrt(2) sin(k theta),  theta = pi x / T,

where the Gram matrix is block diagonal (even and odd parts decouple) and
real, with the same singular values as the exponential Gram matrix.
Coefficients are converted back to the exponential basis on output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import ClassVar, Optional, Tuple

import gmpy2
import numpy as np

from .basis import CoefficientVector, ExtensionConfig, cos_sin_table
from .linsolve import LsqReport, block_svd_solve
from .numkit.functions import TestFunction
from .numkit.precision import (
    DOUBLE,
    EXTENDED,
    backend_for,
    decimal_digits,
    parse_value,
    resolve_precision,
    working_precision,
)
from .numkit.quadrature import composite_rule, round_nodes

GRID_POINTS = 2001


class QuadratureError(ArithmeticError):
    """Raised when doubling a quadrature rule changes the result beyond tolerance."""


# -- precision selection ------------------------------------------------------------


def theoretical_precision(n: int, T, base: int = EXTENDED) -> int:
    """Working precision for a Gram solve that should match exact arithmetic.

    The Gram condition number grows like E(T)^(2n); adding that many bits to
    ``base`` keeps the extension accurate to about ``base`` bits.
    """
    Tf = parse_value(T, DOUBLE)
    E = 1.0 / math.tan(math.pi / (4 * Tf)) ** 2
    extra = 2 * n * math.log2(E)
    return int(32 * math.ceil((base + extra) / 32))


def resolve_solve_precision(prec, n: int, T) -> int:
    """Like :func:`resolve_precision`, plus ``"auto"`` / ``"auto:<base>"`` for :func:`theoretical_precision`."""
    if isinstance(prec, str) and prec.strip().lower().startswith("auto"):
        parts = prec.split(":", 1)
        base = int(parts[1]) if len(parts) == 2 else EXTENDED
        return theoretical_precision(n, T, base)
    return resolve_precision(prec)


# -- Gram matrix -----------------------------------------------------------------------


def _gram_value(d: int, T, bk):
    if d == 0:
        return bk.scalar(2)
    return 2 * T * bk.sin(d * bk.pi / T) / (d * bk.pi)


def gram_entry(j: int, k: int, T, prec=DOUBLE):
    """<phi_k, phi_j> = integral over [-1, 1] of e^{i (k - j) pi x / T}.

    >>> gram_entry(3, 3, 2)
    2.0
    """
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    return _gram_value(k - j, parse_value(T, prec), bk)


def _gram_table(n: int, T, bk):
    return [_gram_value(d, T, bk) for d in range(2 * n + 1)]


def gram_matrix(n: int, T, prec=DOUBLE) -> np.ndarray:
    """The (2n+1) x (2n+1) Gram matrix in the exponential basis, ordered k = -n..n.

    The matrix is real symmetric Toeplitz.
    """
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    T = parse_value(T, prec)
    g = _gram_table(n, T, bk)
    size = 2 * n + 1
    A = np.empty((size, size), dtype=float if prec == DOUBLE else object)
    for j in range(size):
        for k in range(size):
            A[j, k] = g[abs(k - j)]
    return A


def gram_blocks(n: int, T, prec=DOUBLE) -> Tuple[np.ndarray, np.ndarray]:
    """Even (n+1 square) and odd (n square) blocks of the Gram matrix in the unitary real basis."""
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    T = parse_value(T, prec)
    g = _gram_table(n, T, bk)
    dtype = float if prec == DOUBLE else object
    root2 = bk.sqrt(bk.scalar(2))
    scale = [bk.scalar(1)] + [root2] * n
    C = np.empty((n + 1, n + 1), dtype=dtype)
    for j in range(n + 1):
        for k in range(n + 1):
            C[j, k] = scale[j] * scale[k] * (g[abs(j - k)] + g[j + k]) / 2
    S = np.empty((n, n), dtype=dtype)
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            S[j - 1, k - 1] = g[abs(j - k)] - g[j + k]
    return C, S


# -- right-hand side -------------------------------------------------------------------


def quadrature_size(n: int, f: TestFunction) -> int:
    """Gauss-Legendre node count 4(n + ceil(omega) + 16), rounded up to a multiple of 32."""
    return round_nodes(4 * (n + int(math.ceil(f.frequency)) + 16))


@lru_cache(maxsize=48)
def _sampled(f: TestFunction, N: int, prec: int):
    """Composite Gauss-Legendre nodes, weights and f-values (inside the caller's context)."""
    x, w = composite_rule(-1, 1, N, prec, f.breakpoints)
    fx = f(x, prec)
    for a in (x, w, fx):
        a.setflags(write=False)
    return x, w, fx


def _project(fx, w, x, n: int, T, bk):
    """Inner products of f with u_0..u_n and v_1..v_n."""
    theta = bk.pi * x / T
    cos_k, sin_k = cos_sin_table(n, theta, bk)
    fw = fx * w
    root2 = bk.sqrt(bk.scalar(2))
    Bc = [np.sum(fw * cos_k[0])] + [root2 * np.sum(fw * cos_k[k]) for k in range(1, n + 1)]
    Bs = [root2 * np.sum(fw * sin_k[k]) for k in range(1, n + 1)]
    dtype = object if bk.is_extended else np.result_type(fx, float)
    return np.array(Bc, dtype=dtype), np.array(Bs, dtype=dtype)


def _max_abs(*arrays):
    vals = [abs(v) for a in arrays for v in a]
    return max(vals) if vals else 0


def rhs_real(f: TestFunction, n: int, T, prec=DOUBLE, nodes: Optional[int] = None, check: bool = True):
    """Right-hand side in the unitary real basis, with a rule-doubling convergence check.

    Must run inside ``working_precision(prec)`` when ``prec`` is extended.
    Returns ``(Bc, Bs, N)`` where ``N`` is the node count per smooth piece
    that was used.

    Raises
    ------
    QuadratureError
        If doubling the rule changes any entry by more than
        ``10**(-digits/4)`` relative to the largest entry.
    """
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    T = parse_value(T, prec)
    N = nodes or quadrature_size(n, f)
    x, w, fx = _sampled(f, N, prec)
    Bc, Bs = _project(fx, w, x, n, T, bk)
    if not check:
        return Bc, Bs, N
    x2, w2, fx2 = _sampled(f, 2 * N, prec)
    Bc2, Bs2 = _project(fx2, w2, x2, n, T, bk)
    diff = _max_abs(Bc2 - Bc, Bs2 - Bs)
    scale = max(_max_abs(Bc2, Bs2), 1)
    limit = 10.0 ** (-decimal_digits(prec) / 4)
    if float(diff) > limit * float(scale):
        raise QuadratureError(
            f"right-hand side for {f} not converged at {N} nodes (change {float(diff):.3g})"
        )
    return Bc2, Bs2, 2 * N


def rhs_entry(f: TestFunction, j: int, T, prec=DOUBLE, n: Optional[int] = None):
    """<f, phi_j> = integral over [-1, 1] of f(x) e^{-i j pi x / T}."""
    prec = resolve_precision(prec)
    with working_precision(prec) as bk:
        Tv = parse_value(T, prec)
        N = quadrature_size(max(abs(j), n or 0), f)
        x, w, fx = _sampled(f, 2 * N, prec)
        arg = -j * bk.pi * x / Tv
        val = np.sum(fx * w * bk.make_complex(bk.cos(arg), bk.sin(arg)))
    return complex(val) if prec == DOUBLE else val


def frame_coefficients(f: TestFunction, K: int, T, prec=DOUBLE) -> np.ndarray:
    """(1/sqrt 2) integral f(x) e^{i k pi x / T} dx for k = -K..K.

    These are the coefficients of f in the normalised tight frame; the sum of
    their squared moduli tends to T ||f||^2 as K grows.
    """
    prec = resolve_precision(prec)
    with working_precision(prec) as bk:
        Tv = parse_value(T, prec)
        N = quadrature_size(K, f)
        x, w, fx = _sampled(f, N, prec)
        if prec == DOUBLE:
            ks = np.arange(-K, K + 1)
            E = np.exp(1j * np.pi / float(Tv) * np.multiply.outer(ks, x))
            return (E @ (fx * w)) / np.sqrt(2.0)
        Bc, Bs = _project(fx, w, x, K, Tv, bk)
        root2 = bk.sqrt(bk.scalar(2))
        pos = [Bc[0] / root2] + [(Bc[k] + 1j * Bs[k - 1]) / 2 for k in range(1, K + 1)]
        neg = [(Bc[k] - 1j * Bs[k - 1]) / 2 for k in range(K, 0, -1)]
        return np.array(neg + pos, dtype=object)


# -- solve and evaluation ------------------------------------------------------------------


@dataclass
class ContinuousExtension:
    """A computed continuous Fourier extension.

    ``cos_coeffs`` (length n+1) and ``sin_coeffs`` (length n) are the
    coefficients on the unitary real basis; :attr:`coeffs` gives the usual
    exponential coefficients a_{-n..n}.
    """

    config: ExtensionConfig
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    report: LsqReport
    rhs_norm: float
    quad_nodes: int
    function: Optional[TestFunction] = None
    cos_scale: ClassVar[bool] = True  # coefficients live on the unitary basis

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def T(self):
        return self.config.T

    @property
    def precision(self) -> int:
        return self.config.precision

    @property
    def dof(self) -> int:
        return 2 * self.n + 1

    @property
    def coeffs(self) -> CoefficientVector:
        with working_precision(self.precision) as bk:
            root2 = bk.sqrt(bk.scalar(2))
            C, S = self.cos_coeffs, self.sin_coeffs
            pos = [C[0]] + [(C[k] - 1j * S[k - 1]) / root2 for k in range(1, self.n + 1)]
            neg = [(C[k] + 1j * S[k - 1]) / root2 for k in range(self.n, 0, -1)]
            dtype = complex if self.precision == DOUBLE else object
            return CoefficientVector(np.array(neg + pos, dtype=dtype), self.n, "complex")

    @property
    def coeff_norm(self) -> float:
        """l2 norm of the exponential coefficients (equal to that of the real-basis ones)."""
        with working_precision(self.precision):
            return CoefficientVector(np.concatenate([self.cos_coeffs, self.sin_coeffs]), self.n, "complex").norm()

    def __call__(self, x):
        return evaluate_extension(self, x)


def solve_continuous(
    f: TestFunction,
    n: int,
    T,
    prec=DOUBLE,
    tol: Optional[float] = None,
    nodes: Optional[int] = None,
) -> ContinuousExtension:
    """Least-squares Fourier extension of ``f`` of degree ``n`` on [-T, T].

    Parameters
    ----------
    f : TestFunction
    n : int
        Frequencies |k| <= n, so 2n+1 degrees of freedom.
    T : number or expression string
        Extension parameter, T > 1.
    prec : precision spec or ``"auto"``
        ``"double"`` gives the numerical extension.  ``"auto"`` selects enough
        bits (:func:`theoretical_precision`) to reproduce the exact minimiser.
    tol : float, optional
        Relative SVD truncation threshold (default: epsilon times size).
    nodes : int, optional
        Override the Gauss-Legendre node count for the right-hand side.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    prec = resolve_solve_precision(prec, n, T)
    config = ExtensionConfig(T=T, n=n, mode="complex", precision=prec)
    with working_precision(prec) as bk:
        Tv = parse_value(T, prec)
        C, S = gram_blocks(n, Tv, prec)
        Bc, Bs, N = rhs_real(f, n, Tv, prec, nodes=nodes)
        blocks, rhss = [C], [Bc]
        if n > 0:
            blocks.append(S)
            rhss.append(Bs)
        report, parts = block_svd_solve(blocks, rhss, tol=tol, prec=prec)
        cos_c = parts[0]
        sin_c = parts[1] if n > 0 else np.array([], dtype=cos_c.dtype)
        rhs_norm = float(gmpy2.sqrt(sum(abs(v) ** 2 for v in list(Bc) + list(Bs))))
    return ContinuousExtension(config, cos_c, sin_c, report, rhs_norm, N, f)


def evaluate_extension(ext, x):
    """Evaluate an extension (continuous or discrete) at points ``x`` in its working precision."""
    prec = ext.precision
    with working_precision(prec) as bk:
        scalar = np.ndim(x) == 0
        xa = np.atleast_1d(np.asarray(x, dtype=float if prec == DOUBLE else object))
        if prec != DOUBLE:
            xa = bk.array(xa)
        Tv = parse_value(ext.T, prec)
        out = _eval_real_series(ext.cos_coeffs, ext.sin_coeffs, ext.cos_scale, xa, Tv, bk)
    return out[0] if scalar else out


def _eval_real_series(cos_c, sin_c, unitary: bool, x, T, bk):
    n = max(len(cos_c) - 1, len(sin_c))
    theta = bk.pi * x / T
    cos_k, sin_k = cos_sin_table(n, theta, bk)
    if bk.is_extended:
        acc = cos_c[0] * cos_k[0]
    else:
        acc = np.zeros(len(x), dtype=np.result_type(cos_c, sin_c, float)) + cos_c[0]
    s = bk.sqrt(bk.scalar(2)) if unitary else 1
    for k in range(1, len(cos_c)):
        acc = acc + (s * cos_c[k]) * cos_k[k]
    for k in range(1, len(sin_c) + 1):
        acc = acc + (s * sin_c[k - 1]) * sin_k[k]
    return acc



@lru_cache(maxsize=32)
def _grid(f: TestFunction, prec: int, points: int):
    with working_precision(prec) as bk:
        x = bk.linspace(-1, 1, points)
        fx = f(x, prec)
    x.setflags(write=False)
    fx.setflags(write=False)
    return x, fx


def error_norms(ext, f: Optional[TestFunction] = None, points: int = GRID_POINTS) -> Tuple[float, float]:
    """(L-infinity on a uniform grid of [-1, 1], L2 by Gauss-Legendre quadrature) of f - g."""
    f = f or ext.function
    if f is None:
        raise ValueError("no target function")
    prec = ext.precision
    x, fx = _grid(f, prec, points)
    gx = evaluate_extension(ext, x)
    with working_precision(prec) as bk:
        linf = max(abs(v) for v in (fx - gx))
        N = quadrature_size(ext.n, f)
        xq, wq, fq = _sampled(f, N, prec)
        gq = evaluate_extension(ext, xq)
        d = fq - gq
        if bk.is_extended:
            l2 = bk.sqrt(np.sum(wq * np.array([abs(v) ** 2 for v in d], dtype=object)))
        else:
            l2 = math.sqrt(float(np.sum(wq * np.abs(d) ** 2)))
    return float(linf), float(l2)
