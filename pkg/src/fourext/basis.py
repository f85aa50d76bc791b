"""Fourier bases on [-T, T], the cosine and affine maps, collocation nodes and weights.

Two enumerations are used:

* ``"complex"``: e^{i k pi x / T}, k = -n..n (2n + 1 functions), ordered by k.
* ``"real"``: cos(k pi x / T), k = 0..n, followed by sin(k pi x / T),
  k = 1..n+1 (2n + 2 functions).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import gmpy2
import numpy as np

from .numkit.precision import DOUBLE, backend_for, parse_value, resolve_precision


@dataclass(frozen=True)
class BasisIndex:
    """One basis function: ``kind`` is ``"exp"``, ``"cos"`` or ``"sin"``; ``k`` its frequency index."""

    kind: str
    k: int

    def __post_init__(self):
        if self.kind not in ("exp", "cos", "sin"):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.kind != "exp" and self.k < 0:
            raise ValueError("cos/sin indices are non-negative")


def enumerate_basis(n: int, mode: str = "complex") -> List[BasisIndex]:
    """The ordered basis for degree ``n``; 2n+1 functions (complex) or 2n+2 (real)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if mode == "complex":
        return [BasisIndex("exp", k) for k in range(-n, n + 1)]
    if mode == "real":
        return [BasisIndex("cos", k) for k in range(n + 1)] + [BasisIndex("sin", k) for k in range(1, n + 2)]
    raise ValueError(f"mode must be 'complex' or 'real', got {mode!r}")


def basis_size(n: int, mode: str) -> int:
    return 2 * n + 1 if mode == "complex" else 2 * n + 2


def basis_eval(idx: BasisIndex, T, x, prec=DOUBLE):
    """Value of one basis function at ``x`` (scalar or array)."""
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    T = parse_value(T, prec)
    x = _as_array(x, prec)
    arg = idx.k * bk.pi * x / T
    if idx.kind == "cos":
        return bk.cos(arg)
    if idx.kind == "sin":
        return bk.sin(arg)
    return bk.make_complex(bk.cos(arg), bk.sin(arg))


def _as_array(x, prec):
    if prec == DOUBLE:
        return np.asarray(x, dtype=float)
    bk = backend_for(prec)
    if np.ndim(x) == 0:
        return bk.scalar(x)
    return bk.array(x)


def cos_sin_table(k_max: int, theta, bk):
    """cos(k theta), sin(k theta) for k = 0..k_max by angle addition.

    Returns two lists of arrays.  In double precision the direct evaluation
    is used (cheap and slightly more accurate); in extended precision the
    recurrence saves one transcendental call per entry, with rounding error
    growing only linearly in k.
    """
    if not bk.is_extended:
        ks = np.arange(k_max + 1)
        ang = np.multiply.outer(ks, np.asarray(theta, dtype=float))
        return list(np.cos(ang)), list(np.sin(ang))
    c1 = bk.cos(theta)
    s1 = bk.sin(theta)
    cos_k = [c1 * 0 + 1, c1]
    sin_k = [s1 * 0, s1]
    for _ in range(2, k_max + 1):
        c, s = cos_k[-1], sin_k[-1]
        cos_k.append(c * c1 - s * s1)
        sin_k.append(s * c1 + c * s1)
    return cos_k[: k_max + 1], sin_k[: k_max + 1]


# -- maps -------------------------------------------------------------------------


def cosine_map(x, T, prec=DOUBLE):
    """y = cos(pi x / T); a bijection from [0, T] onto [-1, 1]."""
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    return bk.cos(bk.pi * _as_array(x, prec) / parse_value(T, prec))


def inverse_map(y, T, prec=DOUBLE):
    """x = (T / pi) arccos(y)."""
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    return parse_value(T, prec) / bk.pi * bk.acos(_as_array(y, prec))


def affine_m(t, T, prec=DOUBLE):
    """Affine map of [-1, 1] onto [c(T), 1]: m(t) = ((1 - c) t + 1 + c) / 2."""
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    c = bk.cos(bk.pi / parse_value(T, prec))
    return ((1 - c) * _as_array(t, prec) + 1 + c) / 2


def affine_m_inv(s, T, prec=DOUBLE):
    """Inverse of :func:`affine_m`: (2 s - 1 - c) / (1 - c).  Sends -1 to u(T)."""
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    c = bk.cos(bk.pi / parse_value(T, prec))
    return (2 * _as_array(s, prec) - 1 - c) / (1 - c)


# -- collocation grid ---------------------------------------------------------------


@dataclass(frozen=True)
class CollocationGrid:
    """Symmetric mapped Chebyshev nodes.

    ``nodes`` holds the n+1 positive nodes x_0 < ... < x_n followed by
    their negatives (the widest gap is x_1 - x_0, next to the origin); ``weights`` is the constant pi/(n+1) attached to each
    positive node.
    """

    n: int
    T: object
    nodes: np.ndarray
    weights: np.ndarray
    precision: int = DOUBLE

    @property
    def positive(self) -> np.ndarray:
        return self.nodes[: self.n + 1]

    def __len__(self):
        return len(self.nodes)


def mapped_cheb_nodes(n: int, T, prec=DOUBLE) -> CollocationGrid:
    """x_i = (T/pi) arccos(((1 - c)/2) cos((2i+1) pi / (2n+2)) + (1 + c)/2), i = 0..n, and -x_i.

    >>> g = mapped_cheb_nodes(0, 2)
    >>> round(float(g.nodes[0]), 12)
    0.666666666667
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    Tv = parse_value(T, prec)
    if Tv <= 1:
        raise ValueError("T must exceed 1")
    i = np.arange(n + 1)
    if prec == DOUBLE:
        t = np.cos((2 * i + 1) * np.pi / (2 * n + 2))
    else:
        t = bk.cos(bk.array([(2 * k + 1) for k in i]) * bk.pi / (2 * n + 2))
    y = affine_m(t, Tv, prec)
    x = Tv / bk.pi * bk.acos(y)
    nodes = np.concatenate([x, -x])
    w = bk.pi / (n + 1)
    weights = np.full(n + 1, w, dtype=float if prec == DOUBLE else object)
    return CollocationGrid(n=n, T=T, nodes=nodes, weights=weights, precision=prec)


# -- weights -----------------------------------------------------------------------


def weight_w1(y, T, prec=DOUBLE):
    """(2T/pi) / sqrt(1 - y^2) on (c(T), 1); total mass 2."""
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    y = _as_array(y, prec)
    return 2 * parse_value(T, prec) / bk.pi / bk.sqrt(1 - y * y)


def weight_w2(y, T, prec=DOUBLE):
    """(2T/pi) sqrt(1 - y^2) on (c(T), 1)."""
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    y = _as_array(y, prec)
    return 2 * parse_value(T, prec) / bk.pi * bk.sqrt(1 - y * y)


_W_CLAMP = 2.0 ** -40


def weight_W(x, T, prec=DOUBLE, clamp: bool = False):
    """Collocation weight sqrt(2) (pi/T) cos(pi x / 2T) / sqrt(cos(pi x / T) - cos(pi / T)).

    This is the density for which the discrete normal equations reproduce
    weighted inner products.  It has inverse square-root singularities at
    x = +-1.  ``clamp=True`` pulls x into [-1 + 2^-40, 1 - 2^-40], which is
    only meant for plotting.
    """
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    T = parse_value(T, prec)
    x = _as_array(x, prec)
    if clamp:
        lim = 1 - _W_CLAMP
        x = np.clip(x, -lim, lim) if prec == DOUBLE else _clip_obj(x, lim)
    c = bk.cos(bk.pi / T)
    root2 = bk.sqrt(bk.scalar(2))
    return root2 * bk.pi / T * bk.cos(bk.pi * x / (2 * T)) / bk.sqrt(bk.cos(bk.pi * x / T) - c)


def _clip_obj(x, lim):
    if np.ndim(x) == 0:
        return max(-lim, min(lim, x))
    return np.array([max(-lim, min(lim, v)) for v in x], dtype=object)


# -- coefficient conventions ---------------------------------------------------------


def complex_to_real(a, n: int, prec=DOUBLE) -> Tuple[np.ndarray, np.ndarray]:
    """Exponential coefficients a_{-n..n} to (cos coefficients k=0..n, sin coefficients k=1..n).

    Uses e^{ik theta} = cos k theta + i sin k theta, so
    alpha_0 = a_0, alpha_k = a_k + a_{-k}, beta_k = i (a_k - a_{-k}).
    """
    a = np.asarray(a, dtype=object if resolve_precision(prec) != DOUBLE else complex)
    if len(a) != 2 * n + 1:
        raise ValueError("expected 2n+1 coefficients")
    pos = a[n:]
    neg = a[n::-1]
    alpha = pos + neg
    alpha[0] = pos[0]
    beta = (pos[1:] - neg[1:]) * 1j
    return alpha, beta


def real_to_complex(alpha, beta, prec=DOUBLE) -> np.ndarray:
    """Inverse of :func:`complex_to_real`; ``beta`` may have length n (or n+1, the last is dropped only if zero)."""
    prec = resolve_precision(prec)
    alpha = np.asarray(alpha, dtype=object if prec != DOUBLE else complex)
    beta = np.asarray(beta, dtype=object if prec != DOUBLE else complex)
    n = len(alpha) - 1
    if len(beta) == n + 1:
        if beta[-1] != 0:
            raise ValueError("sin_{n+1} has no exponential counterpart at degree n")
        beta = beta[:n]
    if len(beta) != n:
        raise ValueError("need n sine coefficients for n+1 cosine coefficients")
    pos = np.empty(n + 1, dtype=alpha.dtype)
    neg = np.empty(n, dtype=alpha.dtype)
    pos[0] = alpha[0]
    pos[1:] = (alpha[1:] - 1j * beta) / 2
    neg[:] = (alpha[1:] + 1j * beta) / 2
    return np.concatenate([neg[::-1], pos])


# -- run parameters and coefficient containers ----------------------------------------


@dataclass(frozen=True)
class ExtensionConfig:
    """Parameters of one extension: extension parameter ``T``, degree ``n``, basis mode and precision."""

    T: object
    n: int
    mode: str = "complex"
    precision: int = DOUBLE

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.mode not in ("complex", "real"):
            raise ValueError("mode must be 'complex' or 'real'")
        object.__setattr__(self, "precision", resolve_precision(self.precision))
        if parse_value(self.T, DOUBLE) <= 1:
            raise ValueError("T must exceed 1")

    @property
    def dof(self) -> int:
        return basis_size(self.n, self.mode)


@dataclass(frozen=True)
class CoefficientVector:
    """Coefficients of an extension in the enumeration of :func:`enumerate_basis`."""

    values: np.ndarray
    n: int
    mode: str

    def __len__(self):
        return len(self.values)

    def norm(self) -> float:
        """Euclidean norm, returned as a float (may be very large)."""
        return float(_norm2(self.values))

    def as_array(self) -> np.ndarray:
        return self.values


def _norm2(v):
    v = np.asarray(v)
    if v.dtype != object:
        return np.linalg.norm(v)
    return gmpy2.sqrt(sum(abs(t) ** 2 for t in v))
