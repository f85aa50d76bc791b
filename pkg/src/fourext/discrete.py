"""Discrete Fourier extension: collocation at symmetric mapped Chebyshev nodes.

With nodes {x_i} and {-x_i}, the sum and difference of the paired rows
(scaled by 1/sqrt 2) is an orthogonal transformation that splits the square
collocation matrix into sqrt(2) [cos(k theta_i)] and sqrt(2) [sin(k theta_i)]
blocks.  Both blocks are solved by truncated SVD; singular values and
condition numbers equal those of the untransformed matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar, Optional

import gmpy2
import numpy as np

from .basis import CoefficientVector, CollocationGrid, ExtensionConfig, cos_sin_table, mapped_cheb_nodes
from .continuous import QuadratureError, evaluate_extension
from .linsolve import LsqReport, block_svd_solve
from .numkit.functions import TestFunction
from .numkit.precision import DOUBLE, backend_for, parse_value, resolve_precision, working_precision
from .numkit.quadrature import gauss_legendre


def collocation_matrix(n: int, T, prec=DOUBLE, grid: Optional[CollocationGrid] = None) -> np.ndarray:
    """(2n+2) x (2n+2) matrix of basis values: rows follow the grid order, columns cos k = 0..n then sin k = 1..n+1."""
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    grid = grid or mapped_cheb_nodes(n, T, prec)
    Tv = parse_value(T, prec)
    theta = bk.pi * grid.nodes / Tv
    cos_k, sin_k = cos_sin_table(n + 1, theta, bk)
    cols = cos_k[: n + 1] + sin_k[1: n + 2]
    return np.column_stack(cols)


def _blocks(n, T, grid, bk):
    theta = bk.pi * grid.positive / T
    cos_k, sin_k = cos_sin_table(n + 1, theta, bk)
    root2 = bk.sqrt(bk.scalar(2))
    Cm = np.column_stack([root2 * cos_k[k] for k in range(n + 1)])
    Sm = np.column_stack([root2 * sin_k[k] for k in range(1, n + 2)])
    return Cm, Sm


@dataclass
class DiscreteExtension:
    """A computed discrete Fourier extension.

    ``cos_coeffs`` holds the coefficients of cos(k pi x / T), k = 0..n, and
    ``sin_coeffs`` those of sin(k pi x / T), k = 1..n+1 (plain, not unitary).
    """

    config: ExtensionConfig
    grid: CollocationGrid
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    report: LsqReport
    rhs_norm: float
    function: Optional[TestFunction] = None
    cos_scale: ClassVar[bool] = False

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
        return 2 * self.n + 2

    @property
    def coeffs(self) -> CoefficientVector:
        return CoefficientVector(np.concatenate([self.cos_coeffs, self.sin_coeffs]), self.n, "real")

    @property
    def coeff_norm(self) -> float:
        with working_precision(self.precision):
            return self.coeffs.norm()

    def __call__(self, x):
        return evaluate_extension(self, x)


def solve_discrete(f: TestFunction, n: int, T, prec=DOUBLE, tol: Optional[float] = None) -> DiscreteExtension:
    """Collocation Fourier extension of ``f`` with 2n+2 degrees of freedom.

    Examples
    --------
    >>> from fourext.numkit import make_function
    >>> ext = solve_discrete(make_function("expx"), 12, 2)
    >>> ext.dof
    26
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    prec = resolve_precision(prec)
    config = ExtensionConfig(T=T, n=n, mode="real", precision=prec)
    with working_precision(prec) as bk:
        Tv = parse_value(T, prec)
        grid = mapped_cheb_nodes(n, Tv, prec)
        Cm, Sm = _blocks(n, Tv, grid, bk)
        fp = f(grid.positive, prec)
        fm = f(-grid.positive, prec)
        root2 = bk.sqrt(bk.scalar(2))
        even = (fp + fm) / root2
        odd = (fp - fm) / root2
        report, (alpha, beta) = block_svd_solve([Cm, Sm], [even, odd], tol=tol, prec=prec)
        rhs_norm = float(gmpy2.sqrt(sum(abs(v) ** 2 for v in list(fp) + list(fm))))
    return DiscreteExtension(config, grid, alpha, beta, report, rhs_norm, f)


# -- normal-equation identity ------------------------------------------------------------


def weighted_gram(n: int, T, nodes: int = 0, prec=DOUBLE) -> np.ndarray:
    """Entries of the integral of phi_j phi_k W over [-1, 1] for the real basis.

    With x = (2T/pi) arcsin(S sin psi), S = sin(pi / 2T), the weight
    transforms as W dx = 2 d psi, removing both endpoint singularities:

        integral phi_j phi_k W dx = 2 * integral_{-pi/2}^{pi/2} phi_j(x(psi)) phi_k(x(psi)) d psi.

    The transformed integrand is smooth and periodic in psi, so
    Gauss-Legendre converges geometrically.
    """
    prec = resolve_precision(prec)
    with working_precision(prec) as bk:
        Tv = parse_value(T, prec)
        N = nodes or max(64, 8 * (n + 8))
        t, w = gauss_legendre(N, prec)
        half = bk.pi / 2
        psi = half * t
        S = bk.sin(bk.pi / (2 * Tv))
        x = 2 * Tv / bk.pi * bk.asin(S * bk.sin(psi))
        theta = bk.pi * x / Tv
        cos_k, sin_k = cos_sin_table(n + 1, theta, bk)
        phis = cos_k[: n + 1] + sin_k[1: n + 2]
        ww = 2 * half * w
        size = 2 * n + 2
        G = np.empty((size, size), dtype=float if prec == DOUBLE else object)
        for j in range(size):
            pw = phis[j] * ww
            for k in range(j, size):
                G[j, k] = G[k, j] = np.sum(pw * phis[k])
    return G


def normal_matrix(n: int, T, prec=DOUBLE) -> np.ndarray:
    """A^T D A for the collocation matrix A and D = diag(pi / (n+1))."""
    prec = resolve_precision(prec)
    with working_precision(prec) as bk:
        A = collocation_matrix(n, T, prec)
        d = bk.pi / (n + 1)
        return (A.T * d) @ A


@dataclass(frozen=True)
class NormalEquationCheck:
    """Deviation between A^T D A and the W-weighted Gram matrix.

    ``max_deviation`` excludes the (sin_{n+1}, sin_{n+1}) entry, whose
    integrand has degree 2n+2 in y and so lies outside the exactness range
    of the (n+1)-point Chebyshev rule; that entry is reported separately.
    """

    max_deviation: float
    top_sine_deviation: float
    quadrature_change: float


def verify_normal_equations(n: int, T, prec=DOUBLE, nodes: int = 0) -> NormalEquationCheck:
    """Compare A^T D A with the weighted Gram matrix; raises QuadratureError if the reference has not converged."""
    if n > 24:
        raise ValueError("n must be at most 24")
    prec = resolve_precision(prec)
    N = nodes or max(64, 8 * (n + 8))
    ref = weighted_gram(n, T, N, prec)
    ref2 = weighted_gram(n, T, 2 * N, prec)
    change = float(np.max(np.abs((ref2 - ref).astype(float))))
    if change > 1e-12:
        raise QuadratureError(f"weighted Gram quadrature not converged (change {change:.3g})")
    AtDA = normal_matrix(n, T, prec)
    diff = np.abs((AtDA - ref2).astype(float))
    top = float(diff[-1, -1])
    diff[-1, -1] = 0.0
    return NormalEquationCheck(float(np.max(diff)), top, change)
