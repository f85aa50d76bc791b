"""Truncated-SVD least squares at native or extended precision.

Double precision defers to LAPACK through :func:`numpy.linalg.svd`.  Extended
precision uses a one-sided (Hestenes) Jacobi SVD on object arrays of MPFR
numbers: it only needs rotations and dot products, so it works unchanged at
any precision and computes small singular values to high relative accuracy.

Block-diagonal systems (the parity-split Gram and collocation matrices) can be
solved through :func:`block_svd_solve`, which truncates all blocks against the
global largest singular value so the result matches a solve of the assembled
matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import gmpy2
import numpy as np

from .numkit.precision import DOUBLE, PrecisionError, backend_for, resolve_precision

_MPC = type(gmpy2.mpc(0))
_MAX_SWEEPS = 80


@dataclass
class LsqReport:
    """Result of a truncated-SVD least-squares solve.

    ``condition_number`` is the full ratio sigma_max / sigma_min (``inf`` when
    sigma_min is zero); ``condition_truncated`` uses the smallest retained
    singular value instead.  Scalars are floats; ``solution`` keeps the
    working precision of the solve.
    """

    solution: np.ndarray
    sigma_max: float
    sigma_min: float
    condition_number: float
    condition_truncated: float
    effective_rank: int
    truncation_tol: float
    singular_values: np.ndarray = field(repr=False)
    precision: int = DOUBLE

    @property
    def shape_rank(self) -> int:
        return len(self.singular_values)


def _is_complex(a: np.ndarray) -> bool:
    if a.dtype == object:
        return any(isinstance(v, _MPC) for v in a.ravel())
    return np.iscomplexobj(a)


def _check_finite(a: np.ndarray, what: str):
    if a.dtype == object:
        ok = all(gmpy2.is_finite(v) if not isinstance(v, _MPC) else
                 (gmpy2.is_finite(v.real) and gmpy2.is_finite(v.imag)) for v in a.ravel())
    else:
        ok = bool(np.all(np.isfinite(a)))
    if not ok:
        raise ValueError(f"{what} has non-finite entries")


# -- one-sided Jacobi ---------------------------------------------------------


def jacobi_svd(M: np.ndarray, prec: int, max_sweeps: int = _MAX_SWEEPS):
    """Thin SVD ``M = U diag(s) V^T`` of a real object-array matrix.

    Must run inside ``working_precision(prec)``.  Returns ``(U, s, V)`` with
    ``s`` sorted in decreasing order; zero columns give ``s = 0`` and a zero
    column in ``U``.
    """
    m, k = M.shape
    transpose = m < k
    A = M.T.copy() if transpose else M.copy()
    m, k = A.shape
    cols = [A[:, j].copy() for j in range(k)]
    V = [np.array([gmpy2.mpfr(1) if i == j else gmpy2.mpfr(0) for i in range(k)], dtype=object)
         for j in range(k)]
    norms = [np.dot(c, c) for c in cols]
    tol = gmpy2.mpfr(2) ** (-prec) * max(k, 8)
    zero = gmpy2.mpfr(0)
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(k - 1):
            for q in range(p + 1, k):
                a = norms[p]
                b = norms[q]
                if a == zero or b == zero:
                    continue
                g = np.dot(cols[p], cols[q])
                if abs(g) <= tol * gmpy2.sqrt(a * b):
                    continue
                rotated = True
                zeta = (b - a) / (2 * g)
                t = (1 if zeta >= 0 else -1) / (abs(zeta) + gmpy2.sqrt(1 + zeta * zeta))
                c = 1 / gmpy2.sqrt(1 + t * t)
                s = c * t
                cp, cq = cols[p], cols[q]
                cols[p], cols[q] = c * cp - s * cq, s * cp + c * cq
                vp, vq = V[p], V[q]
                V[p], V[q] = c * vp - s * vq, s * vp + c * vq
                norms[p] = a - t * g
                norms[q] = b + t * g
        # Refresh squared norms to stop drift from the incremental updates.
        norms = [np.dot(c, c) for c in cols]
        if not rotated:
            break
    else:
        raise PrecisionError(f"Jacobi SVD did not converge in {max_sweeps} sweeps")
    sig = [gmpy2.sqrt(v) for v in norms]
    order = sorted(range(k), key=lambda j: sig[j], reverse=True)
    s = np.array([sig[j] for j in order], dtype=object)
    U = np.empty((m, k), dtype=object)
    Vm = np.empty((k, k), dtype=object)
    for out, j in enumerate(order):
        U[:, out] = cols[j] / sig[j] if sig[j] > 0 else cols[j] * 0
        Vm[:, out] = V[j]
    if transpose:
        return Vm, s, U
    return U, s, Vm


def _svd(M: np.ndarray, prec: int):
    if prec == DOUBLE:
        U, s, Vh = np.linalg.svd(M, full_matrices=False)
        return U, s, Vh.conj().T
    if _is_complex(M):
        raise TypeError("extended-precision SVD supports real matrices only; split complex systems first")
    return jacobi_svd(M, prec)


def singular_values(M, prec=DOUBLE) -> np.ndarray:
    prec = resolve_precision(prec)
    M = np.asarray(M) if prec == DOUBLE else np.asarray(M, dtype=object)
    if prec == DOUBLE:
        return np.linalg.svd(M, compute_uv=False)
    return _svd(M, prec)[1]


def condition_number(M, prec=DOUBLE, rtol: float = 0.0) -> float:
    """sigma_max / sigma_min, or ``inf`` when sigma_min <= rtol * sigma_max.

    With the default ``rtol = 0`` only an exactly zero singular value gives
    ``inf``: a rounded SVD of a singular matrix returns sigma_min near
    epsilon * sigma_max, which is indistinguishable from a saturated but
    nonsingular matrix, and saturated values are worth keeping.  Pass
    ``rtol=default_tol(M.shape)`` to treat numerical rank deficiency as singular.

    >>> condition_number(np.diag([10.0, 1.0]))
    10.0
    """
    s = singular_values(M, prec)
    if len(s) == 0:
        return 1.0
    smax, smin = s[0], s[-1]
    if smin == 0 or smin <= rtol * smax:
        return math.inf
    return _ratio(smax, smin)


def _ratio(a, b) -> float:
    if isinstance(a, float) or isinstance(a, np.floating):
        return float(a / b)
    # An mpfr ratio can exceed the double range; saturate instead of overflowing.
    q = a / b
    return float(q) if q < gmpy2.mpfr("1e300") else math.inf


def default_tol(shape, prec=DOUBLE) -> float:
    """Machine epsilon of ``prec`` times the larger matrix dimension."""
    prec = resolve_precision(prec)
    return float(gmpy2.mpfr(2) ** (1 - prec)) * max(shape) if prec != DOUBLE else np.finfo(float).eps * max(shape)


@dataclass
class _Factor:
    U: np.ndarray
    s: np.ndarray
    V: np.ndarray


def _factor(M, prec) -> _Factor:
    U, s, V = _svd(M, prec)
    return _Factor(U, s, V)


def _apply(fac: _Factor, rhs, cutoff, prec):
    keep = [i for i, v in enumerate(fac.s) if v > cutoff]
    bk = backend_for(prec)
    if prec == DOUBLE:
        if not keep:
            return np.zeros(fac.V.shape[0], dtype=np.result_type(fac.V, rhs)), 0
        Uk = fac.U[:, keep]
        coef = (Uk.conj().T @ rhs) / fac.s[keep]
        return fac.V[:, keep] @ coef, len(keep)
    out = bk.zeros(fac.V.shape[0], complex=_is_complex(np.asarray(rhs, dtype=object)))
    for i in keep:
        coef = np.dot(fac.U[:, i], rhs) / fac.s[i]
        out = out + coef * fac.V[:, i]
    return out, len(keep)


def svd_solve(M, rhs, tol: Optional[float] = None, prec=DOUBLE) -> LsqReport:
    """Minimal-norm least-squares solution restricted to singular values above ``tol * sigma_max``.

    Parameters
    ----------
    M : (m, k) array
        float/complex for ``prec=53``; MPFR object array otherwise (then the
        call must sit inside ``working_precision(prec)``).
    rhs : (m,) array
    tol : float, optional
        Relative truncation threshold in [0, 1).  Defaults to
        :func:`default_tol`.
    prec : precision spec

    Returns
    -------
    LsqReport

    Examples
    --------
    >>> rep = svd_solve(np.diag([1.0, 1e-20]), np.array([1.0, 1.0]), tol=1e-10)
    >>> rep.solution.tolist(), rep.effective_rank
    ([1.0, 0.0], 1)
    """
    return block_svd_solve([M], [rhs], tol=tol, prec=prec)[0]


def block_svd_solve(blocks: Sequence, rhss: Sequence, tol: Optional[float] = None, prec=DOUBLE):
    """Solve a block-diagonal least-squares problem one block at a time.

    Truncation is relative to the largest singular value over *all* blocks,
    so the result equals :func:`svd_solve` on the assembled matrix.  Returns
    ``(report, [solution per block])`` where ``report.solution`` is the
    concatenation.
    """
    prec = resolve_precision(prec)
    if len(blocks) != len(rhss):
        raise ValueError("need one right-hand side per block")
    mats, vecs = [], []
    for M, b in zip(blocks, rhss):
        M = np.asarray(M) if prec == DOUBLE else np.asarray(M, dtype=object)
        b = np.asarray(b) if prec == DOUBLE else np.asarray(b, dtype=object)
        if M.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        if b.ndim != 1 or b.shape[0] != M.shape[0]:
            raise ValueError(f"dimension mismatch: matrix {M.shape}, rhs {b.shape}")
        _check_finite(M, "matrix")
        _check_finite(b, "right-hand side")
        mats.append(M)
        vecs.append(b)
    rows = sum(M.shape[0] for M in mats)
    ncols = sum(M.shape[1] for M in mats)
    if tol is None:
        tol = default_tol((rows, ncols), prec)
    if not 0 <= tol < 1:
        raise ValueError("tol must lie in [0, 1)")
    facs = [_factor(M, prec) for M in mats]
    all_s = [v for f in facs for v in f.s]
    if not all_s:
        raise ValueError("empty system")
    smax = max(all_s)
    cutoff = smax * (tol if prec == DOUBLE else gmpy2.mpfr(tol))
    if smax == 0:
        cutoff = 0
    parts, rank = [], 0
    for f, b in zip(facs, vecs):
        x, r = _apply(f, b, cutoff, prec)
        parts.append(x)
        rank += r
    kept = [v for v in all_s if v > cutoff]
    smin = min(all_s)
    full = math.inf if smin == 0 else _ratio(smax, smin)
    trunc = _ratio(smax, min(kept)) if kept else math.inf
    # Thin SVD of a wide block yields fewer values than columns; pad with zeros.
    svals = np.array(sorted((float(v) for v in all_s), reverse=True) + [0.0] * max(0, ncols - len(all_s)))
    if len(all_s) < ncols:
        full = math.inf
    solution = np.concatenate(parts) if len(parts) > 1 else parts[0]
    report = LsqReport(
        solution=solution,
        sigma_max=float(smax),
        sigma_min=float(smin) if len(all_s) == ncols else 0.0,
        condition_number=full,
        condition_truncated=trunc,
        effective_rank=rank,
        truncation_tol=float(tol),
        singular_values=svals,
        precision=prec,
    )
    return report, parts
