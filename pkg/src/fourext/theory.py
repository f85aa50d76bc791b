"""Closed-form quantities of Fourier-extension approximation theory.

All functions take an optional ``prec``.  With the default (native) they work
on Python floats.  Otherwise they return MPFR values and must be called inside
``working_precision(prec)``.  Arguments may be numbers or expression strings
such as ``"sqrt(2)"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .numkit.precision import DOUBLE, backend_for, parse_value, resolve_precision


def _prep(prec, *values):
    prec = resolve_precision(prec)
    bk = backend_for(prec)
    return (bk, prec) + tuple(parse_value(v, prec) for v in values)


def _require_T(T, strict=True):
    if (T <= 1) if strict else (T < 1):
        raise ValueError(f"T must be {'>' if strict else '>='} 1, got {float(T)}")


def c_of_T(T, prec=DOUBLE):
    """c(T) = cos(pi / T), the left end of the mapped interval [c(T), 1]."""
    bk, prec, T = _prep(prec, T)
    _require_T(T)
    return bk.cos(bk.pi / T)


def conv_rate_E(T, prec=DOUBLE):
    """Exponential convergence rate E(T) = cot^2(pi / 4T).

    >>> round(float(conv_rate_E(2)), 10)
    5.8284271247
    """
    bk, prec, T = _prep(prec, T)
    _require_T(T, strict=False)
    ct = bk.cot(bk.pi / (4 * T))
    return ct * ct


def resolution_r(T, prec=DOUBLE):
    """Resolution constant r(T) = 2 T sin(pi / 2T), increasing from 2 to pi."""
    bk, prec, T = _prep(prec, T)
    _require_T(T)
    return 2 * T * bk.sin(bk.pi / (2 * T))


def singularity_u(T, prec=DOUBLE):
    """Image u(T) = 1 - 2 cosec^2(pi / 2T) of y = -1 under the inverse affine map."""
    bk, prec, T = _prep(prec, T)
    _require_T(T)
    s = bk.sin(bk.pi / (2 * T))
    return 1 - 2 / (s * s)


def ellipse_crossing(rho, prec=DOUBLE):
    """Point where the Bernstein ellipse of parameter rho meets the negative real axis."""
    bk, prec, rho = _prep(prec, rho)
    if rho < 1:
        raise ValueError("rho must be >= 1")
    return -(rho + 1 / rho) / 2


def cheb_bound_B(omega, n, rho, prec=DOUBLE):
    """Chebyshev-coefficient bound 2 exp(pi omega (rho^2 - 1) / (2 rho)) / rho^n."""
    bk, prec, omega, n, rho = _prep(prec, omega, n, rho)
    if rho < 1:
        raise ValueError("rho must be >= 1")
    return 2 * bk.exp(bk.pi * omega * (rho * rho - 1) / (2 * rho)) / rho ** n


def cheb_rho_opt(omega, n, prec=DOUBLE):
    """Minimiser of :func:`cheb_bound_B` over rho; ``None`` unless n > pi omega."""
    bk, prec, omega, n = _prep(prec, omega, n)
    pw = bk.pi * omega
    if n <= pw:
        return None
    return (n + bk.sqrt(n * n - pw * pw)) / pw


def fe_bound_Btilde(omega, n, rho, T, prec=DOUBLE):
    """Fourier-extension coefficient bound rho^-n exp(omega T acosh(q)),
    with q = (rho + 1/rho)(1 - c)/4 + (1 + c)/2.

    Equals 1 at rho = 1 (q = 1 there).
    """
    bk, prec, omega, n, rho, T = _prep(prec, omega, n, rho, T)
    _require_T(T)
    if rho < 1:
        raise ValueError("rho must be >= 1")
    c = bk.cos(bk.pi / T)
    q = (rho + 1 / rho) * (1 - c) / 4 + (1 + c) / 2
    # Rounding can push q a hair below 1 at rho = 1.
    q = q if q > 1 else q * 0 + 1
    return bk.exp(omega * T * bk.acosh(q)) / rho ** n


def rho_star_branches(omega, n, T, prec=DOUBLE):
    """Both stationary points of B-tilde in rho as a (plus, minus) pair.

    Returns ``None`` when the discriminant is negative or the denominator
    vanishes (n = omega T).  The two roots are reciprocal; the one without
    cancellation is formed directly and the other as its reciprocal, with
    1 + c and 1 - c written as 2 cos^2 and 2 sin^2 of pi / 2T so that T near
    1 loses no digits.
    """
    bk, prec, omega, n, T = _prep(prec, omega, n, T)
    _require_T(T)
    half = bk.pi / (2 * T)
    cp = 2 * bk.cos(half) ** 2  # 1 + c
    cm = 2 * bk.sin(half) ** 2  # 1 - c
    wt2 = omega * omega * T * T
    n2 = n * n
    disc = cp * (2 * n2 - wt2 * cm)
    den = cm * (n2 - wt2)
    if disc < 0 and -disc <= 16 * bk.eps * cp * (2 * n2 + wt2 * cm):
        disc = disc * 0  # rounding at the double root n = omega r(T) / 2
    if disc < 0 or den == 0:
        return None
    base = n2 * (cp + 2) - wt2 * cm
    root = 2 * n * bk.sqrt(disc)
    if base >= 0:
        plus = -(base + root) / den
        return plus, 1 / plus
    minus = -(base - root) / den
    return 1 / minus, minus


def rho_star(omega, n, T, prec=DOUBLE) -> Optional[object]:
    """Minimiser rho* > 1 of B-tilde, present only for n in (omega r(T)/2, omega T).

    Outside that window the bound is minimised at rho = 1 (n too small) or
    keeps decreasing for all admissible rho (n >= omega T), and ``None`` is
    returned.
    """
    bk, prec, omega_v, n_v, T_v = _prep(prec, omega, n, T)
    _require_T(T_v)
    r = 2 * T_v * bk.sin(bk.pi / (2 * T_v))
    if not (omega_v * r / 2 < n_v < omega_v * T_v):
        return None
    br = rho_star_branches(omega, n, T, prec)
    if br is None:
        return None
    return br[0]


@dataclass(frozen=True)
class ResolutionThresholds:
    """Degrees-of-freedom thresholds for exp(i pi omega x) at extension parameter T.

    n1 : onset of convergence of the theoretical extension, omega r(T) / 2.
    n2 : point from which rho* reaches E(T), so the rate E(T) is attained.
    n3 : omega T, where rho* diverges.
    """

    n1: float
    n2: float
    n3: float


def thresholds(omega, T, prec=DOUBLE) -> ResolutionThresholds:
    bk, prec, omega, T = _prep(prec, omega, T)
    _require_T(T)
    r = 2 * T * bk.sin(bk.pi / (2 * T))
    cc = bk.cos(bk.pi / (2 * T))
    n1 = omega * r / 2
    n2 = omega * T / bk.sqrt(1 + cc * cc)
    n3 = omega * T
    return ResolutionThresholds(n1, n2, n3)


def schedule_varying_T(n, c=1, alpha=0.5, prec=DOUBLE):
    """T = 1 + c / n^alpha.

    >>> schedule_varying_T(100, 1, 1)
    1.01
    """
    bk, prec, n, c, alpha = _prep(prec, n, c, alpha)
    if n < 1 or c <= 0:
        raise ValueError("need n >= 1 and c > 0")
    return 1 + c / n ** alpha


def schedule_optimal_T(n, eps_tol, prec=DOUBLE):
    """The T solving E(T)^-n = eps_tol, i.e. (pi / 4) / arctan(eps_tol^(1 / 2n))."""
    bk, prec, n, eps = _prep(prec, n, eps_tol)
    if not 0 < eps < 1:
        raise ValueError("eps_tol must lie in (0, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    return (bk.pi / 4) / bk.atan(eps ** (1 / (2 * n)))


def knee_estimates(omega, T, prec=DOUBLE) -> dict:
    """Theoretical and observed-in-double degrees-of-freedom knee estimates."""
    th = thresholds(omega, T, prec)
    return {"dof_theoretical": 2 * th.n1, "dof_numerical": 2 * th.n3}


def as_float(v) -> float:
    return math.nan if v is None else float(v)
