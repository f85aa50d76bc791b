import math

import gmpy2
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from fourext.numkit import EXTENDED, working_precision
from fourext.theory import (
    c_of_T,
    cheb_bound_B,
    cheb_rho_opt,
    conv_rate_E,
    ellipse_crossing,
    fe_bound_Btilde,
    knee_estimates,
    resolution_r,
    rho_star,
    rho_star_branches,
    schedule_optimal_T,
    schedule_varying_T,
    singularity_u,
    thresholds,
)

Ts = st.floats(min_value=1.01, max_value=50)


# -- closed forms -----------------------------------------------------------------------


def test_c_values():
    assert c_of_T(2) == pytest.approx(0.0, abs=1e-16)
    assert c_of_T(4) == pytest.approx(math.sqrt(2) / 2, rel=1e-15)
    assert -1 < c_of_T(1.0001) < -0.99


def test_E_values():
    assert conv_rate_E(1) == pytest.approx(1.0, rel=1e-15)
    assert conv_rate_E(2) == pytest.approx(3 + 2 * math.sqrt(2), rel=1e-14)
    assert conv_rate_E(4) == pytest.approx(25.27, abs=0.01)


def test_E_extended():
    with working_precision(EXTENDED):
        v = conv_rate_E(2, EXTENDED)
        assert abs(v - (3 + 2 * gmpy2.sqrt(gmpy2.mpfr(2)))) < gmpy2.mpfr(10) ** -95


def test_r_values_and_limits():
    assert resolution_r(2) == pytest.approx(2 * math.sqrt(2), rel=1e-15)
    assert resolution_r(1 + 1e-6) == pytest.approx(2, abs=1e-4)
    assert resolution_r(1e6) == pytest.approx(math.pi, abs=1e-4)


def test_u_values():
    assert singularity_u(2) == pytest.approx(-3.0, rel=1e-14)
    E = conv_rate_E(2)
    assert (E + 1 / E) / 2 == pytest.approx(-singularity_u(2), rel=1e-14)


def test_u_bounded_above_on_scan():
    # u is monotone decreasing on (1, oo); everything from T = 2 on lies at or below u(2) = -3.
    T = np.linspace(2, 100, 400)
    u = np.array([singularity_u(t) for t in T])
    assert np.all(u <= -3 + 1e-12)
    assert np.all(np.diff(u) < 0)


def test_domain_errors():
    for fn in (c_of_T, resolution_r, singularity_u):
        with pytest.raises(ValueError):
            fn(1)
    with pytest.raises(ValueError):
        conv_rate_E(0.5)
    with pytest.raises(ValueError):
        cheb_bound_B(10, 5, 0.5)


def test_ellipse_crossing():
    assert ellipse_crossing(1) == pytest.approx(-1.0)
    assert ellipse_crossing(2) == pytest.approx(-1.25)


# -- Chebyshev bound ------------------------------------------------------------------------


@given(st.floats(0.1, 100), st.integers(0, 400))
def test_B_at_one(omega, n):
    assert cheb_bound_B(omega, n, 1) == pytest.approx(2.0)


@pytest.mark.parametrize("omega, n", [(10, 20), (10, 40), (5, 3)])
def test_B_derivative_at_one(omega, n):
    with working_precision(200):
        hp = gmpy2.mpfr("1e-30")
        d = (cheb_bound_B(omega, n, 1 + hp, 200) - 2) / hp
    assert float(d) == pytest.approx(2 * math.pi * omega - 2 * n, rel=1e-6, abs=1e-6)


@pytest.mark.parametrize("omega, n", [(10, 40), (5, 30), (20, 100)])
def test_cheb_rho_opt_stationary(omega, n):
    rho = cheb_rho_opt(omega, n)
    assert rho == pytest.approx((n + math.sqrt(n * n - (math.pi * omega) ** 2)) / (math.pi * omega))
    h = 1e-6 * rho
    d = (math.log(cheb_bound_B(omega, n, rho + h)) - math.log(cheb_bound_B(omega, n, rho - h))) / (2 * h)
    assert abs(d) < 1e-6
    assert cheb_rho_opt(omega, int(math.pi * omega) - 1) is None


# -- Fourier-extension bound --------------------------------------------------------------


def test_Btilde_at_one():
    assert fe_bound_Btilde(10, 20, 1, 2) == pytest.approx(1.0)


@pytest.mark.parametrize("omega, n, T", [(10, 20, 2), (10, 5, 4), (30, 70, 1.5)])
def test_Btilde_derivative_at_one(omega, n, T):
    # One-sided difference at high precision; B-tilde has a square-root-free expansion in (rho - 1).
    with working_precision(300):
        h = gmpy2.mpfr("1e-40")
        d = (fe_bound_Btilde(omega, n, 1 + h, T, 300) - fe_bound_Btilde(omega, n, 1, T, 300)) / h
    assert float(d) == pytest.approx(0.5 * omega * resolution_r(T) - n, rel=1e-8, abs=1e-8)


def test_rho_star_window():
    omega, T = 10, 2
    th = thresholds(omega, T)
    assert rho_star(omega, th.n1 * 0.99, T) is None
    assert rho_star(omega, th.n3 * 1.01, T) is None
    assert rho_star(omega, (th.n1 + th.n3) / 2, T) > 1


def test_rho_star_example():
    plus, minus = rho_star_branches(10, 18, 2)
    assert plus > 1
    assert plus * minus == pytest.approx(1.0, abs=1e-12)
    assert rho_star(10, 18, 2) == plus
    # n = omega T is the pole of the stationary point: no root there
    assert rho_star_branches(10, 20, 2) is None


def test_rho_star_zero_discriminant():
    omega, T = 10, 2
    n1 = omega * resolution_r(T) / 2
    plus, minus = rho_star_branches(omega, n1, T)
    assert plus == pytest.approx(minus, abs=1e-6)


def test_rho_star_is_stationary_point():
    omega, n, T = 10, 18, 2
    rho = rho_star(omega, n, T)
    h = 1e-6
    f = lambda r: math.log(fe_bound_Btilde(omega, n, r, T))
    assert abs((f(rho + h) - f(rho - h)) / (2 * h)) < 1e-7


def test_rho_star_diverges_at_omega_T():
    omega, T = 10, 2
    vals = [rho_star(omega, omega * T * (1 - d), T) for d in (1e-1, 1e-2, 1e-3)]
    assert vals[0] < vals[1] < vals[2]
    assert vals[2] > 100


def test_rho_star_reaches_E_iff_n_above_n2():
    omega, T = 10, 2
    th = thresholds(omega, T)
    E = conv_rate_E(T)
    for n in np.linspace(th.n1 * 1.001, th.n3 * 0.999, 200):
        r = rho_star(omega, n, T)
        assert (r >= E) == (n >= th.n2) or abs(n - th.n2) < 1e-6


@given(st.floats(1, 100), Ts, st.floats(0.01, 0.99))
def test_branch_product_property(omega, T, frac):
    th = thresholds(omega, T)
    n = th.n1 + frac * (th.n3 - th.n1)
    br = rho_star_branches(omega, n, T)
    assume(br is not None)
    assert br[0] * br[1] == pytest.approx(1.0, rel=1e-8)


# -- thresholds -------------------------------------------------------------------------------


def test_thresholds_example():
    omega = 20 * math.sqrt(2)
    th = thresholds("20*sqrt(2)", 4)
    assert th.n1 == pytest.approx(0.5 * omega * resolution_r(4))
    assert th.n3 == pytest.approx(80 * math.sqrt(2))
    assert knee_estimates(10, 2)["dof_numerical"] == pytest.approx(40)


@given(st.floats(1, 100), st.floats(1.001, 32))
def test_threshold_ordering(omega, T):
    th = thresholds(omega, T)
    assert th.n1 < th.n2 < th.n3


def test_n1_over_omega_limit():
    assert thresholds(1, 1e6).n1 == pytest.approx(math.pi / 2, rel=1e-6)


# -- invariants ------------------------------------------------------------------------------


@given(Ts, st.floats(1e-3, 5))
def test_E_increasing(T, dT):
    assert conv_rate_E(T + dT) > conv_rate_E(T)


@given(Ts, st.floats(1e-3, 5))
def test_r_increasing_and_bounded(T, dT):
    a, b = resolution_r(T), resolution_r(T + dT)
    assert 2 < a < b < math.pi


@given(st.floats(1.01, 200))
def test_E_u_c_identity(T):
    E, c, u = conv_rate_E(T), c_of_T(T), singularity_u(T)
    lhs = (E + 1 / E) / 2
    assert lhs == pytest.approx((3 + c) / (1 - c), rel=1e-12)
    assert lhs == pytest.approx(-u, rel=1e-12)


@pytest.mark.parametrize("T", [1.1, "sqrt(2)", 2, 4, 8])
def test_identity_grid(T):
    E, c = conv_rate_E(T), c_of_T(T)
    assert (E + 1 / E) / 2 == pytest.approx((3 + c) / (1 - c), rel=1e-12)


def test_E_asymptotics():
    for d in (1e-3, 1e-4):
        assert (conv_rate_E(1 + d) - (1 + math.pi * d)) / d < 10 * d
    assert conv_rate_E(1e4) / 1e8 == pytest.approx(16 / math.pi ** 2, rel=1e-6)


# -- schedules -----------------------------------------------------------------------------------


def test_varying_T_examples():
    assert schedule_varying_T(100, 1, 1) == pytest.approx(1.01)
    for n in (1e3, 1e4):
        T = schedule_varying_T(n, 1, 0.5)
        assert resolution_r(T) - 2 == pytest.approx(2 / n ** 0.5, abs=5 / n)


def test_varying_T_decay():
    n, c, alpha = 1000, 1, 0.5
    T = schedule_varying_T(n, c, alpha)
    log_decay = -n * math.log(conv_rate_E(T))
    assert log_decay == pytest.approx(-c * math.pi * n ** (1 - alpha), rel=0.1)


@pytest.mark.parametrize("n, eps", [(50, 1e-13), (10, 1e-3), (400, 1e-30)])
def test_optimal_T_inversion(n, eps):
    T = schedule_optimal_T(n, eps)
    assert T > 1
    assert conv_rate_E(T) ** (-n) == pytest.approx(eps, rel=1e-12)


def test_optimal_T_asymptote():
    n, eps = 10 ** 4, 1e-13
    assert schedule_optimal_T(n, eps) == pytest.approx(1 - math.log(eps) / (math.pi * n), abs=1e-6)


def test_optimal_T_frozen_value():
    # Evaluated in 40-digit arithmetic by an independent oracle (mpmath).
    with working_precision(EXTENDED):
        T = schedule_optimal_T(100, "1e-13", EXTENDED)
    assert float(T) == pytest.approx(1.1048843277260720815, rel=1e-15)


def test_schedule_errors():
    with pytest.raises(ValueError):
        schedule_optimal_T(10, 2)
    with pytest.raises(ValueError):
        schedule_varying_T(0, 1, 1)
