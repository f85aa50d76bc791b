import math
from fractions import Fraction

import gmpy2
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special
from scipy.integrate import solve_ivp

from fourext.numkit import (
    DOUBLE,
    EXTENDED,
    PrecisionError,
    TestFunction,
    UnknownFunctionError,
    airy_ai,
    as_float,
    catalog_keys,
    composite_rule,
    eval_test_function,
    gauss_legendre,
    make_function,
    parse_value,
    precision_label,
    resolve_precision,
    round_nodes,
    working_precision,
)

# Ai values from an independent 40-digit oracle (mpmath.airyai), frozen.
AI_ORACLE = {
    0.0: 0.3550280538878172392600632,
    4.0: 0.0009515638512048018736215,
    3.0: 0.006591139357460719144257448,
    -10.0: 0.04024123848644319068943031,
    -68.0: -0.1359114805778110526385009,
    2.0: 0.03492413042327437913532208,
    -32.0: 0.2066697536442032286985623,
}
AI_FIRST_ZERO = -2.338107410459767


# -- precision ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "spec, bits",
    [(None, 53), ("double", 53), ("native", 53), (53, 53), ("extended", 332), ("extended:512", 512), (128, 128)],
)
def test_resolve_precision(spec, bits):
    assert resolve_precision(spec) == bits


@pytest.mark.parametrize("spec", ["quad", 32, "extended:20", "extended:abc"])
def test_resolve_precision_rejects(spec):
    with pytest.raises(ValueError):
        resolve_precision(spec)


def test_labels():
    assert precision_label(DOUBLE) == "double"
    assert precision_label(EXTENDED) == "extended:332"


def test_parse_value_expressions():
    assert parse_value("sqrt(2)") == pytest.approx(math.sqrt(2), rel=1e-16)
    assert parse_value("20*sqrt(2)") == pytest.approx(20 * math.sqrt(2))
    assert parse_value("4/3") == pytest.approx(4 / 3)
    assert parse_value(Fraction(1, 3)) == pytest.approx(1 / 3)
    assert as_float("pi/2") == pytest.approx(math.pi / 2)


def test_parse_value_extended_is_exact_to_working_precision():
    with working_precision(400):
        v = parse_value("sqrt(2)", 400)
        assert abs(v * v - 2) < gmpy2.mpfr(2) ** -395
        tenth = parse_value("0.1", 400)
        assert abs(tenth * 10 - 1) < gmpy2.mpfr(2) ** -395


@pytest.mark.parametrize("bad", ["__import__('os')", "x+1", "sqrt(1,2)", "abs(2)"])
def test_parse_value_rejects_code(bad):
    with pytest.raises(ValueError):
        parse_value(bad)


def test_working_precision_is_scoped():
    outer = gmpy2.get_context().precision
    with working_precision(500) as bk:
        assert gmpy2.get_context().precision == 500
        assert bk.is_extended
        assert abs(bk.sin(bk.pi)) < gmpy2.mpfr(2) ** -490
    assert gmpy2.get_context().precision == outer


@given(st.floats(min_value=-3, max_value=3, allow_nan=False))
def test_backends_agree(x):
    with working_precision(EXTENDED) as bk:
        xs = bk.array([x])
        for name in ("sin", "cos", "exp", "atan", "sinh", "cosh"):
            hi = float(getattr(bk, name)(xs)[0])
            lo = float(getattr(np, name if name != "atan" else "arctan")(x))
            assert hi == pytest.approx(lo, rel=4e-16, abs=1e-300)


# -- quadrature --------------------------------------------------------------------------


def test_round_nodes():
    assert round_nodes(1) == 32
    assert round_nodes(65) == 96
    assert round_nodes(64) == 64


@pytest.mark.parametrize("N", [5, 32, 160, 640])
def test_gauss_legendre_double_against_scipy(N):
    x, w = gauss_legendre(N)
    xs, ws = special.roots_legendre(N)
    assert np.max(np.abs(x - xs)) < 1e-14
    assert np.max(np.abs(w - ws)) < 1e-13
    with working_precision(200):
        xr, wr = gauss_legendre(N, 200)
        xr = np.array([float(v) for v in xr])
        wr = np.array([float(v) for v in wr])
    assert np.max(np.abs(x - xr)) < 4e-16
    assert np.max(np.abs(w - wr)) < 2.5e-16
    assert abs(np.sum(w) - 2) < 1e-13
    # exact for even monomials up to degree 2N - 2
    for k in (2, min(N - 1, 20)):
        assert np.dot(w, x ** (2 * k)) == pytest.approx(2 / (2 * k + 1), rel=1e-13)


@pytest.mark.parametrize("N", [96, 320])
def test_gauss_legendre_integrates_oscillatory(N):
    # integral_{-1}^{1} cos(a x) dx = 2 sin(a)/a; resolved once N exceeds a/2 comfortably.
    a = 40.0
    x, w = gauss_legendre(N)
    assert np.dot(w, np.cos(a * x)) == pytest.approx(2 * math.sin(a) / a, abs=1e-14)


def test_gauss_legendre_extended_exactness():
    with working_precision(EXTENDED):
        x, w = gauss_legendre(20, EXTENDED)
        # exact for degree 39: integral of x^38 = 2/39
        v = np.sum(w * x ** 38)
        assert abs(v - gmpy2.mpfr(2) / 39) < gmpy2.mpfr(10) ** -95


def test_gauss_legendre_read_only():
    x, w = gauss_legendre(32)
    with pytest.raises(ValueError):
        x[0] = 0.0


def test_composite_rule_breakpoint():
    x, w = composite_rule(-1.0, 1.0, 32, DOUBLE, [0.0])
    assert np.dot(w, np.abs(x) ** 3) == pytest.approx(0.5, abs=1e-15)


# -- Airy --------------------------------------------------------------------------------


@pytest.mark.parametrize("x, expected", sorted(AI_ORACLE.items()))
def test_airy_against_oracle(x, expected):
    assert airy_ai(x) == pytest.approx(expected, rel=1e-14)


def test_airy_first_zero():
    assert abs(airy_ai(AI_FIRST_ZERO)) <= 1e-12


def test_airy_monotone_decay_positive_axis():
    assert airy_ai(4.0) < airy_ai(3.0) < airy_ai(2.0)


def test_airy_against_scipy_over_f2_range():
    z = np.linspace(-68, 4, 145)
    ours = airy_ai(z)
    ref = special.airy(z)[0]
    assert np.max(np.abs(ours - ref)) < 1e-12


def test_airy_extended():
    with working_precision(EXTENDED):
        v = airy_ai(0, EXTENDED)
        # 3^(-2/3) / Gamma(2/3)
        ref = gmpy2.mpfr(3) ** (gmpy2.mpfr(-2) / 3) / gmpy2.gamma(gmpy2.mpfr(2) / 3)
        assert abs(v - ref) < gmpy2.mpfr(10) ** -95


def test_airy_budget_exhausted():
    with pytest.raises(PrecisionError):
        airy_ai(-200.0, max_prec=256)


# -- catalog -----------------------------------------------------------------------------


def test_catalog_contents():
    assert {"expiw", "cosw", "sinw", "expx", "cos16x", "f1", "f2", "absx3"} <= set(catalog_keys())


def test_unknown_function():
    with pytest.raises(UnknownFunctionError):
        make_function("gauss")


def test_parameter_checks():
    with pytest.raises(ValueError):
        make_function("expiw")
    with pytest.raises(ValueError):
        make_function("expx", omega=3)


def test_catalog_point_values():
    assert eval_test_function(make_function("expiw", omega=10), 0.0) == pytest.approx(1.0)
    assert eval_test_function(make_function("f1"), 0.0) == pytest.approx(1.0)
    assert eval_test_function(make_function("f2"), -8 / 9) == pytest.approx(AI_ORACLE[0.0], rel=1e-13)
    assert eval_test_function(make_function("absx3"), -0.5) == pytest.approx(0.125)


def test_test_function_is_hashable_and_printable():
    f = make_function("expiw", omega="20*sqrt(2)")
    assert hash(f) == hash(make_function("expiw", omega="20*sqrt(2)"))
    assert str(f) == "expiw(omega=20*sqrt(2))"
    assert isinstance(f, TestFunction)
    assert f.is_complex and not make_function("expx").is_complex


@given(st.floats(min_value=-1, max_value=1), st.floats(min_value=-50, max_value=50))
def test_expiw_unit_modulus(x, omega):
    v = eval_test_function(make_function("expiw", omega=omega), x)
    assert abs(v) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("name", ["expx", "cos16x", "f1", "f2", "absx3", "cosw", "sinw", "expiw"])
def test_double_and_extended_agree(name):
    f = make_function(name, omega=7) if name in ("cosw", "sinw", "expiw") else make_function(name)
    x = np.linspace(-1, 1, 41)
    lo = f(x, DOUBLE)
    with working_precision(EXTENDED) as bk:
        hi = f(bk.array(x), EXTENDED)
        hi = np.array([complex(v) for v in hi])
    scale = max(1.0, np.max(np.abs(hi)))
    assert np.max(np.abs(lo - hi)) <= 1e-14 * scale


def test_f2_against_ode_oracle():
    # Ai'' = z Ai integrated from z = 0 with the standard initial values, at 50 points.
    ai0 = 3 ** (-2 / 3) / special.gamma(2 / 3)
    dai0 = -(3 ** (-1 / 3)) / special.gamma(1 / 3)
    xs = np.linspace(-1, 1, 50)
    zs = -36 * xs - 32
    rhs = lambda z, y: [y[1], z * y[0]]
    ref = np.empty_like(zs)
    for sign in (-1, 1):
        mask = np.sign(zs) == sign
        order = np.argsort(sign * zs[mask])
        targets = zs[mask][order]
        sol = solve_ivp(rhs, (0.0, targets[-1]), [ai0, dai0], method="DOP853",
                        t_eval=targets, rtol=1e-13, atol=1e-15)
        out = np.empty(len(targets))
        out[order] = sol.y[0]
        ref[mask] = out
    ours = make_function("f2")(xs)
    assert np.max(np.abs(ours - ref)) <= 1e-10
