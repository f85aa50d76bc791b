import math

import numpy as np
import pytest
from scipy import special

from fourext.continuous import evaluate_extension, solve_continuous
from fourext.numkit import DOUBLE, EXTENDED, make_function, working_precision
from fourext.orthopoly import (
    eval_poly,
    expansion_coeffs,
    poly_sup_norm,
    reconstruct,
    stieltjes_recurrence,
)
from fourext.theory import c_of_T, conv_rate_E


@pytest.fixture(scope="module")
def rec_w1():
    return stieltjes_recurrence("w1", 2, 45)


def _x_rule(N=200):
    # independent rule for the x-measure on [-1, 1]; y = cos(pi x / T) pulls w1 back to dx, w2 to sin^2 dx
    return special.roots_legendre(N)


@pytest.mark.parametrize("weight", ["w1", "w2"])
def test_orthonormal_double(weight):
    T = 2
    rec = stieltjes_recurrence(weight, T, 8, DOUBLE)
    x, w = _x_rule()
    y = np.cos(np.pi * x / T)
    if weight == "w2":
        w = w * np.sin(np.pi * x / T) ** 2
    P = np.array([eval_poly(rec, k, y) for k in range(9)])
    G = (P * w) @ P.T
    assert np.max(np.abs(G - np.eye(9))) < 1e-10


def test_normalisation_constant():
    rec = stieltjes_recurrence("w1", 3, 4, DOUBLE)
    assert rec.beta[0] == pytest.approx(2.0, rel=1e-14)  # mass of w1
    assert eval_poly(rec, 0, 0.3) == pytest.approx(1 / math.sqrt(2))


def test_beta_positive_and_limits():
    T = 2
    rec = stieltjes_recurrence("w1", T, 100)
    beta = [float(b) for b in rec.beta]
    assert min(beta) > 0
    # an interval of length 1 - c has limiting recurrence alpha -> (1 + c) / 2, beta -> ((1 - c) / 4)^2
    c = c_of_T(T)
    assert beta[-1] == pytest.approx(((1 - c) / 4) ** 2, rel=1e-3)
    assert float(rec.alpha[-1]) == pytest.approx((1 + c) / 2, abs=1e-3)


@pytest.mark.parametrize("k", [1, 4, 9])
def test_sign_changes(rec_w1, k):
    c = c_of_T(2)
    y = np.linspace(c, 1, 3001)[1:-1]
    with working_precision(EXTENDED):
        v = np.array([float(t) for t in eval_poly(rec_w1, k, y)])
    assert np.count_nonzero(np.diff(np.sign(v)) != 0) == k


def test_sup_norm_growth(rec_w1):
    ks = list(range(10, 41, 5))
    sups = [poly_sup_norm(rec_w1, k) for k in ks]
    slope = np.polyfit(ks, [math.log(s) for s, _ in sups], 1)[0]
    assert slope == pytest.approx(math.log(conv_rate_E(2)), rel=0.1)
    assert all(where == -1.0 for _, where in sups)
    assert poly_sup_norm(rec_w1, 0)[0] == pytest.approx(1 / math.sqrt(2))


def test_recurrence_errors():
    with pytest.raises(ValueError):
        stieltjes_recurrence("w3", 2, 4)
    with pytest.raises(ValueError):
        stieltjes_recurrence("w1", 1, 4)
    with pytest.raises(ValueError):
        eval_poly(stieltjes_recurrence("w1", 2, 3, DOUBLE), 5, 0.0)


# -- expansion and reconstruction ------------------------------------------------------------------


def test_parity_of_coefficients():
    even = expansion_coeffs(make_function("cos16x"), 10, 2, DOUBLE)
    assert np.max(np.abs(even.b)) <= 1e-12
    odd = expansion_coeffs(make_function("sinw", omega=3), 10, 2, DOUBLE)
    assert np.max(np.abs(odd.a)) <= 1e-12


def test_representable_exponential_has_finite_expansion():
    # omega T = 20 is an integer, so e^{i pi 10 x} lies in the degree-20 space
    ext = expansion_coeffs(make_function("expiw", omega=10), 26, 2)
    a = np.array([abs(complex(v)) for v in ext.a])
    assert a[:15].max() > 0.1
    assert a[21:].max() < 1e-90


def test_coefficient_knee():
    ext = expansion_coeffs(make_function("expiw", omega="10.3"), 30, 2)
    a = np.array([abs(complex(v)) for v in ext.a])
    assert a[:15].max() > 0.1  # O(1) below omega r(T) / 2 ~ 14.6
    assert a[24] < 1e-3 and a[30] < 1e-8


def test_reconstruct_trivial_cases():
    rec1 = stieltjes_recurrence("w1", 2, 3, DOUBLE)
    x = np.linspace(-1, 1, 5)
    assert np.all(reconstruct(np.zeros(4), [], 2, x, rec1) == 0)
    assert np.allclose(reconstruct(np.array([math.sqrt(2)]), [], 2, x, rec1), 1.0)
    with pytest.raises(ValueError):
        reconstruct(np.zeros(2), np.ones(1), 2, x, rec1)


@pytest.mark.parametrize("name, n, T", [("expx", 12, 2), ("cos16x", 9, 4)])
def test_matches_gram_solve(name, n, T):
    f = make_function(name)
    ortho = expansion_coeffs(f, n, T)
    gram = solve_continuous(f, n, T, "auto")
    x = np.linspace(-1, 1, 101)
    with working_precision(gram.precision) as bk:
        xs = bk.array(x)
        g1 = evaluate_extension(gram, xs)
    g2 = ortho(xs)
    with working_precision(gram.precision):
        diff = max(abs(u - v) for u, v in zip(g1, g2))
        size = max(abs(u) for u in g1)
    assert float(diff / size) <= 1e-20


def test_partial_errors_match_truncation():
    f = make_function("expx")
    ext = expansion_coeffs(f, 8, 2)
    errs = ext.partial_errors(points=201)
    x = np.linspace(-1, 1, 201)
    for m in (0, 3, 8):
        with working_precision(ext.precision) as bk:
            g = ext(bk.array(x), m=m)
            e = max(abs(u - v) for u, v in zip(f(bk.array(x), ext.precision), g))
        assert errs[m] == pytest.approx(float(e), rel=1e-10)
    assert np.all(np.diff(errs) < 0)


def test_dof():
    assert expansion_coeffs(make_function("expx"), 4, 2, DOUBLE).dof == 9
