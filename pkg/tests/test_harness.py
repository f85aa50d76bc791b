import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fourext.harness import (
    CSV_FIELDS,
    ExperimentRecord,
    KneeResult,
    TStrategy,
    condition_slopes,
    dof_for,
    emit_csv,
    emit_plotscript,
    find_knee,
    fit_log_slope,
    format_T,
    post_knee_slope,
    read_csv,
    run_coeffnorm,
    run_condition,
    run_convergence,
    run_omega_sweep,
    run_resolution,
    run_tstrategy,
    saturation_level,
    slope_to_rate,
    sweep_partial,
)
from fourext.numkit import as_float, make_function
from fourext.theory import conv_rate_E, resolution_r, schedule_optimal_T


def _rec(**kw):
    base = dict(scheme="discrete", function="expx", params="", T="2", n=4, dof=10, precision="double", linf=1e-3)
    base.update(kw)
    return ExperimentRecord(**base)


# -- knees ---------------------------------------------------------------------------------------


def test_knee_hysteresis():
    errs = [1.0, 0.05, 2.0, 0.05, 0.02, 0.01]
    assert find_knee(range(6), errs, 0.1) == 3  # the dip at index 1 is followed by a jump past 10 eps
    assert find_knee(range(6), errs, 1e-3) is None
    assert find_knee([], [], 0.1) is None
    # the last points only need the look-ahead that exists
    assert find_knee([0, 1], [1.0, 0.01], 0.1) == 1


@given(st.lists(st.floats(1e-12, 10), min_size=1, max_size=30), st.floats(1e-6, 1))
def test_knee_definition(errs, eps):
    i = find_knee(range(len(errs)), errs, eps)
    if i is None:
        return
    assert errs[i] < eps
    assert all(e < 10 * eps for e in errs[i + 1: i + 3])


def test_knee_result_constant():
    k = KneeResult(omega=10, epsilon=0.1, n_star=14, dof=29, resolved=True)
    assert k.constant == pytest.approx(2.9)
    assert KneeResult(10, 0.1, None, None, False).constant is None


def test_dof_conventions():
    assert [dof_for(s, 5) for s in ("continuous", "orthopoly", "discrete", "cheb")] == [11, 11, 12, 6]


# -- sweeps -------------------------------------------------------------------------------------------


def test_convergence_empty_and_monotone():
    f = make_function("expx")
    assert run_convergence(f, [2], []) == []
    recs = run_convergence(f, [2, 4], range(2, 12), scheme="orthopoly")
    assert len(recs) == 20
    for T in ("2", "4"):
        errs = [r.linf for r in recs if r.T == T]
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert [r.n for r in recs if r.T == T] == list(range(2, 12))


def test_convergence_rate_small():
    f = make_function("expx")
    recs = run_convergence(f, [2], range(6, 13), prec="auto")
    slope = fit_log_slope([r.n for r in recs], [r.linf for r in recs])
    assert slope_to_rate(slope) == pytest.approx(conv_rate_E(2), rel=0.1)
    assert all(r.precision.startswith("extended:") for r in recs)


def test_sweep_partial_matches_direct_solve():
    f = make_function("cos16x")
    part = sweep_partial("orthopoly", f, [4, 8], 2, "extended")
    direct = run_convergence(f, [2], [4, 8], prec="auto")
    for a, b in zip(part, direct):
        assert a.linf == pytest.approx(b.linf, rel=1e-10)
    with pytest.raises(ValueError):
        sweep_partial("discrete", f, [1], 2)
    assert sweep_partial("cheb", f, []) == []


def test_resolution_small():
    knees, recs = run_resolution([8], "sqrt(2)", prec="extended", eps_list=(0.1,))
    (k,) = knees
    assert k.resolved
    assert 0.95 * resolution_r(math.sqrt(2)) <= k.constant <= 1.3 * resolution_r(math.sqrt(2))
    assert all(r.scheme == "orthopoly" for r in recs)


def test_resolution_double_defaults_to_discrete():
    knees, recs = run_resolution([6], 2, prec="double", eps_list=(0.1,), n_range=lambda w: range(4, 18))
    assert recs[0].scheme == "discrete" and knees[0].scheme == "discrete"
    assert [r.n for r in recs] == list(range(4, 18))


def test_omega_sweep():
    recs = run_omega_sweep(10, [2], [1, 4, 40])
    assert [r.params for r in recs] == ["omega=1", "omega=4", "omega=40"]
    errs = [r.linf for r in recs]
    assert errs[0] < 1e-10 and errs[2] > 0.1


def test_condition_sweep_singleton_and_slopes():
    assert len(run_condition(2, [3])) == 2  # one record per scheme
    recs = run_condition(2, range(2, 12))
    s = condition_slopes(recs)
    logE = math.log(conv_rate_E(2))
    assert s["continuous"] == pytest.approx(2 * logE, rel=0.15)
    assert s["discrete"] == pytest.approx(logE, rel=0.15)
    assert saturation_level("double") == pytest.approx(1e-3 / 2.0 ** -52)


def test_coeffnorm_precisions():
    recs = run_coeffnorm(4, 2, [4, 8], precisions=("auto", "double"))
    labels = {r.precision for r in recs}
    assert "double" in labels and any(l.startswith("extended:") for l in labels)
    assert all(r.coeffnorm > 0 for r in recs)


def test_tstrategy_parse_and_values():
    assert TStrategy.parse("fixed:4/3").T_for(50) == "4/3"
    s = TStrategy.parse("power:1:1/2")
    assert str(s) == "power:1:1/2"
    assert as_float(s.T_for(100)) == pytest.approx(1.1)
    assert float(TStrategy.parse("optimal:1e-13").T_for(100)) == pytest.approx(schedule_optimal_T(100, 1e-13))
    for bad in ("fixed", "power:1", "opt:1", ""):
        with pytest.raises(ValueError):
            TStrategy.parse(bad)


def test_tstrategy_records():
    f = make_function("expx")
    recs = run_tstrategy(f, ["fixed:2", "power:1:1"], [4, 8])
    cheb = [r for r in recs if r.scheme == "cheb"]
    assert [r.n for r in cheb] == [9, 17]  # matches 2n + 2 discrete degrees of freedom
    power = [r for r in recs if r.params == "strategy=power:1:1"]
    assert [r.T for r in power] == [format_T(1.25), format_T(1.125)]
    assert {r.params for r in recs if r.scheme == "discrete"} == {"strategy=fixed:2", "strategy=power:1:1"}


def test_post_knee_slope():
    recs = [_rec(n=n, dof=2 * n + 2, linf=math.exp(-0.5 * (2 * n + 2))) for n in range(10)]
    assert post_knee_slope(recs, eps=1e-2, points=5) == pytest.approx(-0.5)
    assert post_knee_slope(recs, start_dof=4, points=3) == pytest.approx(-0.5)
    with pytest.raises(ValueError):
        post_knee_slope(recs, eps=1e-20)


def test_fit_window():
    with pytest.raises(ValueError):
        fit_log_slope([1, 2, 3], [1.0, 1e20, 1e20], hi=1e10)
    assert fit_log_slope([1, 2, 3, 4], [math.e, math.e ** 2, math.inf, None]) == pytest.approx(1.0)


# -- determinism and output -------------------------------------------------------------------------


def test_parallel_runs_are_byte_identical():
    f = make_function("cos16x")
    a = emit_csv(run_convergence(f, [2, 3], range(4, 10), prec="double", scheme="discrete", jobs=1))
    b = emit_csv(run_convergence(f, [3, 2], range(9, 3, -1), prec="double", scheme="discrete", jobs=4))
    assert a == b


def test_csv_header_and_round_trip(tmp_path):
    recs = [
        _rec(linf=1 / 3, l2=None, cond=math.inf, coeffnorm=2.5e300, ms=None),
        _rec(scheme="cheb", T="", n=7, dof=8, linf=np.float64(0.1)),
        _rec(params="strategy=power:1:1/2", T="1.1"),
    ]
    text = emit_csv(recs, tmp_path / "out.csv")
    assert text.splitlines()[0] == ",".join(CSV_FIELDS)
    back = read_csv(tmp_path / "out.csv")
    assert back == read_csv(text)
    assert back[0].linf == 1 / 3 and back[0].cond == math.inf and back[0].l2 is None
    assert back[1].T == "" and back[1].linf == 0.1
    assert emit_csv(back) == text


def test_read_csv_rejects_other_header():
    with pytest.raises(ValueError):
        read_csv("a,b\n1,2\n")


def test_plotscript_references_only_csv(tmp_path):
    recs = [
        _rec(n=1), _rec(n=2),
        _rec(scheme="cheb", T="", n=3),
        _rec(params="strategy=power:1:1", T="1.5"), _rec(params="strategy=power:1:1", T="1.25", n=8),
    ]
    text = emit_plotscript(recs, "data.csv", tmp_path / "p.gp", title="demo")
    assert (tmp_path / "p.gp").read_text() == text
    plot_lines = [l for l in text.splitlines() if '"data.csv"' in l]
    assert len(plot_lines) == 3  # varying-T strategy points form a single curve
    assert 'set datafile separator ","' in text
    quoted = {part for line in text.splitlines() for part in line.split('"')[1::2] if part.endswith((".csv", ".dat"))}
    assert quoted == {"data.csv"}


def test_record_sorting_key():
    a = _rec(T="sqrt(2)", n=3)
    b = _rec(T="2", n=1)
    assert sorted([b, a], key=ExperimentRecord.key) == [a, b]  # sqrt(2) < 2 numerically
    assert _rec(params="strategy=power:1:1").varying_T
    assert not _rec(params="strategy=fixed:2").varying_T


def test_plotscript_groups_precision_family():
    recs = [_rec(precision="extended:352", n=2), _rec(precision="extended:544", n=6), _rec(n=2)]
    text = emit_plotscript(recs, "c.csv")
    assert text.count('"c.csv"') == 2
    assert 'substr(strcol(7), 1, 8) eq "extended"' in text
