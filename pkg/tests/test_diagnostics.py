import math

import pytest

from mrfse import builtin_model, check_deviation_bound, deviation_bound
from mrfse.data import Configuration
from mrfse.diagnostics import bound_grid, deviation_statistic, write_bound_report
from mrfse.errors import ArgumentError

from conftest import make_sample


def test_bound_formula():
    assert deviation_bound(2, 2.0, 1000) == pytest.approx(2 * 2 * 2 * math.log(1000) ** 2 / 1000**2, rel=1e-15)
    assert deviation_bound(2, 2.0, 1000) == pytest.approx(3.817e-4, abs=5e-8)


def test_statistic_by_hand():
    s = make_sample([[0, 1], [1, 1], [1, 1], [0, 0]])
    a_W = Configuration((1,), (1,))
    # p_hat(.|x2=1) = (1/3, 2/3) vs (1/2, 1/2): N * max sq diff = 3 * (1/6)**2
    assert deviation_statistic(s, 0, (1,), a_W, [0.5, 0.5]) == pytest.approx(3 / 36, abs=1e-15)
    assert deviation_statistic(s, 0, (1,), Configuration((1,), (0,)), [0.5, 0.5]) == pytest.approx(0.25)
    s0 = make_sample([[0, 0], [1, 0]])
    assert deviation_statistic(s0, 0, (1,), a_W, [0.5, 0.5]) == 0.0


def test_vacuous_bound_is_satisfied():
    m = builtin_model("markov_chain_window(3)")
    res = check_deviation_bound(m, 1, [0], (0,), 1.0, 10, 20, seed=1)
    assert res.bound_value >= 1 and res.satisfied


def test_preconditions():
    m = builtin_model("markov_chain_window(3)")
    with pytest.raises(ArgumentError, match="probability zero"):
        check_deviation_bound(m, 2, [0, 1], (1, 1), 2.0, 1000, 10)
    with pytest.raises(ArgumentError, match="exp"):
        check_deviation_bound(m, 1, [0], (0,), 0.1, 1000, 10)
    with pytest.raises(ArgumentError):
        check_deviation_bound(m, 1, [0], (0,), 2.0, 1000, 0)


def test_deterministic_and_thread_independent():
    m = builtin_model("markov_chain_window(3)")
    a = check_deviation_bound(m, 1, [0, 2], (0, 0), 0.5, 200, 300, seed=5)
    b = check_deviation_bound(m, 1, [0, 2], (0, 0), 0.5, 200, 300, seed=5, threads=4)
    assert a == b


@pytest.mark.slow
@pytest.mark.parametrize("name,v,W,a_W", [
    ("markov_chain_window(3)", 1, (0, 2), (0, 0)),
    ("example3", 1, (0, 2), (1, 2)),
])
def test_bound_holds_on_grid(name, v, W, a_W):
    m = builtin_model(name)
    checks = bound_grid(m, v, W, a_W, [1.5, 2.0], [1000, 5000], 5000, seed=17, threads=4)
    for c in checks:
        assert c.empirical_freq <= c.bound_value, c
    by = {(c.delta, c.n): c for c in checks}
    for d in (1.5, 2.0):
        lo, hi = by[(d, 1000)], by[(d, 5000)]
        assert hi.empirical_freq <= lo.empirical_freq + 2 * max(lo.standard_error, 1 / lo.replications)


def test_small_delta_frequency_decreases_in_n():
    # delta small enough that exceedances are actually observed
    m = builtin_model("markov_chain_window(3)")
    lo = check_deviation_bound(m, 1, [0], (0,), 0.3, 100, 2000, seed=2)
    hi = check_deviation_bound(m, 1, [0], (0,), 0.3, 2000, 2000, seed=2)
    assert lo.exceedances > 0
    assert hi.empirical_freq <= lo.empirical_freq + 2 * lo.standard_error
    assert lo.satisfied and hi.satisfied


def test_report(tmp_path):
    m = builtin_model("markov_chain_window(3)")
    checks = bound_grid(m, 1, [0], (0,), [2.0], [100, 200], 10)
    write_bound_report(checks, tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "delta,n,replications,exceedances,empirical_freq,bound_value,satisfied"
    assert len(lines) == 3
