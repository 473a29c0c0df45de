import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from itertools import combinations

from mrfse import Configuration, build_counts, empirical_conditional
from mrfse.counting import joint_counts
from mrfse.errors import ArgumentError, UndefinedConditionalError

from conftest import make_sample
from oracles import naive_counts


def test_four_row_counts(four_rows):
    t = build_counts(four_rows, 0, [1])
    assert t.row_counts(Configuration((1,), (1,))).sum() == 3
    assert t.row_counts(Configuration((1,), (1,)))[1] == 2
    assert empirical_conditional(t, Configuration((1,), (1,)), 1) == pytest.approx(2 / 3, abs=1e-15)


def test_marginal_counts(four_rows):
    t = build_counts(four_rows, 0, [])
    assert len(t) == 1
    assert t.row_counts(Configuration()).tolist() == [2, 2]


def test_single_observation():
    t = build_counts(make_sample([[1, 0, 1]]), 2, [0, 1])
    assert len(t) == 1 and t.n == 1
    assert t.counts.tolist() == [[0, 1]]


def test_deterministic_column():
    s = make_sample([[1, 0], [1, 1], [1, 0]])
    t = build_counts(s, 0)
    assert empirical_conditional(t, Configuration(), 1) == 1.0


def test_errors(four_rows):
    with pytest.raises(ArgumentError):
        build_counts(four_rows, 1, [1])
    with pytest.raises(ArgumentError):
        build_counts(four_rows, 0, [3])
    t = build_counts(four_rows, 2, [0, 1])
    with pytest.raises(UndefinedConditionalError):
        empirical_conditional(t, Configuration((0, 1), (1, 0)), 0)


def test_rows_mapping(four_rows):
    t = build_counts(four_rows, 2, [0, 1])
    assert t.rows == {
        Configuration((0, 1), (0, 0)): (1, 0),
        Configuration((0, 1), (0, 1)): (1, 0),
        Configuration((0, 1), (1, 1)): (1, 1),
    }


def test_wide_keys_fall_back():
    # 200**9 overflows int64 keys, forcing the row-unique path
    rng = np.random.default_rng(3)
    rows = rng.integers(0, 200, size=(50, 10))
    rows[:, 0] = rows[:, 1] % 2
    s = make_sample(rows, k=200)
    W = tuple(range(1, 10))
    t = build_counts(s, 0, W)
    ref = naive_counts(rows.tolist(), 0, W, 200)
    got = {tuple(cfg): list(cnt) for cfg, cnt in zip(t.configs.tolist(), t.counts.tolist())}
    assert got == ref
    assert sorted(map(tuple, joint_counts(s, 0, W).tolist())) == sorted(
        (c, sum(v)) for v in ref.values() for c in v if c
    )


samples = st.integers(1, 6).flatmap(
    lambda p: st.integers(2, 3).flatmap(
        lambda k: st.lists(st.lists(st.integers(0, k - 1), min_size=p, max_size=p), min_size=1, max_size=60).map(
            lambda rows: (rows, k)
        )
    )
)


@settings(max_examples=60, deadline=None)
@given(samples)
def test_matches_naive_recount(arg):
    rows, k = arg
    s = make_sample(rows, k=k)
    p = s.p
    for v in range(p):
        others = [u for u in range(p) if u != v]
        for size in range(len(others) + 1):
            for W in combinations(others, size):
                t = build_counts(s, v, W)
                ref = naive_counts(rows, v, W, k)
                got = {tuple(cfg): list(cnt) for cfg, cnt in zip(t.configs.tolist(), t.counts.tolist())}
                assert got == ref
                assert t.n == len(rows)
                assert len(t) <= min(len(rows), k ** len(W))
                tot = t.row_totals
                cond = t.counts / tot[:, None]
                assert np.all(np.abs(cond.sum(axis=1) - 1) <= 1e-12)
