import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from bdloss import metrics as M
from bdloss.errors import DimensionMismatch, EmptyInput, NonFinite

TOL = 1e-9


def simplex(draw_floats):
    v = np.asarray(draw_floats, dtype=float) + 1e-3
    return v / v.sum()


vectors = st.integers(2, 10).flatmap(
    lambda c: st.tuples(*[st.lists(st.floats(0, 1), min_size=c, max_size=c).map(simplex) for _ in range(3)])
)


@pytest.mark.parametrize("d", [[0.25, 0.25, 0.5], [1.0, 0.0], [0.1, 0.2, 0.3, 0.4]])
def test_identity_case(d):
    d = np.array(d)
    assert M.chebyshev(d, d) == 0
    assert M.clark(d, d) == 0
    assert M.canberra(d, d) == 0
    assert M.kl(d, d) == pytest.approx(0, abs=TOL)
    assert M.cosine(d, d) == pytest.approx(1, abs=TOL)
    assert M.intersection(d, d) == pytest.approx(1, abs=TOL)


def test_hand_values():
    d, dh = np.array([0.6, 0.4]), np.array([0.4, 0.6])
    assert M.chebyshev(d, dh) == pytest.approx(0.2, abs=TOL)
    assert M.canberra(d, dh) == pytest.approx(0.4, abs=TOL)
    assert M.intersection(d, dh) == pytest.approx(0.8, abs=TOL)
    assert M.clark(d, dh) == pytest.approx(math.sqrt(0.08), abs=TOL)
    # 0.48 / sqrt(0.52 * 0.52)
    assert M.cosine(d, dh) == pytest.approx(0.48 / 0.52, abs=TOL)
    assert M.kl(d, dh) == pytest.approx(0.6 * math.log(1.5) + 0.4 * math.log(0.4 / 0.6), abs=TOL)


def test_zero_entries_are_floored():
    d, dh = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    assert M.clark(d, dh) == pytest.approx(math.sqrt(2), abs=TOL)
    assert M.canberra(d, dh) == pytest.approx(2, abs=TOL)
    assert M.kl(d, dh) == pytest.approx(math.log(1e12), rel=1e-12)
    assert M.clark(np.zeros(2), np.zeros(2)) == 0


def test_rowwise():
    D = np.array([[0.6, 0.4], [0.5, 0.5]])
    Dh = np.array([[0.4, 0.6], [0.5, 0.5]])
    assert_allclose(M.chebyshev(D, Dh), [0.2, 0.0], atol=TOL)


class TestEvaluateAll:
    def test_identical(self, rng):
        D = rng.dirichlet(np.ones(4), size=5)
        res = M.evaluate_all(D, D)
        assert list(res) == list(M.METRICS)
        assert_allclose(list(res.values()), [0, 0, 0, 0, 1, 1], atol=TOL)

    def test_single_row(self):
        d, dh = np.array([0.6, 0.4]), np.array([0.4, 0.6])
        res = M.evaluate_all(d[None], dh[None])
        for name in M.METRICS:
            assert res[name] == pytest.approx(float(M.FUNCS[name](d, dh)), abs=TOL)

    def test_two_rows(self):
        D = np.array([[0.6, 0.4], [0.5, 0.5]])
        Dh = np.array([[0.4, 0.6], [0.5, 0.5]])
        res = M.evaluate_all(D, Dh)
        assert res["chebyshev"] == pytest.approx(0.1, abs=TOL)
        assert res["canberra"] == pytest.approx(0.2, abs=TOL)
        assert res["intersection"] == pytest.approx(0.9, abs=TOL)

    def test_empty(self):
        with pytest.raises(EmptyInput):
            M.evaluate_all(np.zeros((0, 3)), np.zeros((0, 3)))

    def test_errors(self):
        with pytest.raises(DimensionMismatch):
            M.chebyshev(np.ones(2) / 2, np.ones(3) / 3)
        with pytest.raises(NonFinite):
            M.kl(np.array([np.nan, 1.0]), np.array([0.5, 0.5]))


@settings(max_examples=200, deadline=None)
@given(vectors)
def test_bounds_symmetry_triangle(triple):
    a, b, c = triple
    n = len(a)
    for name in ("chebyshev", "clark", "canberra", "cosine", "intersection"):
        assert M.FUNCS[name](a, b) == pytest.approx(M.FUNCS[name](b, a), abs=1e-12)
    assert 0 <= M.chebyshev(a, b) <= 1
    assert 0 <= M.intersection(a, b) <= 1 + 1e-12
    assert 0 < M.cosine(a, b) <= 1 + 1e-12
    assert 0 <= M.clark(a, b) <= math.sqrt(n) + 1e-12
    assert 0 <= M.canberra(a, b) <= n + 1e-12
    assert M.kl(a, b) >= -1e-12
    assert M.chebyshev(a, c) <= M.chebyshev(a, b) + M.chebyshev(b, c) + 1e-15


def test_kl_asymmetric():
    a, b = np.array([0.9, 0.1]), np.array([0.5, 0.5])
    assert abs(M.kl(a, b) - M.kl(b, a)) > 1e-3


class TestRankTable:
    def test_single_method(self):
        ranks, avg = M.rank_table({"a": {"x": {"chebyshev": 0.3}, "y": {"chebyshev": 0.1}}})
        assert avg["chebyshev"]["a"] == 1.0

    def test_lower_better(self):
        ranks, _ = M.rank_table({"a": {"x": {"chebyshev": 0.1}}, "b": {"x": {"chebyshev": 0.2}}})
        assert ranks["chebyshev"]["x"] == {"a": 1, "b": 2}

    def test_higher_better_average(self):
        scores = {
            "a": {"d1": {"cosine": 0.9}, "d2": {"cosine": 0.9}, "d3": {"cosine": 0.8}},
            "b": {"d1": {"cosine": 0.8}, "d2": {"cosine": 0.8}, "d3": {"cosine": 0.9}},
        }
        _, avg = M.rank_table(scores)
        assert avg["cosine"] == {"a": 1.33, "b": 1.67}

    def test_ties_share_smaller_rank(self):
        scores = {m: {"x": {"kl": v}} for m, v in (("a", 0.5), ("b", 0.5), ("c", 0.1))}
        ranks, _ = M.rank_table(scores)
        assert ranks["kl"]["x"] == {"a": 2, "b": 2, "c": 1}


def test_random_pairs_bulk():
    # the 1000-pair property run, vectorized
    rng = np.random.default_rng(7)
    for c in (2, 4, 9):
        A = rng.dirichlet(np.ones(c), size=1000)
        B = rng.dirichlet(np.ones(c), size=1000)
        assert np.all(M.kl(A, B) >= -1e-12)
        assert np.all(M.clark(A, B) <= math.sqrt(c))
        assert np.all(M.canberra(A, B) <= c)
        assert_allclose(M.cosine(A, B), M.cosine(B, A), atol=1e-15)
