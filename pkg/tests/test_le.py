import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from bdloss.errors import DimensionMismatch, InvariantViolation
from bdloss.graph import FeatureMap, feature_map_apply, feature_map_fit, similarity_graph
from bdloss.le import (
    LeHyper,
    LeModel,
    _CachedTerms,
    binarize,
    le_gradient,
    le_objective,
    load_le_model,
    recover,
    save_le_model,
    train_bd_le,
    train_ud_le,
)
from bdloss.optimize import LbfgsConfig


def instance(rng, n=20, p=9, c=4, k=3):
    X = rng.standard_normal((n, p))
    Phi = np.vstack([X.T, np.ones((1, n))])
    L = (rng.random((c, n)) < 0.4).astype(float)
    L[rng.integers(0, c, size=n), np.arange(n)] = 1.0
    G = similarity_graph(X, k, 1.0).g
    W = rng.standard_normal((c, p + 1))
    return W, Phi, L, G


def naive_objective(W, Phi, L, G, alpha, lam):
    n = Phi.shape[1]
    fit = sum(np.sum((W @ Phi[:, i] - L[:, i]) ** 2) for i in range(n))
    rec = sum(np.sum((Phi[:, i] - W.T @ L[:, i]) ** 2) for i in range(n))
    Gd = G.toarray()
    smooth = np.trace(W @ Phi @ Gd @ Phi.T @ W.T)
    return fit + alpha * rec + lam * smooth


def central_diff(f, W, h=1e-6):
    out = np.zeros_like(W)
    for idx in np.ndindex(W.shape):
        E = np.zeros_like(W)
        E[idx] = h
        out[idx] = (f(W + E) - f(W - E)) / (2 * h)
    return out


class TestObjective:
    def test_zero_weights(self, rng):
        _, Phi, L, G = instance(rng)
        assert le_objective(np.zeros((4, 10)), Phi, L, G, 0, 0) == pytest.approx(np.sum(L**2))

    def test_exact_fit(self):
        I = np.eye(3)
        assert le_objective(I, I, I, np.zeros((3, 3)), 0.7, 1.0) == 0

    @pytest.mark.parametrize("alpha,lam", [(0, 0), (1e-3, 1e-3), (1, 1), (0.5, 0)])
    def test_matches_naive_loops(self, rng, alpha, lam):
        W, Phi, L, G = instance(rng)
        ref = naive_objective(W, Phi, L, G, alpha, lam)
        assert le_objective(W, Phi, L, G, alpha, lam) == pytest.approx(ref, rel=1e-10)

    def test_cached_terms_agree(self, rng):
        W, Phi, L, G = instance(rng)
        t = _CachedTerms(Phi, L, G, 0.3, 0.8)
        assert t.f(W.ravel()) == pytest.approx(le_objective(W, Phi, L, G, 0.3, 0.8), rel=1e-10)
        assert_allclose(t.grad(W.ravel()).reshape(W.shape), le_gradient(W, Phi, L, G, 0.3, 0.8), rtol=1e-10, atol=1e-10)

    def test_reconstruction_term_uses_tied_weights(self, rng):
        W, Phi, L, G = instance(rng)
        rec = le_objective(W, Phi, L, G, 1.0, 0) - le_objective(W, Phi, L, G, 0.0, 0)
        naive = sum(np.sum((Phi[:, i] - W.T @ L[:, i]) ** 2) for i in range(Phi.shape[1]))
        assert rec == pytest.approx(naive, rel=1e-10)

    def test_shape_check(self, rng):
        W, Phi, L, G = instance(rng)
        with pytest.raises(DimensionMismatch):
            le_objective(W[:, :-1], Phi, L, G, 0, 0)


class TestGradient:
    def test_at_zero(self, rng):
        _, Phi, L, G = instance(rng)
        assert_allclose(le_gradient(np.zeros((4, 10)), Phi, L, G, 0.4, 0), -2 * 1.4 * L @ Phi.T)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([0, 1e-3, 1]), st.sampled_from([0, 1e-3, 1]))
    def test_finite_differences(self, seed, alpha, lam):
        W, Phi, L, G = instance(np.random.default_rng(seed))
        num = central_diff(lambda V: le_objective(V, Phi, L, G, alpha, lam), W)
        ana = le_gradient(W, Phi, L, G, alpha, lam)
        assert np.linalg.norm(ana - num) / np.linalg.norm(num) < 1e-5


def small_data(rng, n=40, m=3, c=3):
    X = rng.standard_normal((n, m))
    L = np.zeros((n, c))
    L[np.arange(n), rng.integers(0, c, size=n)] = 1
    L[rng.random((n, c)) < 0.2] = 1
    return X, L


class TestTrain:
    def test_exact_fit_square_design(self, rng):
        n = 6
        X = rng.standard_normal((n, n - 1))
        X, L = X, binarize(rng.dirichlet(np.ones(3), size=n))
        m = train_bd_le(X, L, LeHyper(0, 0, k=2), "linear", LbfgsConfig(max_iters=2000, grad_tol=1e-12))
        Phi = feature_map_apply(m.feature_map, X)
        assert le_objective(m.w_hat, Phi, L.T, np.zeros((n, n)), 0, 0) < 1e-8
        assert_allclose(m.w_hat, L.T @ np.linalg.inv(Phi), atol=1e-4)

    def test_monotone_and_wolfe(self, rng):
        X, L = small_data(rng)
        m = train_bd_le(X, L, LeHyper(0.1, 0.1))
        tr = np.array(m.info["trace"])
        assert np.all(np.diff(tr) <= 0)
        assert all(s.satisfies(1e-4, 0.9) for s in m.info["steps"])
        assert m.info["converged"] or m.info["n_iter"] == 500 or m.info["line_search_failed"]

    def test_converged_gradient_small(self, rng):
        X, L = small_data(rng)
        m = train_bd_le(X, L, LeHyper(0.5, 0.5), "linear")
        assert m.info["converged"]
        Phi = feature_map_apply(m.feature_map, X)
        G = similarity_graph(X, 4, 1.0).g
        g = le_gradient(m.w_hat, Phi, L.T, G, 0.5, 0.5)
        assert np.linalg.norm(g) < 1e-4 * max(1, np.linalg.norm(L))

    def test_ud_is_bd_with_zero_alpha(self, rng):
        X, L = small_data(rng)
        a = train_ud_le(X, L, 0.01)
        b = train_bd_le(X, L, LeHyper(0.0, 0.01))
        assert np.array_equal(a.w_hat, b.w_hat)

    def test_ud_optimum_beats_bd_on_its_objective(self, rng):
        X, L = small_data(rng)
        ud = train_ud_le(X, L, 0.1, "linear")
        bd = train_bd_le(X, L, LeHyper(1.0, 0.1), "linear")
        Phi = feature_map_apply(ud.feature_map, X)
        G = similarity_graph(X, 4, 1.0).g
        f_ud = le_objective(ud.w_hat, Phi, L.T, G, 0, 0.1)
        assert f_ud <= le_objective(bd.w_hat, Phi, L.T, G, 0, 0.1) + 1e-8
        g = le_gradient(ud.w_hat, Phi, L.T, G, 0, 0.1)
        assert np.linalg.norm(g) < 1e-4 * max(1, np.linalg.norm(L))

    def test_rejects_bad_labels(self, rng):
        X, L = small_data(rng)
        L[2] = 0
        with pytest.raises(InvariantViolation):
            train_bd_le(X, L)

    def test_default_k(self, rng):
        X, L = small_data(rng)
        assert train_bd_le(X, L).hyper.k == 4


class TestRecover:
    def test_zero_weights_uniform(self, rng):
        fm = feature_map_fit(rng.standard_normal((5, 2)), "linear")
        m = LeModel(np.zeros((3, 3)), fm)
        assert_allclose(recover(m, rng.standard_normal((4, 2))), 1 / 3)

    def test_renormalize(self):
        fm = FeatureMap("linear", 1.0, None, 1)
        m = LeModel(np.array([[0.0, 2.0], [0.0, 1.0], [0.0, 1.0]]), fm)
        assert_allclose(recover(m, [[7.0]]), [[0.5, 0.25, 0.25]])

    def test_valid_rows(self, rng):
        X, L = small_data(rng)
        Dh = recover(train_bd_le(X, L), rng.standard_normal((30, 3)))
        assert_allclose(Dh.sum(1), 1, atol=1e-9)
        assert np.all(Dh >= 0)


class TestBinarize:
    def test_uniform(self):
        assert_allclose(binarize(np.full((1, 4), 0.25)), [[1, 1, 1, 1]])

    def test_threshold(self):
        assert_allclose(binarize([[0.7, 0.2, 0.1]]), [[1, 0, 0]])
        assert_allclose(binarize([[0.34, 0.33, 0.33]]), [[1, 0, 0]])

    def test_rows_have_a_positive(self, rng):
        L = binarize(rng.dirichlet(np.ones(6) * 0.1, size=200))
        assert np.all(L.sum(1) >= 1)


@pytest.mark.parametrize("kind", ["linear", "egk"])
def test_model_file_round_trip(tmp_path, rng, kind):
    X, L = small_data(rng)
    m = train_bd_le(X, L, map_kind=kind)
    path = tmp_path / "le.txt"
    save_le_model(m, path)
    head = path.read_text().splitlines()[0].split()
    assert head[:4] == ["LE-MODEL", "3", str(m.feature_map.output_dim), kind]
    back = load_le_model(path, input_dim=3)
    assert np.array_equal(recover(back, X), recover(m, X))
