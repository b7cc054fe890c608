"""KNN similarity graphs and explicit feature maps for label enhancement."""
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist

from .errors import DegenerateWidth, DimensionMismatch, KTooLarge, ValidationError

MAX_WIDTH_PAIRS = 1000
WIDTH_SEED = 0


def _sq_dists(X, Y=None):
    # pairwise differences, not the Gram expansion: duplicates give exactly 0
    return cdist(X, X if Y is None else Y, "sqeuclidean")


def knn_neighbors(X, k):
    """Indices of the ``k`` nearest other rows of ``X`` for every row.

    Ties are broken by smaller index. Returns an ``(n, k)`` int array.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if k < 1 or k >= n:
        raise KTooLarge(f"need 1 <= k < n, got k={k}, n={n}")
    if not np.isfinite(X).all():
        raise ValidationError("features must be finite")
    d2 = _sq_dists(X)
    np.fill_diagonal(d2, np.inf)
    return np.argsort(d2, axis=1, kind="stable")[:, :k]


@dataclass(frozen=True)
class SimilarityGraph:
    a: sp.csr_matrix
    g: sp.csr_matrix
    k: int
    sigma: float

    @property
    def n(self):
        return self.a.shape[0]


def similarity_graph(X, k, sigma=1.0):
    """Heat-kernel weights on the directed KNN graph, plus ``G = Ahat - A``.

    ``Ahat`` is diagonal with the symmetrized degree ``sum_j (a_ij + a_ji) / 2``.
    For any ``c x n`` matrix ``D``, ``tr(D G D.T)`` equals one half of
    ``sum_ij a_ij ||d_i - d_j||^2``.
    """
    if sigma <= 0:
        raise ValidationError("sigma must be positive")
    X = np.asarray(X, dtype=float)
    nbrs = knn_neighbors(X, k)
    n = X.shape[0]
    rows = np.repeat(np.arange(n), k)
    cols = nbrs.ravel()
    d2 = np.sum((X[rows] - X[cols]) ** 2, axis=1)
    vals = np.exp(-d2 / (2.0 * sigma**2))
    a = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    deg = 0.5 * (np.asarray(a.sum(axis=1)).ravel() + np.asarray(a.sum(axis=0)).ravel())
    g = (sp.diags(deg) - a).tocsr()
    return SimilarityGraph(a=a, g=g, k=int(k), sigma=float(sigma))


@dataclass(frozen=True)
class FeatureMap:
    """``kind`` is ``"linear"`` (identity) or ``"egk"`` (empirical Gaussian
    kernel against the stored anchors)."""

    kind: str
    width: float = 1.0
    anchors: np.ndarray | None = None
    input_dim: int = 0

    @property
    def output_dim(self):
        return self.input_dim if self.kind == "linear" else self.anchors.shape[0]

    def apply(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.input_dim:
            raise DimensionMismatch(f"expected {self.input_dim} features, got {X.shape[1]}")
        if self.kind == "linear":
            return X.copy()
        return np.exp(-_sq_dists(X, self.anchors) / (2.0 * self.width**2))


MAP_KINDS = ("linear", "egk")


def _normalize_kind(kind):
    if kind in ("empirical-gaussian", "egk"):
        return "egk"
    if kind == "linear":
        return "linear"
    raise ValidationError(f"unknown feature map kind {kind!r}")


def mean_pair_distance(X, max_pairs=MAX_WIDTH_PAIRS, seed=WIDTH_SEED):
    n = X.shape[0]
    n_pairs = n * (n - 1) // 2
    if n_pairs == 0:
        return 0.0
    if n_pairs <= max_pairs:
        i, j = np.triu_indices(n, 1)
    else:
        rng = np.random.default_rng(seed)
        i = rng.integers(0, n, size=max_pairs)
        j = (i + rng.integers(1, n, size=max_pairs)) % n
    return float(np.mean(np.sqrt(np.sum((X[i] - X[j]) ** 2, axis=1))))


def feature_map_fit(X_train, kind="egk", width=None):
    X_train = np.atleast_2d(np.asarray(X_train, dtype=float))
    if X_train.shape[0] < 1:
        raise ValidationError("need at least one training row")
    kind = _normalize_kind(kind)
    m = X_train.shape[1]
    if kind == "linear":
        return FeatureMap("linear", 1.0, None, m)
    if width is None:
        width = mean_pair_distance(X_train)
        if width <= 0:
            warnings.warn("all training points coincide; kernel width set to 1", DegenerateWidth)
            width = 1.0
    elif width <= 0:
        raise ValidationError("kernel width must be positive")
    return FeatureMap("egk", float(width), X_train.copy(), m)


def feature_map_apply(fmap, X):
    """Design matrix ``Phi`` of shape ``(p + 1, n)``; the last row is all ones."""
    F = fmap.apply(X)
    return np.vstack([F.T, np.ones((1, F.shape[0]))])
