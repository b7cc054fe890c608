"""Bidirectional label enhancement (BD-LE).

Recovers label distributions from logical labels by minimizing

    T(W) = ||W Phi - L||^2 + alpha ||Phi - W^T L||^2 + lambda tr(W Phi G Phi^T W^T)

over ``W`` (c x (p+1)) with L-BFGS. Here ``Phi`` is the (p+1) x n design
matrix with a bias row, ``L`` the c x n logical labels and ``G`` the KNN
graph matrix. Setting ``alpha = 0`` gives the unidirectional ablation.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvariantViolation, ParseError, ValidationError
from .graph import FeatureMap, feature_map_apply, feature_map_fit, similarity_graph
from .optimize import LbfgsConfig, lbfgs_minimize
from .simplex import repair

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LeHyper:
    alpha: float = 1e-3
    lam: float = 1e-3
    k: int | None = None  # None -> c + 1
    sigma: float = 1.0
    width: float | None = None

    def __post_init__(self):
        if self.alpha < 0 or self.lam < 0:
            raise ValidationError("alpha and lambda must be nonnegative")


@dataclass(frozen=True)
class LeModel:
    w_hat: np.ndarray
    feature_map: FeatureMap
    hyper: LeHyper = field(default_factory=LeHyper)
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.w_hat.shape[1] != self.feature_map.output_dim + 1:
            raise DimensionMismatch("w_hat columns must equal feature_map.output_dim + 1")


def _check_shapes(W, Phi, L, G):
    c, q = W.shape
    if Phi.shape[0] != q or L.shape != (c, Phi.shape[1]) or G.shape != (Phi.shape[1],) * 2:
        raise DimensionMismatch(
            f"W {W.shape}, Phi {Phi.shape}, L {L.shape}, G {G.shape} do not conform"
        )


def le_objective(W, Phi, L, G, alpha, lam):
    W, Phi, L = (np.asarray(M, dtype=float) for M in (W, Phi, L))
    _check_shapes(W, Phi, L, G)
    Y = W @ Phi
    fit = np.sum((Y - L) ** 2)
    rec = np.sum((Phi - W.T @ L) ** 2)
    smooth = np.sum(Y * (G @ Y.T).T) if lam else 0.0
    return float(fit + alpha * rec + lam * smooth)


def le_gradient(W, Phi, L, G, alpha, lam):
    W, Phi, L = (np.asarray(M, dtype=float) for M in (W, Phi, L))
    _check_shapes(W, Phi, L, G)
    Y = W @ Phi
    grad = 2 * Y @ Phi.T - 2 * L @ Phi.T - 2 * alpha * L @ Phi.T + 2 * alpha * L @ L.T @ W
    if lam:
        grad = grad + lam * (G @ Y.T).T @ Phi.T + lam * (G.T @ Y.T).T @ Phi.T
    return grad


class _CachedTerms:
    """Objective and gradient of T from precomputed Gram products.

    The objective is evaluated as a quadratic form around the cached terms,
    which is exact up to round-off and costs O(c p^2) per call.
    """

    def __init__(self, Phi, L, G, alpha, lam):
        self.shape = (L.shape[0], Phi.shape[0])
        G = G.tocsr() if hasattr(G, "tocsr") else np.asarray(G)
        self.alpha, self.lam = alpha, lam
        PP = Phi @ Phi.T
        if lam:
            GPt = G @ Phi.T
            S = Phi @ (GPt + (G.T @ Phi.T))
            PP = PP + 0.5 * lam * S  # W PP W^T now holds fit and smoothness curvature
        self.H = 0.5 * (PP + PP.T)
        self.LPt = (1.0 + alpha) * L @ Phi.T
        self.LL = L @ L.T
        self.const = float(np.sum(L**2) + alpha * np.sum(Phi**2))

    def f(self, w):
        W = w.reshape(self.shape)
        quad = np.sum(W * (W @ self.H)) + self.alpha * np.sum(W * (self.LL @ W))
        return float(quad - 2.0 * np.sum(W * self.LPt) + self.const)

    def grad(self, w):
        W = w.reshape(self.shape)
        return (2.0 * (W @ self.H) + 2.0 * self.alpha * (self.LL @ W) - 2.0 * self.LPt).ravel()


def check_logical(L):
    L = np.asarray(L, dtype=float)
    if L.ndim != 2:
        raise DimensionMismatch("logical labels must be a matrix")
    bad = ~np.isin(L, (0.0, 1.0)).all(axis=1) | (L.sum(axis=1) < 1)
    if bad.any():
        raise InvariantViolation("logical labels must be 0/1 with at least one 1", row=int(np.flatnonzero(bad)[0]) + 1)
    return L


def train_bd_le(X, L, hyper=None, map_kind="egk", cfg=None):
    """Fit BD-LE on features ``X`` (n x m) and logical labels ``L`` (n x c)."""
    hyper = hyper or LeHyper()
    X = np.asarray(X, dtype=float)
    L = check_logical(L)
    if X.shape[0] != L.shape[0]:
        raise DimensionMismatch(f"X has {X.shape[0]} rows, L has {L.shape[0]}")
    n, c = L.shape
    k = hyper.k if hyper.k is not None else c + 1
    fmap = feature_map_fit(X, map_kind, hyper.width)
    Phi = feature_map_apply(fmap, X)
    graph = similarity_graph(X, k, hyper.sigma)
    terms = _CachedTerms(Phi, L.T, graph.g, hyper.alpha, hyper.lam)
    w0 = np.zeros(terms.shape[0] * terms.shape[1])
    res = lbfgs_minimize(terms.f, terms.grad, w0, cfg or LbfgsConfig(),
                         grad_ref=np.linalg.norm(L))
    if res.line_search_failed:
        log.warning("BD-LE line search stopped early after %d iterations: %s", res.n_iter, res.message)
    info = {
        "n_iter": res.n_iter,
        "converged": res.converged,
        "line_search_failed": res.line_search_failed,
        "objective": res.fun,
        "grad_norm": res.grad_norm,
        "trace": res.trace,
        "steps": res.steps,
        "k": k,
    }
    return LeModel(res.x.reshape(terms.shape), fmap, LeHyper(hyper.alpha, hyper.lam, k, hyper.sigma, fmap.width), info)


def train_ud_le(X, L, lam=1e-3, map_kind="egk", k=None, sigma=1.0, cfg=None):
    """Unidirectional ablation: BD-LE with the reconstruction weight set to 0."""
    return train_bd_le(X, L, LeHyper(0.0, lam, k, sigma), map_kind, cfg)


def recover(model, X):
    Phi = feature_map_apply(model.feature_map, X)
    return repair((model.w_hat @ Phi).T)


def binarize(D, rule="mean"):
    """Logical labels from distributions: ``l_j = 1`` iff ``d_j >= 1/c``.

    A row left without positives gets its argmax (lowest index on ties).
    """
    if rule != "mean":
        raise ValidationError(f"unknown threshold rule {rule!r}")
    D = np.atleast_2d(np.asarray(D, dtype=float))
    L = (D >= 1.0 / D.shape[1]).astype(float)
    empty = L.sum(axis=1) == 0
    if empty.any():
        L[np.flatnonzero(empty), np.argmax(D[empty], axis=1)] = 1.0
    return L


def save_le_model(model, path):
    fm = model.feature_map
    c, q = model.w_hat.shape
    tag = "egk" if fm.kind == "egk" else "linear"
    lines = [f"LE-MODEL {c} {q - 1} {tag} {fm.width:.17e}"]
    lines += [" ".join(f"{v:.17e}" for v in row) for row in model.w_hat]
    if fm.kind == "egk":
        lines += [" ".join(f"{v:.17e}" for v in row) for row in fm.anchors]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_le_model(path, input_dim=None):
    with open(path, encoding="utf-8") as fh:
        lines = [ln.split() for ln in fh if ln.strip()]
    head = lines[0] if lines else []
    if len(head) != 5 or head[0] != "LE-MODEL" or head[3] not in ("linear", "egk"):
        raise ParseError("bad LE-MODEL header", line=1)
    try:
        c, p = int(head[1]), int(head[2])
        width = float(head[4])
        W = np.array([[float(t) for t in ln] for ln in lines[1 : 1 + c]])
        anchors = None
        if head[3] == "egk":
            anchors = np.array([[float(t) for t in ln] for ln in lines[1 + c : 1 + c + p]])
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    if W.shape != (c, p + 1):
        raise ParseError(f"expected {c}x{p + 1} weights, got {W.shape}")
    if head[3] == "egk":
        if anchors.shape[0] != p:
            raise ParseError(f"expected {p} anchor rows, got {anchors.shape[0]}")
        fmap = FeatureMap("egk", width, anchors, anchors.shape[1])
    else:
        fmap = FeatureMap("linear", width, None, p if input_dim is None else input_dim)
    return LeModel(W, fmap)
