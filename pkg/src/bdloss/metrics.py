"""Label-distribution evaluation measures and table ranking.

Each measure accepts a pair of distributions (1-D) or a pair of row-stacked
matrices (2-D, one score per row).
"""
import numpy as np
from scipy.stats import rankdata

from .errors import DimensionMismatch, EmptyInput, NonFinite

EPS = 1e-12

# name -> True when larger is better
HIGHER_BETTER = {
    "chebyshev": False,
    "clark": False,
    "canberra": False,
    "kl": False,
    "cosine": True,
    "intersection": True,
}
METRICS = tuple(HIGHER_BETTER)


def _pair(d, dhat):
    d = np.asarray(d, dtype=float)
    dhat = np.asarray(dhat, dtype=float)
    if d.shape != dhat.shape:
        raise DimensionMismatch(f"shape mismatch {d.shape} vs {dhat.shape}")
    if not (np.isfinite(d).all() and np.isfinite(dhat).all()):
        raise NonFinite("distributions contain non-finite values")
    return d, dhat


def chebyshev(d, dhat):
    d, dhat = _pair(d, dhat)
    return np.max(np.abs(d - dhat), axis=-1)


def clark(d, dhat):
    d, dhat = _pair(d, dhat)
    den = np.maximum(d + dhat, EPS)
    return np.sqrt(np.sum((d - dhat) ** 2 / den**2, axis=-1))


def canberra(d, dhat):
    d, dhat = _pair(d, dhat)
    return np.sum(np.abs(d - dhat) / np.maximum(d + dhat, EPS), axis=-1)


def kl(d, dhat):
    """KL(d || dhat); zero-mass entries of ``d`` contribute nothing."""
    d, dhat = _pair(d, dhat)
    return np.sum(d * np.log(np.maximum(d, EPS) / np.maximum(dhat, EPS)), axis=-1)


def cosine(d, dhat):
    d, dhat = _pair(d, dhat)
    den = np.sqrt(np.sum(d**2, axis=-1) * np.sum(dhat**2, axis=-1))
    return np.sum(d * dhat, axis=-1) / np.maximum(den, EPS)


def intersection(d, dhat):
    d, dhat = _pair(d, dhat)
    return np.sum(np.minimum(d, dhat), axis=-1)


FUNCS = {
    "chebyshev": chebyshev,
    "clark": clark,
    "canberra": canberra,
    "kl": kl,
    "cosine": cosine,
    "intersection": intersection,
}


def evaluate_all(D_true, D_pred, metrics=METRICS):
    """Mean of each measure over rows, as an ordered dict."""
    D_true = np.atleast_2d(np.asarray(D_true, dtype=float))
    D_pred = np.atleast_2d(np.asarray(D_pred, dtype=float))
    if D_true.shape[0] == 0 or D_true.size == 0:
        raise EmptyInput("no rows to evaluate")
    return {name: float(np.mean(FUNCS[name](D_true, D_pred))) for name in metrics}


def rank_table(scores):
    """Per-dataset ranks and average rank for every metric.

    ``scores`` maps method -> dataset -> metric -> mean. Rank 1 is best given
    the metric's direction; tied methods share the smaller rank.

    Returns ``(ranks, avg_rank)`` with ``ranks[metric][dataset][method]`` and
    ``avg_rank[metric][method]`` rounded to two decimals.
    """
    methods = list(scores)
    datasets = list(scores[methods[0]])
    metrics = list(scores[methods[0]][datasets[0]])
    ranks, avg = {}, {}
    for metric in metrics:
        sign = -1.0 if HIGHER_BETTER[metric] else 1.0
        ranks[metric] = {}
        for ds in datasets:
            vals = np.array([sign * scores[m][ds][metric] for m in methods])
            r = rankdata(vals, method="min")
            ranks[metric][ds] = {m: int(ri) for m, ri in zip(methods, r)}
        avg[metric] = {
            m: round(float(np.mean([ranks[metric][ds][m] for ds in datasets])), 2)
            for m in methods
        }
    return ranks, avg
