"""Experimental protocol: cross-validation, single-pass LE evaluation, the
LE -> LDL pipeline, grid search and two-parameter sweeps.

Hyperparameters travel as plain dicts keyed by the CLI names:
``lambda1``/``lambda2`` (bd-ldl), ``lambda`` (ud-ldl, ud-le) and
``alpha``/``lambda`` (bd-le), plus optional ``knn``, ``map``, ``bias``,
``standardize``.
"""
import csv
import io
import itertools

import numpy as np

from .errors import TooFewSamples, ValidationError
from .ldl import LdlHyper, predict_ldl, train_bd_ldl, train_ud_ldl
from .le import LeHyper, recover, train_bd_le
from .metrics import HIGHER_BETTER, METRICS, evaluate_all
from .report import EvalReport, ReportRow

POWERS = tuple(10.0**e for e in range(-4, 4))
LDL_METHODS = ("bd-ldl", "ud-ldl")
LE_METHODS = ("bd-le", "ud-le")

DEFAULTS = {
    "bd-ldl": {"lambda1": 1e-3, "lambda2": 1e-2},
    "ud-ldl": {"lambda": 1e-2},
    "bd-le": {"alpha": 1e-3, "lambda": 1e-3},
    "ud-le": {"lambda": 1e-3},
}
# tunable parameters per method, in grid order
TUNABLE = {
    "bd-ldl": ("lambda1", "lambda2"),
    "ud-ldl": ("lambda",),
    "bd-le": ("alpha", "lambda"),
    "ud-le": ("lambda",),
}


def resolve_params(method, params=None):
    if method not in DEFAULTS:
        raise ValidationError(f"unknown method {method!r}")
    out = dict(DEFAULTS[method])
    out.update({k: v for k, v in (params or {}).items() if v is not None})
    return out


def kfold_split(n, folds=10, seed=0):
    """Seeded ``folds``-way partition; returns ``[(train_idx, test_idx), ...]``."""
    if folds < 2 or folds > n:
        raise TooFewSamples(f"need 2 <= folds <= n, got folds={folds}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    out = []
    for test in np.array_split(perm, folds):
        test = np.sort(test)
        mask = np.ones(n, dtype=bool)
        mask[test] = False
        out.append((np.flatnonzero(mask), test))
    return out


def fit_ldl(method, params, X, D):
    p = resolve_params(method, params)
    opts = {"bias": bool(p.get("bias", False)), "standardize": bool(p.get("standardize", False))}
    if method == "bd-ldl":
        return train_bd_ldl(X, D, LdlHyper(p["lambda1"], p["lambda2"]), **opts)
    if method == "ud-ldl":
        return train_ud_ldl(X, D, p["lambda"], **opts)
    raise ValidationError(f"{method!r} is not an LDL method")


def fit_le(method, params, X, L):
    if method not in LE_METHODS:
        raise ValidationError(f"{method!r} is not an LE method")
    p = resolve_params(method, params)
    alpha = p["alpha"] if method == "bd-le" else 0.0
    hyper = LeHyper(alpha, p["lambda"], p.get("knn"), p.get("sigma", 1.0))
    return train_bd_le(X, L, hyper, p.get("map", "egk"))


def run_cv(ds, method="bd-ldl", params=None, folds=10, seed=0, metrics=METRICS):
    if ds.D is None:
        raise ValidationError("cross-validation needs ground-truth distributions")
    p = resolve_params(method, params)
    scores = []
    for train, test in kfold_split(ds.n, folds, seed):
        model = fit_ldl(method, p, ds.X[train], ds.D[train])
        scores.append(evaluate_all(ds.D[test], predict_ldl(model, ds.X[test]), metrics))
    meta = {"protocol": "cv", "method": method, "params": p, "folds": folds, "seed": seed,
            "std": "population"}
    return EvalReport([ReportRow(method, ds.name, scores)], meta)


def normalized_logical(L):
    L = np.asarray(L, dtype=float)
    return L / L.sum(axis=1, keepdims=True)


def run_le(ds, method="bd-le", params=None, metrics=METRICS, baseline=True):
    """Single-pass LE evaluation on the whole dataset.

    With ``baseline`` the report also carries a ``normalized_logical`` row
    scoring the row-normalized logical labels themselves.
    """
    if ds.D is None:
        raise ValidationError("LE evaluation needs ground-truth distributions")
    ds = ds.with_logical()
    p = resolve_params(method, params)
    model = fit_le(method, p, ds.X, ds.L)
    rows = [ReportRow(method, ds.name, [evaluate_all(ds.D, recover(model, ds.X), metrics)])]
    if baseline:
        rows.append(ReportRow("normalized_logical", ds.name,
                              [evaluate_all(ds.D, normalized_logical(ds.L), metrics)]))
    meta = {"protocol": "single-pass", "method": method, "params": p, "folds": 1,
            "n_iter": model.info["n_iter"], "converged": model.info["converged"]}
    return EvalReport(rows, meta)


def pipeline_le_ldl(ds, le_params=None, ldl_params=None, folds=10, seed=0, metrics=METRICS,
                    le_method="bd-le", ldl_method="bd-ldl"):
    """Compare LDL trained on true distributions with LDL trained on
    distributions recovered by LE from the logical labels, fold by fold."""
    if ds.D is None:
        raise ValidationError("pipeline needs ground-truth distributions")
    ds = ds.with_logical()
    le_p = resolve_params(le_method, le_params)
    ldl_p = resolve_params(ldl_method, ldl_params)
    truth, recovered = [], []
    for train, test in kfold_split(ds.n, folds, seed):
        Xtr, Xte = ds.X[train], ds.X[test]
        gt_model = fit_ldl(ldl_method, ldl_p, Xtr, ds.D[train])
        truth.append(evaluate_all(ds.D[test], predict_ldl(gt_model, Xte), metrics))
        le_model = fit_le(le_method, le_p, Xtr, ds.L[train])
        rec_model = fit_ldl(ldl_method, ldl_p, Xtr, recover(le_model, Xtr))
        recovered.append(evaluate_all(ds.D[test], predict_ldl(rec_model, Xte), metrics))
    meta = {"protocol": "le-ldl-pipeline", "le_method": le_method, "le_params": le_p,
            "ldl_method": ldl_method, "ldl_params": ldl_p, "folds": folds, "seed": seed,
            "std": "population"}
    return EvalReport([ReportRow("ground_truth", ds.name, truth),
                       ReportRow("recovered", ds.name, recovered)], meta)


def score(ds, method, params, metric, folds=10, seed=0):
    """Mean of ``metric`` for one configuration (CV for LDL, single pass for LE)."""
    if method in LDL_METHODS:
        rep = run_cv(ds, method, params, folds, seed, (metric,))
    else:
        rep = run_le(ds, method, params, (metric,), baseline=False)
    return rep.rows[0].mean(metric)


def default_grid(method):
    return {name: list(POWERS) for name in TUNABLE[method]}


def grid_search(ds, method="bd-ldl", param_grid=None, folds=10, seed=0, metric="chebyshev",
                fixed=None):
    """Exhaustive search over ``param_grid`` (name -> values).

    Returns a dict with ``best`` params, ``best_score`` and the full ``grid``
    table in lexicographic grid order. Ties keep the earliest point.
    """
    grid = param_grid or default_grid(method)
    names = list(grid)
    if not names or any(len(grid[k]) == 0 for k in names):
        raise ValidationError("grid must be non-empty")
    higher = HIGHER_BETTER[metric]
    table, best, best_score = [], None, None
    for values in itertools.product(*(grid[k] for k in names)):
        params = dict(fixed or {})
        params.update(zip(names, values))
        s = score(ds, method, params, metric, folds, seed)
        table.append({"params": dict(zip(names, values)), "score": s})
        if best is None or (s > best_score if higher else s < best_score):
            best, best_score = params, s
    return {
        "method": method,
        "metric": metric,
        "best": resolve_params(method, best),
        "best_score": best_score,
        "grid": table,
        "metadata": {"dataset": ds.name, "folds": folds if method in LDL_METHODS else 1, "seed": seed},
    }


def grid_csv(result):
    names = list(result["grid"][0]["params"])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names + [result["metric"]])
    for row in result["grid"]:
        w.writerow([repr(float(row["params"][k])) for k in names] + [repr(float(row["score"]))])
    return buf.getvalue()


def param_sweep(ds, method="bd-ldl", range1=POWERS, range2=POWERS, metric="chebyshev",
                folds=10, seed=0, fixed=None):
    """Scores over the cross product of a method's two tunable parameters.

    Returns ``(names, values)`` with ``values[i, j]`` scored at
    ``range1[i]`` x ``range2[j]``.
    """
    names = TUNABLE.get(method, ())
    if len(names) != 2:
        raise ValidationError(f"{method!r} does not have two tunable parameters")
    if len(range1) == 0 or len(range2) == 0:
        raise ValidationError("sweep ranges must be non-empty")
    values = np.empty((len(range1), len(range2)))
    for i, a in enumerate(range1):
        for j, b in enumerate(range2):
            params = dict(fixed or {})
            params.update({names[0]: a, names[1]: b})
            values[i, j] = score(ds, method, params, metric, folds, seed)
    return names, values


def sweep_csv(names, range1, range2, values):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"{names[0]}\\{names[1]}"] + [f"{b:g}" for b in range2])
    for a, row in zip(range1, values):
        w.writerow([f"{a:g}"] + [repr(float(v)) for v in row])
    return buf.getvalue()
