"""Bidirectional label distribution learning (BD-LDL) and its ridge ablation.

With tied reconstruction weights the objective

    ||X theta - D||^2 + lambda1 ||X - D theta^T||^2 + lambda2 ||theta||^2

is a convex quadratic whose stationarity condition is the Sylvester equation
``(X^T X + lambda2 I) theta + theta (lambda1 D^T D) = (1 + lambda1) X^T D``.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from .errors import DimensionMismatch, NonSimplexTarget, SingularNormalEquations, ValidationError
from .simplex import check_simplex, repair
from .sylvester import SylvesterSystem, solve_sylvester


@dataclass(frozen=True)
class LdlHyper:
    lambda1: float = 1e-3
    lambda2: float = 1e-2

    def __post_init__(self):
        if self.lambda1 < 0:
            raise ValidationError("lambda1 must be nonnegative")
        if self.lambda2 < 0:
            raise ValidationError("lambda2 must be nonnegative")


@dataclass(frozen=True)
class LdlModel:
    theta: np.ndarray
    bias_added: bool = False
    mean: np.ndarray | None = None
    scale: np.ndarray | None = None

    @property
    def standardize(self):
        return self.mean is not None

    @property
    def n_features(self):
        """Raw feature count expected by :func:`predict_ldl`."""
        return self.theta.shape[0] - int(self.bias_added)

    @property
    def n_labels(self):
        return self.theta.shape[1]


def _check_xy(X, D):
    X = np.asarray(X, dtype=float)
    D = np.asarray(D, dtype=float)
    if X.ndim != 2 or D.ndim != 2 or X.shape[0] != D.shape[0]:
        raise DimensionMismatch(f"X {X.shape} and D {D.shape} do not conform")
    if not np.isfinite(X).all():
        raise ValidationError("X must be finite")
    bad = check_simplex(D)
    if bad is not None:
        raise NonSimplexTarget(f"row {bad} of D is not a distribution")
    return X, D


def assemble_abc(X, D, hyper):
    X, D = _check_xy(X, D)
    XtD = X.T @ D
    A = X.T @ X + hyper.lambda2 * np.eye(X.shape[1])
    B = hyper.lambda1 * (D.T @ D)
    # exact symmetry; the Gram products can be off by an ulp
    A = 0.5 * (A + A.T)
    B = 0.5 * (B + B.T)
    return SylvesterSystem(A, B, (1.0 + hyper.lambda1) * XtD)


def _design(X, bias, mean=None, scale=None):
    X = np.asarray(X, dtype=float)
    if mean is not None:
        X = (X - mean) / scale
    if bias:
        X = np.hstack([X, np.ones((X.shape[0], 1))])
    return X


def _prepare(X, bias, standardize):
    X = np.asarray(X, dtype=float)
    mean = scale = None
    if standardize:
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0] = 1.0
    return _design(X, bias, mean, scale), mean, scale


def train_bd_ldl(X, D, hyper=None, bias=False, standardize=False):
    """Closed-form BD-LDL fit (a single Sylvester solve)."""
    hyper = hyper or LdlHyper()
    if hyper.lambda2 <= 0:
        raise ValidationError("BD-LDL needs lambda2 > 0")
    Xd, mean, scale = _prepare(X, bias, standardize)
    theta = solve_sylvester(assemble_abc(Xd, D, hyper))
    return LdlModel(theta, bias, mean, scale)


def train_ud_ldl(X, D, lam=1e-2, bias=False, standardize=False):
    """Ridge fit ``(X^T X + lam I)^{-1} X^T D``."""
    if lam < 0:
        raise ValidationError("lambda must be nonnegative")
    Xd, mean, scale = _prepare(X, bias, standardize)
    Xd, D = _check_xy(Xd, D)
    A = Xd.T @ Xd + lam * np.eye(Xd.shape[1])
    try:
        theta = spla.solve(A, Xd.T @ D, assume_a="pos")
    except (np.linalg.LinAlgError, spla.LinAlgError) as exc:
        raise SingularNormalEquations(str(exc)) from exc
    return LdlModel(theta, bias, mean, scale)


def ldl_objective(X, D, theta, hyper):
    X = np.asarray(X, dtype=float)
    D = np.asarray(D, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (X.shape[1], D.shape[1]) or X.shape[0] != D.shape[0]:
        raise DimensionMismatch("X, D and theta do not conform")
    fit = np.sum((X @ theta - D) ** 2)
    rec = np.sum((X - D @ theta.T) ** 2)
    return float(fit + hyper.lambda1 * rec + hyper.lambda2 * np.sum(theta**2))


def stationarity_residual(X, D, theta, hyper):
    """Frobenius norm of the objective's half-gradient at ``theta``."""
    X = np.asarray(X, dtype=float)
    D = np.asarray(D, dtype=float)
    G = X.T @ (X @ theta - D) - hyper.lambda1 * (X.T - theta @ D.T) @ D + hyper.lambda2 * theta
    return float(np.linalg.norm(G))


def predict_ldl(model, X_new):
    X_new = np.atleast_2d(np.asarray(X_new, dtype=float))
    if X_new.shape[1] != model.n_features:
        raise DimensionMismatch(f"expected {model.n_features} features, got {X_new.shape[1]}")
    raw = _design(X_new, model.bias_added, model.mean, model.scale) @ model.theta
    return repair(raw)


def save_ldl_model(model, path):
    d, c = model.theta.shape
    lines = [f"LDL-MODEL {d} {c} {int(model.bias_added)}"]
    lines += [" ".join(f"{v:.17e}" for v in row) for row in model.theta]
    if model.standardize:
        lines.append("STANDARDIZE")
        lines.append(" ".join(f"{v:.17e}" for v in model.mean))
        lines.append(" ".join(f"{v:.17e}" for v in model.scale))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_ldl_model(path):
    from .errors import ParseError

    with open(path, encoding="utf-8") as fh:
        lines = [ln.split() for ln in fh if ln.strip()]
    if not lines or lines[0][0] != "LDL-MODEL" or len(lines[0]) != 4:
        raise ParseError("bad LDL-MODEL header", line=1)
    try:
        d, c, bias = (int(t) for t in lines[0][1:])
        theta = np.array([[float(t) for t in ln] for ln in lines[1 : 1 + d]])
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    if theta.shape != (d, c):
        raise ParseError(f"expected {d}x{c} parameters, got {theta.shape}")
    mean = scale = None
    rest = lines[1 + d :]
    if rest:
        if rest[0] != ["STANDARDIZE"] or len(rest) != 3:
            raise ParseError("unexpected trailing content", line=2 + d)
        mean = np.array([float(t) for t in rest[1]])
        scale = np.array([float(t) for t in rest[2]])
    return LdlModel(theta, bool(bias), mean, scale)
