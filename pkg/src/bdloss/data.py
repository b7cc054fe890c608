"""Dataset container, text file format and synthetic generator.

File format (UTF-8, whitespace separated)::

    LDL|LLE|BOTH <n> <m> <c>
    x_1 ... x_m  [d_1 ... d_c]  [l_1 ... l_c]     (n rows)

``LDL`` rows carry distributions, ``LLE`` rows logical labels and ``BOTH``
rows distributions followed by logical labels.
"""
import os
from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation, IoError, ParseError, ValidationError
from .le import binarize
from .simplex import check_simplex

KINDS = ("LDL", "LLE", "BOTH")


@dataclass(frozen=True)
class Dataset:
    name: str
    X: np.ndarray
    D: np.ndarray | None = None
    L: np.ndarray | None = None

    def __post_init__(self):
        validate(self)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def m(self):
        return self.X.shape[1]

    @property
    def c(self):
        return (self.D if self.D is not None else self.L).shape[1]

    @property
    def kind(self):
        if self.D is not None and self.L is not None:
            return "BOTH"
        return "LDL" if self.D is not None else "LLE"

    def subset(self, idx):
        return Dataset(
            self.name,
            self.X[idx],
            None if self.D is None else self.D[idx],
            None if self.L is None else self.L[idx],
        )

    def with_logical(self):
        """Copy with ``L`` filled in from ``D`` when absent."""
        if self.L is not None:
            return self
        return Dataset(self.name, self.X, self.D, binarize(self.D))

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented

        def same(a, b):
            return (a is None and b is None) or (
                a is not None and b is not None and a.shape == b.shape and np.array_equal(a, b)
            )

        return self.name == other.name and same(self.X, other.X) and same(self.D, other.D) and same(self.L, other.L)


def validate(ds):
    if ds.D is None and ds.L is None:
        raise ValidationError("dataset needs a distribution matrix, a logical matrix, or both")
    if not np.isfinite(ds.X).all():
        raise InvariantViolation("non-finite feature", row=int(np.flatnonzero(~np.isfinite(ds.X).all(axis=1))[0]) + 1)
    for M in (ds.D, ds.L):
        if M is not None and M.shape[0] != ds.X.shape[0]:
            raise ValidationError("label matrix row count differs from X")
    if ds.D is not None and ds.L is not None and ds.D.shape != ds.L.shape:
        raise ValidationError("D and L shapes differ")
    if ds.D is not None:
        bad = check_simplex(ds.D)
        if bad is not None:
            raise InvariantViolation("distribution off the simplex", row=bad + 1)
    if ds.L is not None:
        bad = ~np.isin(ds.L, (0.0, 1.0)).all(axis=1) | (ds.L.sum(axis=1) < 1)
        if bad.any():
            raise InvariantViolation("logical row must be 0/1 with at least one 1", row=int(np.flatnonzero(bad)[0]) + 1)


def load_dataset(path, name=None):
    name = name or os.path.splitext(os.path.basename(str(path)))[0]
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8: {exc}") from exc

    body = [(i + 1, ln.split()) for i, ln in enumerate(lines) if ln.strip()]
    if not body:
        raise ParseError("empty file", line=1)
    lineno, head = body[0]
    if len(head) != 4 or head[0] not in KINDS:
        raise ParseError("header must be 'LDL|LLE|BOTH <n> <m> <c>'", line=lineno)
    try:
        n, m, c = (int(t) for t in head[1:])
    except ValueError:
        raise ParseError("header sizes must be integers", line=lineno) from None
    if n < 1 or m < 1 or c < 1:
        raise ParseError("header sizes must be positive", line=lineno)
    kind = head[0]
    width = m + (2 * c if kind == "BOTH" else c)
    rows = body[1:]
    if len(rows) != n:
        raise ParseError(f"expected {n} data rows, found {len(rows)}", line=rows[-1][0] if rows else lineno)

    data = np.empty((n, width))
    for r, (lineno, toks) in enumerate(rows):
        if len(toks) != width:
            raise ParseError(f"expected {width} values, found {len(toks)}", line=lineno)
        for col, tok in enumerate(toks):
            try:
                data[r, col] = float(tok)
            except ValueError:
                raise ParseError(f"not a number: {tok!r}", line=lineno, column=col + 1) from None

    X = data[:, :m]
    D = L = None
    if kind == "LDL":
        D = data[:, m:]
    elif kind == "LLE":
        L = data[:, m:]
    else:
        D, L = data[:, m : m + c], data[:, m + c :]
    return Dataset(name, X, D, L)


def _fmt(v):
    return format(float(v), ".17g")


def save_dataset(ds, path, force=False):
    if os.path.exists(path) and not force:
        raise IoError(f"{path} exists (use force to overwrite)")
    blocks = [ds.X] + [M for M in (ds.D, ds.L) if M is not None]
    lines = [f"{ds.kind} {ds.n} {ds.m} {ds.c}"]
    for row in np.hstack(blocks):
        lines.append(" ".join(_fmt(v) for v in row))
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc


@dataclass(frozen=True)
class SyntheticSpec:
    """Clustered-Gaussian LDL problem with a planted linear-softmax model.

    Features are scaled by ``1/sqrt(m)`` so planted logits have unit-order
    spread regardless of ``m`` and nearest neighbours sit well inside the
    unit similarity kernel width.
    """

    n: int = 300
    m: int = 24
    c: int = 4
    noise: float = 0.05
    seed: int = 0
    manifold_clusters: int = 3
    center_scale: float = 2.0
    cluster_std: float = 0.5

    def __post_init__(self):
        if self.c < 2 or self.m < 1 or self.n < 1 or self.manifold_clusters < 1:
            raise ValidationError("need n >= 1, m >= 1, c >= 2, clusters >= 1")
        if self.noise < 0:
            raise ValidationError("noise must be nonnegative")


def softmax_rows(Z):
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def gen_synthetic(spec, name=None):
    rng = np.random.default_rng(spec.seed)
    scale = 1.0 / np.sqrt(spec.m)
    centers = rng.standard_normal((spec.manifold_clusters, spec.m)) * spec.center_scale * scale
    assign = rng.integers(0, spec.manifold_clusters, size=spec.n)
    X = centers[assign] + rng.standard_normal((spec.n, spec.m)) * spec.cluster_std * scale
    theta = rng.standard_normal((spec.m, spec.c))
    logits = X @ theta + spec.noise * rng.standard_normal((spec.n, spec.c))
    D = softmax_rows(logits)
    return Dataset(name or f"synthetic-s{spec.seed}", X, D, binarize(D))
