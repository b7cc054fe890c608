import numpy as np

EPS = 1e-12


def repair(raw, eps=EPS):
    """Turn raw linear outputs into valid distributions, row by row.

    Entries below ``eps`` are clamped to ``eps`` and each row is renormalized.
    Rows with no positive entry become uniform.
    """
    raw = np.atleast_2d(np.asarray(raw, dtype=float))
    out = np.maximum(raw, eps)
    out /= out.sum(axis=1, keepdims=True)
    dead = ~(raw > 0).any(axis=1)
    if dead.any():
        out[dead] = 1.0 / raw.shape[1]
    return out


def check_simplex(D, tol=1e-6):
    """Index of the first row of ``D`` off the simplex, or ``None``."""
    D = np.asarray(D, dtype=float)
    bad = (D < -tol).any(axis=1) | (np.abs(D.sum(axis=1) - 1.0) > tol) | ~np.isfinite(D).all(axis=1)
    idx = np.flatnonzero(bad)
    return int(idx[0]) if idx.size else None
