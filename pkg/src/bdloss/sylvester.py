"""Symmetric Sylvester equations ``A @ theta + theta @ B = C``.

``A`` is symmetric positive definite and ``B`` symmetric positive
semidefinite. Both are Cholesky-factorized, the triangular factors are
diagonalized by SVD, and the equation decouples elementwise in the joint
eigenbasis.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from .errors import DimensionMismatch, NotPSD, NotSymmetric, SingularPencil, SingularSystem

SYM_TOL = 1e-10
PENCIL_CUTOFF = 1e-14
MAX_JITTER = 1e-6


@dataclass(frozen=True)
class SylvesterSystem:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A, B, C = (np.asarray(M, dtype=float) for M in (self.A, self.B, self.C))
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"A must be square, got {A.shape}")
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise DimensionMismatch(f"B must be square, got {B.shape}")
        if C.shape != (A.shape[0], B.shape[0]):
            raise DimensionMismatch(f"C must be {A.shape[0]}x{B.shape[0]}, got {C.shape}")
        _check_symmetric(A, "A")
        _check_symmetric(B, "B")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def shape(self):
        return self.C.shape

    def residual(self, theta):
        return np.linalg.norm(self.A @ theta + theta @ self.B - self.C)


@dataclass(frozen=True)
class SylvesterFactorization:
    """Joint eigenbasis of the system.

    ``V1`` holds the right singular vectors of the Cholesky factor of A and
    ``U2`` the left singular vectors of the factor of B, so that
    ``A = V1 diag(sigma1) V1.T`` and ``B = U2 diag(sigma2) U2.T``.
    """

    V1: np.ndarray
    U2: np.ndarray
    sigma1: np.ndarray
    sigma2: np.ndarray


def _check_symmetric(M, name="M"):
    scale = max(np.abs(M).max(initial=0.0), 1.0)
    if np.abs(M - M.T).max(initial=0.0) > SYM_TOL * scale:
        raise NotSymmetric(f"{name} is not symmetric")


def cholesky_psd(M, jitter=0.0):
    """Upper-triangular ``R`` with ``R.T @ R = M + j * I``.

    ``j`` starts at ``jitter``. If the factorization fails, ``j`` is raised
    tenfold (starting from 1e-12 when ``jitter`` is zero) until it succeeds or
    would exceed 1e-6. The jitter actually used is returned alongside ``R``.

    Returns
    -------
    R : ndarray
    jitter : float
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {M.shape}")
    _check_symmetric(M)
    eye = np.eye(M.shape[0])
    j = float(jitter)
    while True:
        try:
            return spla.cholesky(M + j * eye, lower=False), j
        except np.linalg.LinAlgError:
            pass
        j = 1e-12 if j == 0.0 else 10.0 * j
        if j > MAX_JITTER * (1 + 1e-9):
            raise NotPSD(f"Cholesky failed with jitter up to {MAX_JITTER:g}")


def factorize(sys):
    # A = P^T P with P upper; B = Q Q^T with Q = R_B^T lower.
    P, jit_a = cholesky_psd(sys.A)
    R_b, jit_b = cholesky_psd(sys.B)
    Q = R_b.T
    _, s1, V1t = np.linalg.svd(P)
    U2, s2, _ = np.linalg.svd(Q)
    # the jitter shifts every eigenvalue by the same amount; take it back out
    sigma1 = np.maximum(s1**2 - jit_a, 0.0)
    sigma2 = np.maximum(s2**2 - jit_b, 0.0)
    return SylvesterFactorization(V1=V1t.T, U2=U2, sigma1=sigma1, sigma2=sigma2)


def solve_factored(fac, C):
    E = fac.V1.T @ C @ fac.U2
    denom = fac.sigma1[:, None] + fac.sigma2[None, :]
    if (denom <= PENCIL_CUTOFF).any():
        raise SingularPencil("sigma1_i + sigma2_j vanishes for some (i, j)")
    return fac.V1 @ (E / denom) @ fac.U2.T


def solve_sylvester(sys):
    """Solve ``A theta + theta B = C`` through the Cholesky/SVD eigenbasis."""
    return solve_factored(factorize(sys), sys.C)


def kron_oracle_solve(sys):
    """Reference solution from the vectorized ``(dc) x (dc)`` linear system.

    ``(I_c kron A + B.T kron I_d) vec(theta) = vec(C)`` with column-major
    ``vec``, solved by LU with partial pivoting. Test use only.
    """
    d, c = sys.shape
    if d * c > 2000:
        raise DimensionMismatch(f"oracle limited to d*c <= 2000, got {d * c}")
    K = np.kron(np.eye(c), sys.A) + np.kron(sys.B.T, np.eye(d))
    lu, piv = spla.lu_factor(K, check_finite=True)
    diag = np.abs(np.diag(lu))
    if diag.min() <= np.finfo(float).eps * max(diag.max(), 1.0) * K.shape[0]:
        raise SingularSystem("vectorized Sylvester operator is singular")
    x = spla.lu_solve((lu, piv), sys.C.reshape(-1, order="F"))
    return x.reshape(d, c, order="F")
