"""Making classical filters physically realizable as quantum systems.

A strictly proper filter ``(A_hat, B_hat, C_hat)`` driven by a quantum field
generally violates the canonical commutation relations of its state. Two
repair mechanisms are provided:

* :func:`augment_noise` adds the smallest possible number of extra vacuum
  input channels (``B_v1`` on the output field plus ``n_v2`` further
  quadratures through ``B_v2``) so the augmented dynamics preserve the
  commutation relations.
* :func:`skew_riccati_transform` looks for a state transformation ``T`` after
  which the filter is realizable with no ``B_v2`` channels at all; the
  transformation exists exactly when a skew-symmetric Riccati equation admits
  a suitable nonsingular solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DomainError,
    NonRealBv2,
    NonRealResult,
    NonRealT,
    SingularResolvent,
    SingularX,
    SingularX1,
)
from .solvers import EIG_SPLIT_RTOL, stable_subspace
from .systems import canonical_theta, gamma_matrix, real_part_checked

__all__ = [
    "AugmentResult",
    "TransformResult",
    "stilde",
    "min_vacuum_rank",
    "augment_noise",
    "skew_riccati_transform",
    "transfer_function_gap",
    "default_frequency_grid",
    "skew_riccati_residual",
]

#: numerical-rank threshold relative to the largest singular value
RANK_RTOL = 1e-9

#: drop threshold for non-positive spectral rows, relative to the largest
ROW_DROP_RTOL = 1e-12


def _theta_for(dim: int) -> np.ndarray:
    if dim % 2:
        raise DomainError(f"field dimension must be even, got {dim}")
    return canonical_theta(dim // 2)


def stilde(
    A_hat: np.ndarray, B_hat: np.ndarray, C_hat: np.ndarray, theta: np.ndarray
) -> np.ndarray:
    """Commutation-defect matrix of a filter.

    ``theta B_hat theta_y B_hat^T theta - theta A_hat - A_hat^T theta
    - C_hat^T theta_eta C_hat`` with the middle commutation matrices sized to
    the filter's input and output fields. The result is skew-symmetric; its
    rank equals the minimal number of extra vacuum quadratures needed to make
    the filter physically realizable.
    """
    A_hat = np.asarray(A_hat, dtype=float)
    B_hat = np.asarray(B_hat, dtype=float)
    C_hat = np.asarray(C_hat, dtype=float)
    theta = np.asarray(theta, dtype=float)
    th_y = _theta_for(B_hat.shape[1])
    th_eta = _theta_for(C_hat.shape[0])
    return (
        theta @ B_hat @ th_y @ B_hat.T @ theta
        - theta @ A_hat
        - A_hat.T @ theta
        - C_hat.T @ th_eta @ C_hat
    )


def min_vacuum_rank(S_tilde: np.ndarray) -> int:
    """Numerical rank of the commutation defect; the minimal ``n_v2``.

    Always even for a (numerically) skew-symmetric input.
    """
    S_tilde = np.asarray(S_tilde, dtype=float)
    sv = np.linalg.svd(S_tilde, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > RANK_RTOL * sv[0]))


def _fix_column_phases(V: np.ndarray) -> np.ndarray:
    """Rotate each column so its first significant entry is real positive."""
    V = V.copy()
    for j in range(V.shape[1]):
        col = V[:, j]
        big = np.abs(col)
        significant = np.flatnonzero(big > 1e-12 * np.max(big, initial=0.0))
        if significant.size:
            pivot = col[significant[0]]
            V[:, j] = col * (np.conj(pivot) / np.abs(pivot))
    return V


@dataclass(frozen=True)
class AugmentResult:
    """Extra vacuum gains restoring commutation preservation.

    ``B_v1`` feeds back the output field (``theta C_hat^T diag(J)``); ``B_v2``
    couples ``n_v2`` further vacuum quadratures. ``W`` is the spectral factor
    the construction is built from, kept for audit.
    """

    S_tilde: np.ndarray
    n_v2: int
    B_v1: np.ndarray
    B_v2: np.ndarray
    W: np.ndarray


def augment_noise(
    A_hat: np.ndarray, B_hat: np.ndarray, C_hat: np.ndarray, theta: np.ndarray
) -> AugmentResult:
    """Minimal vacuum-noise augmentation of a filter.

    Factorizes the positive part of the Hermitian matrix ``i/4`` times the
    commutation defect: its unitary diagonalization (eigenvalues sorted
    descending, eigenvector phases pinned for reproducibility) gives a factor
    ``W`` from which the extra gain is assembled the same way a coupling matrix
    produces an input gain in the forward oscillator construction. ``B_v2`` is
    unique only up to a symplectic-orthogonal right factor; its invariants
    ``B_v2 B_v2^T`` and ``B_v2 diag(J) B_v2^T`` are what the construction
    guarantees.
    """
    theta = np.asarray(theta, dtype=float)
    C_hat = np.asarray(C_hat, dtype=float)
    n_x = theta.shape[0]
    S_t = stilde(A_hat, B_hat, C_hat, theta)
    n_v2 = min_vacuum_rank(S_t)
    B_v1 = theta @ C_hat.T @ _theta_for(C_hat.shape[0])

    S = 0.25j * S_t
    eigvals, eigvecs = np.linalg.eigh(S)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = _fix_column_phases(eigvecs[:, order])
    U = eigvecs.conj().T
    d_plus = np.abs(eigvals) + eigvals
    top = np.max(d_plus, initial=0.0)
    keep = d_plus > ROW_DROP_RTOL * top if top > 0 else np.zeros_like(d_plus, bool)
    W = np.sqrt(d_plus[keep])[:, None] * U[keep, :]

    if n_v2 == 0:
        B_v2 = np.zeros((n_x, 0))
    else:
        raw = 2j * theta @ np.hstack([-W.conj().T, W.T]) @ gamma_matrix(n_v2)
        try:
            B_v2 = real_part_checked(raw)
        except NonRealResult as exc:
            raise NonRealBv2(str(exc)) from exc
    return AugmentResult(S_tilde=S_t, n_v2=n_v2, B_v1=B_v1, B_v2=B_v2, W=W)


@dataclass(frozen=True)
class TransformResult:
    """Skew Riccati solution and the state transformation built from it.

    ``X`` solves the skew Riccati equation and factors as ``T^T theta T``;
    ``A_tilde, B_tilde, C_tilde`` describe the transformed filter and
    ``B_v1_tilde`` its single extra vacuum gain.
    """

    X: np.ndarray
    T: np.ndarray
    A_tilde: np.ndarray
    B_tilde: np.ndarray
    C_tilde: np.ndarray
    B_v1_tilde: np.ndarray


def skew_riccati_residual(
    A_hat: np.ndarray, B_hat: np.ndarray, C_hat: np.ndarray, X: np.ndarray
) -> np.ndarray:
    """Residual of ``X B theta_y B^T X - A^T X - X A - C^T theta_eta C`` at ``X``."""
    A_hat = np.asarray(A_hat, dtype=float)
    B_hat = np.asarray(B_hat, dtype=float)
    C_hat = np.asarray(C_hat, dtype=float)
    th_y = _theta_for(B_hat.shape[1])
    th_eta = _theta_for(C_hat.shape[0])
    return (
        X @ B_hat @ th_y @ B_hat.T @ X
        - A_hat.T @ X
        - X @ A_hat
        - C_hat.T @ th_eta @ C_hat
    )


def skew_riccati_transform(
    A_hat: np.ndarray, B_hat: np.ndarray, C_hat: np.ndarray, theta: np.ndarray
) -> TransformResult:
    """State transformation after which no extra ``B_v2`` channels are needed.

    Builds the doubled matrix pairing the filter with its adjoint, takes the
    stable invariant subspace ``[X1; X2]``, and forms ``X = X2 X1^-1``, which
    is real, skew-symmetric, and solves the skew Riccati equation when the
    three assumptions below hold. The factor ``T`` with ``X = T^T theta T``
    comes from the spectral pairing of ``X``: eigenvalues ``+/- i lambda_j``
    sorted by ``lambda`` descending and oriented so the principal square root
    involved is real.

    Raises, in the order checked: :class:`ImaginaryAxisEigenvalue` (the
    doubled matrix must split cleanly), :class:`SingularX1`,
    :class:`SingularX`, and :class:`NonRealT` if the residue or pairing checks
    fail.
    """
    A_hat = np.asarray(A_hat, dtype=float)
    B_hat = np.asarray(B_hat, dtype=float)
    C_hat = np.asarray(C_hat, dtype=float)
    theta = np.asarray(theta, dtype=float)
    n_x = A_hat.shape[0]
    th_y = _theta_for(B_hat.shape[1])
    th_eta = _theta_for(C_hat.shape[0])
    Z = np.block(
        [[A_hat, -B_hat @ th_y @ B_hat.T], [-C_hat.T @ th_eta @ C_hat, -A_hat.T]]
    )
    X1, X2 = stable_subspace(Z)
    if np.linalg.cond(X1) > 1e12:
        raise SingularX1("upper block of the stable basis is singular")
    try:
        X = real_part_checked(X2 @ np.linalg.inv(X1))
    except NonRealResult as exc:
        raise NonRealT(f"Riccati solution is not real: {exc}") from exc
    sym = np.max(np.abs(X + X.T))
    if sym > 1e-8 * (1.0 + np.max(np.abs(X))):
        raise NonRealT(f"Riccati solution is not skew-symmetric (defect {sym:.3e})")
    X = (X - X.T) / 2.0

    # spectral pairing of the skew solution: i*X is Hermitian, so its
    # eigendecomposition is orthonormal even under repeated eigenvalues
    mu, V_mu = np.linalg.eigh(1j * X)
    lam = -mu[: n_x // 2]  # positive, descending
    if lam.size and lam[-1] <= EIG_SPLIT_RTOL * (1.0 + lam[0]):
        raise SingularX(f"skew solution has a near-zero eigenvalue {lam[-1]:.3e}")
    V_mu = _fix_column_phases(V_mu)
    V = np.zeros((n_x, n_x), dtype=complex)
    D = np.zeros(n_x)
    for j in range(n_x // 2):
        v = V_mu[:, j]  # eigenvalue +i*lam[j] of X
        V[:, 2 * j] = v
        V[:, 2 * j + 1] = v.conj()  # eigenvalue -i*lam[j]
        D[2 * j : 2 * j + 2] = np.sqrt(lam[j])
    V_pair = np.kron(np.eye(n_x // 2), np.array([[1.0, 1.0], [1j, -1j]]) / np.sqrt(2))
    try:
        T = real_part_checked(V_pair @ (D[:, None] * V.conj().T))
    except NonRealResult as exc:
        raise NonRealT(str(exc)) from exc
    factor_gap = np.max(np.abs(T.T @ theta @ T - X))
    if factor_gap > 1e-8 * (1.0 + np.max(np.abs(X))):
        raise NonRealT(f"factorization defect {factor_gap:.3e}")

    T_inv = np.linalg.inv(T)
    A_tilde = T @ A_hat @ T_inv
    B_tilde = T @ B_hat
    C_tilde = C_hat @ T_inv
    B_v1_tilde = theta @ C_tilde.T @ th_eta
    return TransformResult(
        X=X, T=T, A_tilde=A_tilde, B_tilde=B_tilde, C_tilde=C_tilde,
        B_v1_tilde=B_v1_tilde,
    )


def default_frequency_grid(n: int = 8, w_min: float = 0.1, w_max: float = 10.0) -> np.ndarray:
    """Imaginary-axis samples ``i w`` with ``w`` log-spaced in ``[w_min, w_max]``."""
    return 1j * np.logspace(np.log10(w_min), np.log10(w_max), n)


def transfer_function_gap(
    sys1: tuple[np.ndarray, np.ndarray, np.ndarray],
    sys2: tuple[np.ndarray, np.ndarray, np.ndarray],
    s_samples: Sequence[complex],
) -> float:
    """Largest Frobenius-norm gap between two transfer functions on a sample set.

    ``max_s || C1 (sI - A1)^-1 B1 - C2 (sI - A2)^-1 B2 ||_F``. Samples that
    come within tolerance of a pole of either system raise
    :class:`SingularResolvent`.
    """
    A1, B1, C1 = (np.asarray(M, dtype=float) for M in sys1)
    A2, B2, C2 = (np.asarray(M, dtype=float) for M in sys2)
    poles = np.concatenate([np.linalg.eigvals(A1), np.linalg.eigvals(A2)])
    gap = 0.0
    for s in s_samples:
        dist = np.min(np.abs(poles - s))
        if dist <= 1e-8 * (1.0 + np.abs(s)):
            raise SingularResolvent(f"sample {s} is within {dist:.3e} of a pole")
        G1 = C1 @ np.linalg.solve(s * np.eye(A1.shape[0]) - A1, B1)
        G2 = C2 @ np.linalg.solve(s * np.eye(A2.shape[0]) - A2, B2)
        gap = max(gap, float(np.linalg.norm(G1 - G2)))
    return gap
