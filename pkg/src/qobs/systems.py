"""State-space models of linear quantum stochastic systems.

A system ``dx = A x dt + B dw``, ``dy = C x dt + D dw`` acts on a stacked
quadrature vector ordered ``(q1, p1, q2, p2, ...)``. The canonical
commutation matrix is block diagonal in ``J = [[0, 1], [-1, 0]]`` and every
two columns of ``B`` belong to one bosonic input channel, either vacuum or
thermal with occupation ``k_n``. The module also provides the forward
construction that maps a quadratic Hamiltonian matrix and a linear coupling
matrix to a physically realizable ``(A, B, C, D)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import DomainError, FileFormatError, NonRealResult

__all__ = [
    "J2",
    "NoiseKind",
    "NoiseChannel",
    "ItoStructure",
    "QuantumLinearSystem",
    "HamiltonianCoupling",
    "canonical_theta",
    "ito_structure",
    "permutation_matrix",
    "gamma_matrix",
    "realize_from_hamiltonian",
    "commutation_residual",
    "make_cavity_plant",
    "system_from_dict",
    "system_to_dict",
    "load_system",
    "save_system",
]

#: single-mode commutation block
J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])

#: relative scale below which imaginary parts of must-be-real matrices are dropped
IMAG_RESIDUE_RTOL = 1e-9


def _require_even(n: int, what: str) -> None:
    if n <= 0 or n % 2:
        raise DomainError(f"{what} must be a positive even integer, got {n}")


def real_part_checked(M: np.ndarray, rtol: float = IMAG_RESIDUE_RTOL) -> np.ndarray:
    """Drop the imaginary part of ``M`` after verifying it is negligible.

    The allowance scales with the largest entry magnitude so that the check is
    meaningful for both near-zero and large matrices. Raises
    :class:`NonRealResult` when the residue is structural rather than
    round-off.
    """
    M = np.asarray(M)
    scale = rtol * (1.0 + np.max(np.abs(M), initial=0.0))
    residue = np.max(np.abs(M.imag), initial=0.0)
    if residue > scale:
        raise NonRealResult(
            f"imaginary residue {residue:.3e} exceeds allowance {scale:.3e}"
        )
    return np.ascontiguousarray(M.real)


def _frozen_array(M, dtype=float) -> np.ndarray:
    out = np.array(M, dtype=dtype)
    out.setflags(write=False)
    return out


class NoiseKind(str, Enum):
    VACUUM = "vacuum"
    THERMAL = "thermal"


@dataclass(frozen=True)
class NoiseChannel:
    """One pair of input quadratures: vacuum, or thermal with occupation ``k_n``."""

    kind: NoiseKind
    k_n: float = 0.0

    def __post_init__(self) -> None:
        if self.k_n < 0:
            raise DomainError(f"thermal occupation must be non-negative, got {self.k_n}")
        if self.kind is NoiseKind.VACUUM and self.k_n != 0.0:
            raise DomainError("a vacuum channel has k_n = 0")
        if self.kind is NoiseKind.THERMAL and self.k_n == 0.0:
            # zero occupation is exactly a vacuum input
            object.__setattr__(self, "kind", NoiseKind.VACUUM)

    @classmethod
    def vacuum(cls) -> "NoiseChannel":
        return cls(NoiseKind.VACUUM)

    @classmethod
    def thermal(cls, k_n: float) -> "NoiseChannel":
        return cls(NoiseKind.THERMAL, float(k_n))


@dataclass(frozen=True)
class ItoStructure:
    """Quadrature Ito matrix ``F = S + iT`` of a stack of input channels.

    ``S`` (symmetric) is the noise intensity, ``T`` (skew) encodes the field
    commutators. Both are block diagonal with one 2x2 block per channel.
    """

    F: np.ndarray
    S: np.ndarray
    T: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "F", _frozen_array(self.F, complex))
        object.__setattr__(self, "S", _frozen_array(self.S))
        object.__setattr__(self, "T", _frozen_array(self.T))


def canonical_theta(n_modes: int) -> np.ndarray:
    """Canonical commutation matrix diag(J, ..., J) for ``n_modes`` mode pairs."""
    if n_modes < 1:
        raise DomainError(f"need at least one mode, got {n_modes}")
    return np.kron(np.eye(n_modes), J2)


def ito_structure(channels: Sequence[NoiseChannel]) -> ItoStructure:
    """Quadrature Ito matrix of independent channels.

    Each channel contributes the block ``[[1+2k_n, i], [-i, 1+2k_n]]``: the
    diagonal follows from the creation/annihilation Ito products
    ``db db* = (1+k_n) dt`` and ``db* db = k_n dt`` expanded in quadratures,
    and the imaginary part is the commutation block ``J`` regardless of
    occupation.
    """
    if not channels:
        raise DomainError("channel list must be non-empty")
    n = 2 * len(channels)
    F = np.zeros((n, n), dtype=complex)
    for i, ch in enumerate(channels):
        s = 1.0 + 2.0 * ch.k_n
        F[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = [[s, 1j], [-1j, s]]
    return ItoStructure(F=F, S=F.real, T=F.imag)


def permutation_matrix(n: int) -> np.ndarray:
    """Permutation sending ``(a1, a2, ..., a2m)`` to ``(a1, a3, ..., a2, a4, ...)``.

    Acts on column vectors: odd-indexed components first, then even-indexed.
    """
    _require_even(n, "permutation size")
    m = n // 2
    P = np.zeros((n, n))
    for i in range(m):
        P[i, 2 * i] = 1.0
        P[m + i, 2 * i + 1] = 1.0
    return P


def gamma_matrix(n_w: int) -> np.ndarray:
    """The matrix ``P diag(M, ..., M)`` with ``M = [[1, i], [1, -i]] / 2``.

    Converts stacked annihilation/creation pairs to quadrature pairs; satisfies
    ``Gamma Gamma^dag = I/2``.
    """
    _require_even(n_w, "input dimension")
    M = 0.5 * np.array([[1.0, 1j], [1.0, -1j]])
    return permutation_matrix(n_w) @ np.kron(np.eye(n_w // 2), M)


@dataclass(frozen=True)
class HamiltonianCoupling:
    """Quadratic Hamiltonian matrix ``R`` and linear coupling matrix ``Lambda``.

    ``R`` is real symmetric ``n_x x n_x``; ``Lambda`` is complex
    ``(n_w/2) x n_x`` with one row per input channel; ``n_y`` is the (even)
    number of output quadratures, at most ``n_w``.
    """

    R: np.ndarray
    Lambda: np.ndarray
    n_y: int

    def __post_init__(self) -> None:
        R = np.asarray(self.R, dtype=float)
        if R.ndim != 2 or R.shape[0] != R.shape[1]:
            raise DomainError(f"R must be square, got shape {R.shape}")
        asym = np.max(np.abs(R - R.T), initial=0.0)
        if asym > IMAG_RESIDUE_RTOL * (1.0 + np.max(np.abs(R), initial=0.0)):
            raise DomainError(f"R must be symmetric; asymmetry {asym:.3e}")
        object.__setattr__(self, "R", _frozen_array((R + R.T) / 2.0))
        Lam = np.atleast_2d(np.asarray(self.Lambda, dtype=complex))
        if Lam.shape[1] != R.shape[0]:
            raise DomainError(
                f"Lambda must have {R.shape[0]} columns, got {Lam.shape[1]}"
            )
        object.__setattr__(self, "Lambda", _frozen_array(Lam, complex))
        _require_even(self.n_y, "n_y")
        if self.n_y > 2 * Lam.shape[0]:
            raise DomainError(
                f"n_y = {self.n_y} exceeds the input dimension {2 * Lam.shape[0]}"
            )

    @property
    def n_x(self) -> int:
        return self.R.shape[0]

    @property
    def n_w(self) -> int:
        return 2 * self.Lambda.shape[0]


@dataclass(frozen=True)
class QuantumLinearSystem:
    """State-space matrices of a linear quantum stochastic system.

    ``physical`` is set by constructors that guarantee (or verified) that the
    commutation-preservation residual vanishes; a freshly assembled system
    defaults to unverified.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    channels: tuple[NoiseChannel, ...]
    theta: np.ndarray | None = None  # defaults to the canonical matrix
    physical: bool = False

    def __post_init__(self) -> None:
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)
        C = np.asarray(self.C, dtype=float)
        D = np.asarray(self.D, dtype=float)
        n_x, n_w, n_y = A.shape[0], B.shape[1], C.shape[0]
        _require_even(n_x, "n_x")
        _require_even(n_w, "n_w")
        _require_even(n_y, "n_y")
        if A.shape != (n_x, n_x) or B.shape != (n_x, n_w):
            raise DomainError(f"A/B shapes inconsistent: {A.shape}, {B.shape}")
        if C.shape != (n_y, n_x) or D.shape != (n_y, n_w):
            raise DomainError(f"C/D shapes inconsistent: {C.shape}, {D.shape}")
        if n_y > n_w:
            raise DomainError(f"n_y = {n_y} must not exceed n_w = {n_w}")
        if len(self.channels) != n_w // 2:
            raise DomainError(
                f"need {n_w // 2} channels for {n_w} input columns, got {len(self.channels)}"
            )
        theta = self.theta
        if theta is None:
            theta = canonical_theta(n_x // 2)
        theta = np.asarray(theta, dtype=float)
        if not np.allclose(theta @ theta, -np.eye(n_x)):
            raise DomainError("theta must be canonical (theta^2 = -I)")
        for name, M in (("A", A), ("B", B), ("C", C), ("D", D), ("theta", theta)):
            object.__setattr__(self, name, _frozen_array(M))
        object.__setattr__(self, "channels", tuple(self.channels))

    @property
    def n_x(self) -> int:
        return self.A.shape[0]

    @property
    def n_w(self) -> int:
        return self.B.shape[1]

    @property
    def n_y(self) -> int:
        return self.C.shape[0]

    @property
    def ito(self) -> ItoStructure:
        return ito_structure(self.channels)

    def residual(self) -> np.ndarray:
        """Commutation-preservation residual of the system's own dynamics."""
        return commutation_residual(self.A, [self.B], self.theta, [self.ito.T])


def commutation_residual(
    A: np.ndarray,
    input_gains: Sequence[np.ndarray],
    theta: np.ndarray,
    T_blocks: Sequence[np.ndarray],
) -> np.ndarray:
    """Residual ``A theta + theta A^T + sum_i B_i T_i B_i^T``.

    Vanishes exactly when the dynamics preserve the canonical commutation
    relations; each input gain is paired with the skew Ito part of its field.
    """
    if len(input_gains) != len(T_blocks):
        raise DomainError("need one T block per input gain")
    A = np.asarray(A, dtype=float)
    theta = np.asarray(theta, dtype=float)
    res = A @ theta + theta @ A.T
    for G, T in zip(input_gains, T_blocks):
        G = np.asarray(G, dtype=float)
        if G.shape[1] == 0:
            continue
        res = res + G @ np.asarray(T, dtype=float) @ G.T
    return res


def realize_from_hamiltonian(
    hc: HamiltonianCoupling,
    channels: Sequence[NoiseChannel] | None = None,
) -> QuantumLinearSystem:
    """Forward construction of ``(A, B, C, D)`` from ``(R, Lambda)``.

    The resulting system is an open quantum harmonic oscillator by
    construction, hence flagged physical. ``channels`` defaults to vacuum for
    every input; the choice does not affect the matrices.
    """
    n_x, n_w, n_y = hc.n_x, hc.n_w, hc.n_y
    theta = canonical_theta(n_x // 2)
    Lam = hc.Lambda
    gram = Lam.conj().T @ Lam
    A = 2.0 * theta @ (hc.R + gram.imag)
    Gamma = gamma_matrix(n_w)
    B = real_part_checked(2j * theta @ np.hstack([-Lam.conj().T, Lam.T]) @ Gamma)
    Sigma = np.hstack([np.eye(n_y // 2), np.zeros((n_y // 2, (n_w - n_y) // 2))])
    stack = np.vstack([Lam + Lam.conj(), -1j * Lam + 1j * Lam.conj()])
    C = real_part_checked(
        permutation_matrix(n_y).T
        @ np.block([[Sigma, np.zeros_like(Sigma)], [np.zeros_like(Sigma), Sigma]])
        @ stack
    )
    D = np.hstack([np.eye(n_y), np.zeros((n_y, n_w - n_y))])
    if channels is None:
        channels = tuple(NoiseChannel.vacuum() for _ in range(n_w // 2))
    return QuantumLinearSystem(A=A, B=B, C=C, D=D, channels=channels, physical=True)


def make_cavity_plant(kappa1: float, kappa2: float, k_n: float) -> QuantumLinearSystem:
    """Optical cavity with a vacuum input on the measured mirror and a thermal input.

    ``dx = -(kappa1+kappa2)/2 x dt - sqrt(kappa1) dw1 - sqrt(kappa2) dw2``,
    ``dy = sqrt(kappa1) x dt + dw1``, with ``dw2`` thermal of occupation ``k_n``.
    """
    if kappa1 <= 0 or kappa2 <= 0:
        raise DomainError(f"mirror couplings must be positive, got {kappa1}, {kappa2}")
    if k_n < 0:
        raise DomainError(f"thermal occupation must be non-negative, got {k_n}")
    I2 = np.eye(2)
    A = -0.5 * (kappa1 + kappa2) * I2
    B = np.hstack([-np.sqrt(kappa1) * I2, -np.sqrt(kappa2) * I2])
    C = np.sqrt(kappa1) * I2
    D = np.hstack([I2, np.zeros((2, 2))])
    channels = (NoiseChannel.vacuum(), NoiseChannel.thermal(k_n))
    return QuantumLinearSystem(A=A, B=B, C=C, D=D, channels=channels, physical=True)


# --- system description files -------------------------------------------------

def _channel_from_dict(d: dict, index: int) -> NoiseChannel:
    try:
        kind = d["kind"]
    except (KeyError, TypeError):
        raise FileFormatError(f"channels[{index}]: missing 'kind'") from None
    if kind == "vacuum":
        return NoiseChannel.vacuum()
    if kind == "thermal":
        try:
            return NoiseChannel.thermal(float(d["k_n"]))
        except KeyError:
            raise FileFormatError(f"channels[{index}]: thermal channel needs 'k_n'") from None
    raise FileFormatError(f"channels[{index}]: unknown kind {kind!r}")


def system_from_dict(d: dict) -> QuantumLinearSystem:
    """Build a system from the JSON description schema.

    Keys: ``n_x``, ``A``, ``B``, ``C``, ``D`` (row-major nested arrays) and
    ``channels`` (list of ``{"kind": "vacuum"}`` / ``{"kind": "thermal",
    "k_n": x}``). The physical flag is set by verifying the commutation
    residual.
    """
    matrices = {}
    for key in ("n_x", "A", "B", "C", "D", "channels"):
        if key not in d:
            raise FileFormatError(f"missing key {key!r}")
    for key in ("A", "B", "C", "D"):
        try:
            matrices[key] = np.array(d[key], dtype=float)
        except (TypeError, ValueError) as exc:
            raise FileFormatError(f"key {key!r}: not a numeric matrix ({exc})") from None
        if matrices[key].ndim != 2:
            raise FileFormatError(f"key {key!r}: expected a nested (2-d) array")
    channels = tuple(
        _channel_from_dict(c, i) for i, c in enumerate(d["channels"])
    )
    try:
        sys = QuantumLinearSystem(
            A=matrices["A"], B=matrices["B"], C=matrices["C"], D=matrices["D"],
            channels=channels,
        )
    except DomainError as exc:
        raise FileFormatError(str(exc)) from None
    if int(d["n_x"]) != sys.n_x:
        raise FileFormatError(f"n_x = {d['n_x']} does not match A's size {sys.n_x}")
    res = np.linalg.norm(sys.residual())
    if res <= 1e-8 * (1.0 + np.linalg.norm(sys.A)):
        sys = QuantumLinearSystem(
            A=sys.A, B=sys.B, C=sys.C, D=sys.D, channels=sys.channels, physical=True
        )
    return sys


def system_to_dict(sys: QuantumLinearSystem) -> dict:
    channels = []
    for ch in sys.channels:
        if ch.kind is NoiseKind.VACUUM:
            channels.append({"kind": "vacuum"})
        else:
            channels.append({"kind": "thermal", "k_n": ch.k_n})
    return {
        "n_x": sys.n_x,
        "A": sys.A.tolist(),
        "B": sys.B.tolist(),
        "C": sys.C.tolist(),
        "D": sys.D.tolist(),
        "channels": channels,
    }


def load_system(path) -> QuantumLinearSystem:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(
                f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from None
    try:
        return system_from_dict(data)
    except FileFormatError as exc:
        raise FileFormatError(f"{path}: {exc}") from None


def save_system(sys: QuantumLinearSystem, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(system_to_dict(sys), fh, indent=2, sort_keys=True)
        fh.write("\n")
