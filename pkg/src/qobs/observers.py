"""Coherent observer design and performance evaluation.

All designers start from the steady-state Kalman filter of the plant with the
quantum inputs treated as classical Wiener processes of intensity ``S_w``:

* :func:`design_algorithm1` implements the filter as a quantum system by
  adding the minimal extra vacuum channels.
* :func:`design_algorithm2` first inflates the measurement-noise block by
  ``rho^2 I`` to compensate for the extra channels, then picks the ``rho``
  whose augmented observer performs best against the true plant.
* :func:`design_algorithm3` tries to re-coordinate the filter so that no
  ``B_v2`` channels are needed at all, reverting to the first design when the
  transformation does not exist.
* :func:`design_classical` is the measurement-based baseline: heterodyne
  detection (one extra unit of vacuum noise on the output) followed by a
  Kalman filter.

Performance is the steady-state symmetrized error covariance, obtained from
the Lyapunov equation of the estimation-error dynamics.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, QobsError
from .realizability import TransformResult, augment_noise, skew_riccati_transform
from .solvers import KalmanDesign, solve_care, solve_lyapunov
from .systems import QuantumLinearSystem

logger = logging.getLogger(__name__)

__all__ = [
    "Provenance",
    "CoherentObserver",
    "ClassicalObserver",
    "PerformanceReport",
    "design_algorithm1",
    "design_algorithm2",
    "design_algorithm3",
    "design_classical",
    "error_system",
    "evaluate_performance",
    "default_rho_grid",
]


@dataclass(frozen=True)
class Provenance:
    """Which designer produced an observer, plus its designer-specific knob."""

    algorithm: str  # "alg1" | "alg2" | "alg3"
    rho: float | None = None  # alg2 only
    transformed: bool | None = None  # alg3 only


@dataclass(frozen=True)
class CoherentObserver:
    """A physically realizable observer ``d xi = A_hat xi dt + B_hat dy + ...``.

    ``B_v1``/``B_v2`` are the extra vacuum gains in the coordinates where the
    commutation-preservation identity holds (the transformed ones for a
    successful algorithm-3 design, whose ``transform`` is then attached).
    ``noise_gain_v1`` is the effective ``v1`` gain entering the error dynamics
    in plant coordinates: ``B_v1`` itself for algorithms 1 and 2,
    ``T^-1 B_v1_tilde`` for a transformed design.
    """

    A_hat: np.ndarray
    B_hat: np.ndarray
    C_hat: np.ndarray
    B_v1: np.ndarray
    B_v2: np.ndarray
    n_v2: int
    noise_gain_v1: np.ndarray
    provenance: Provenance
    design: KalmanDesign
    transform: TransformResult | None = None


@dataclass(frozen=True)
class ClassicalObserver:
    """Heterodyne measurement followed by a Kalman filter."""

    K: np.ndarray
    A_hat: np.ndarray
    design: KalmanDesign


@dataclass(frozen=True)
class PerformanceReport:
    """Steady-state symmetrized error covariance and scalar summaries."""

    J_bar: np.ndarray
    trace: float
    frobenius: float
    hurwitz_margin: float


def _noise_blocks(plant: QuantumLinearSystem):
    S_w = plant.ito.S
    V1 = plant.B @ S_w @ plant.B.T
    V12 = plant.B @ S_w @ plant.D.T
    V2 = plant.D @ S_w @ plant.D.T
    return S_w, V1, V12, V2


def _kalman_step(plant: QuantumLinearSystem, extra_v2: np.ndarray | None = None):
    _, V1, V12, V2 = _noise_blocks(plant)
    if extra_v2 is not None:
        V2 = V2 + extra_v2
    kd = solve_care(plant.A, plant.C, V1, V12, V2)
    A_hat = plant.A - kd.K @ plant.C
    return kd, A_hat


def _augmented_observer(
    plant: QuantumLinearSystem, kd: KalmanDesign, A_hat: np.ndarray, provenance: Provenance
) -> CoherentObserver:
    C_hat = np.eye(plant.n_x)
    aug = augment_noise(A_hat, kd.K, C_hat, plant.theta)
    return CoherentObserver(
        A_hat=A_hat,
        B_hat=kd.K,
        C_hat=C_hat,
        B_v1=aug.B_v1,
        B_v2=aug.B_v2,
        n_v2=aug.n_v2,
        noise_gain_v1=aug.B_v1,
        provenance=provenance,
        design=kd,
    )


def design_algorithm1(plant: QuantumLinearSystem) -> CoherentObserver:
    """Kalman filter made quantum by minimal vacuum-noise augmentation."""
    kd, A_hat = _kalman_step(plant)
    return _augmented_observer(plant, kd, A_hat, Provenance("alg1"))


def default_rho_grid() -> np.ndarray:
    """Default measurement-noise inflation candidates: 0 plus a log grid."""
    return np.concatenate([[0.0], np.logspace(-3.0, 2.0, 61)])


def design_algorithm2(
    plant: QuantumLinearSystem,
    rho_candidates: Sequence[float] | None = None,
    refine: bool = True,
) -> tuple[CoherentObserver, float, list[tuple[float, float]]]:
    """Noise-inflated Kalman design optimized over the inflation ``rho``.

    For each candidate the filter is designed against the plant with its
    measurement-noise block inflated by ``rho^2 I``, augmented, and scored
    against the *true* plant. Candidates whose design fails are skipped (the
    whole call fails only if every candidate does). With ``refine``, one
    golden-section pass (20 iterations) sharpens the grid minimizer.

    Returns ``(best observer, rho_opt, curve)`` with the curve holding every
    evaluated ``(rho, trace)`` pair sorted by ``rho``.
    """
    if rho_candidates is None:
        rho_candidates = default_rho_grid()
    candidates = sorted(float(r) for r in rho_candidates)
    if not candidates:
        raise DomainError("rho candidate list must be non-empty")
    if candidates[0] != 0.0:
        raise DomainError("rho candidate list must include 0")
    eye_y = np.eye(plant.n_y)

    def try_rho(rho: float):
        kd, A_hat = _kalman_step(plant, extra_v2=rho * rho * eye_y)
        obs = _augmented_observer(
            plant, kd, A_hat, Provenance("alg2", rho=rho)
        )
        report = evaluate_performance(plant, obs)
        return obs, report.trace

    evaluated: list[tuple[float, float, CoherentObserver]] = []
    skipped: list[tuple[float, str]] = []
    for rho in candidates:
        try:
            obs, tr = try_rho(rho)
        except QobsError as exc:
            logger.debug("skipping rho=%g: %s: %s", rho, exc.reason_code, exc)
            skipped.append((rho, f"{exc.reason_code}: {exc}"))
            continue
        evaluated.append((rho, tr, obs))
    if not evaluated:
        reasons = "; ".join(f"rho={r}: {msg}" for r, msg in skipped)
        raise DomainError(f"every rho candidate failed ({reasons})")

    if refine and len(evaluated) >= 2:
        best_idx = min(range(len(evaluated)), key=lambda i: evaluated[i][1])
        lo = evaluated[best_idx - 1][0] if best_idx > 0 else evaluated[best_idx][0]
        hi = (
            evaluated[best_idx + 1][0]
            if best_idx + 1 < len(evaluated)
            else evaluated[best_idx][0]
        )
        if hi > lo:
            inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
            a, b = lo, hi
            c = b - inv_phi * (b - a)
            d = a + inv_phi * (b - a)
            for _ in range(20):
                try:
                    fc = try_rho(c)
                    fd = try_rho(d)
                except QobsError:
                    break
                evaluated.append((c, fc[1], fc[0]))
                evaluated.append((d, fd[1], fd[0]))
                if fc[1] < fd[1]:
                    b, d = d, c
                    c = b - inv_phi * (b - a)
                else:
                    a, c = c, d
                    d = a + inv_phi * (b - a)

    evaluated.sort(key=lambda item: item[0])
    best = min(evaluated, key=lambda item: item[1])
    curve = [(rho, tr) for rho, tr, _ in evaluated]
    return best[2], best[0], curve


def design_algorithm3(
    plant: QuantumLinearSystem,
) -> tuple[CoherentObserver, str | None]:
    """Transformation-based design with fallback to the augmentation design.

    Attempts the skew Riccati state transformation of the Kalman filter; on
    success the observer needs no ``B_v2`` channels and its ``v1`` noise
    enters plant coordinates through ``T^-1 B_v1_tilde``. On failure the
    algorithm-1 observer is returned unchanged together with the typed reason.
    """
    kd, A_hat = _kalman_step(plant)
    C_hat = np.eye(plant.n_x)
    try:
        tf = skew_riccati_transform(A_hat, kd.K, C_hat, plant.theta)
    except QobsError as exc:
        obs = _augmented_observer(
            plant, kd, A_hat, Provenance("alg3", transformed=False)
        )
        return obs, exc.reason_code
    noise_gain = np.linalg.solve(tf.T, tf.B_v1_tilde)
    obs = CoherentObserver(
        A_hat=A_hat,
        B_hat=kd.K,
        C_hat=C_hat,
        B_v1=tf.B_v1_tilde,
        B_v2=np.zeros((plant.n_x, 0)),
        n_v2=0,
        noise_gain_v1=noise_gain,
        provenance=Provenance("alg3", transformed=True),
        design=kd,
        transform=tf,
    )
    return obs, None


def design_classical(plant: QuantumLinearSystem) -> ClassicalObserver:
    """Kalman filter on the heterodyne record ``dy + dw_H`` (vacuum ``w_H``)."""
    kd, A_hat = _kalman_step(plant, extra_v2=np.eye(plant.n_y))
    return ClassicalObserver(K=kd.K, A_hat=A_hat, design=kd)


def error_system(
    plant: QuantumLinearSystem,
    observer: CoherentObserver | ClassicalObserver,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Estimation-error dynamics ``(A_e, B_e, S_joint)``.

    ``d(x - xi) = A_e (x - xi) dt + B_e d(noises)`` with all noise sources
    independent, so ``S_joint`` is block diagonal: the plant's intensity
    followed by identity blocks for each vacuum input of the observer.
    """
    S_w = plant.ito.S
    if isinstance(observer, ClassicalObserver):
        gains = [plant.B - observer.K @ plant.D, -observer.K]
        extra = observer.K.shape[1]
    else:
        gains = [
            plant.B - observer.B_hat @ plant.D,
            -observer.noise_gain_v1,
            -observer.B_v2,
        ]
        extra = observer.noise_gain_v1.shape[1] + observer.n_v2
    B_e = np.hstack(gains)
    S_joint = np.eye(plant.n_w + extra)
    S_joint[: plant.n_w, : plant.n_w] = S_w
    return observer.A_hat, B_e, S_joint


def evaluate_performance(
    plant: QuantumLinearSystem,
    observer: CoherentObserver | ClassicalObserver,
) -> PerformanceReport:
    """Steady-state symmetrized error covariance of an observer on a plant."""
    A_e, B_e, S_joint = error_system(plant, observer)
    J_bar = solve_lyapunov(A_e, B_e @ S_joint @ B_e.T)
    margin = -float(np.max(np.linalg.eigvals(A_e).real))
    return PerformanceReport(
        J_bar=J_bar,
        trace=float(np.trace(J_bar)),
        frobenius=float(np.linalg.norm(J_bar)),
        hurwitz_margin=margin,
    )
