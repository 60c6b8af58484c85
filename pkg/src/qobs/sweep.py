"""Benchmark sweeps over thermal noise intensity for the cavity scenarios.

A sweep designs every requested observer at each ``k_n`` grid point of a
cavity plant and records the scalar performance summaries. Output is a plain
CSV (plus optional two-column plot files per algorithm); repeated runs of the
same configuration produce byte-identical data files.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DomainError, QobsError
from .observers import (
    design_algorithm1,
    design_algorithm2,
    design_algorithm3,
    design_classical,
    evaluate_performance,
)
from .systems import make_cavity_plant

__all__ = [
    "SCENARIOS",
    "ALGORITHMS",
    "CSV_HEADER",
    "ScenarioConfig",
    "SweepRow",
    "default_kn_grid",
    "scenario_config",
    "run_sweep",
    "emit_csv",
    "emit_plot_data",
]

#: mirror couplings (kappa1, kappa2) of the three named scenarios
SCENARIOS = {"s1": (0.1, 0.1), "s2": (0.5, 0.01), "s3": (0.8, 0.01)}

ALGORITHMS = ("alg1", "alg2", "alg3", "classical")

#: integer thermal intensities bracketing the known transformation-existence
#: discontinuities; always folded into the default grid
TRANSITION_KNS = (69.0, 70.0, 909.0, 910.0)

CSV_HEADER = (
    "k_n,alg1_trace,alg1_frob,alg1_nv2,alg2_trace,alg2_frob,alg2_rho,"
    "alg3_trace,alg3_frob,alg3_nv2,alg3_transformed,classical_trace,classical_frob"
)


def default_kn_grid(n_points: int = 60) -> tuple[float, ...]:
    """Log-spaced thermal intensities plus the transition-bracketing integers."""
    grid = np.logspace(np.log10(0.01), np.log10(1e4), n_points)
    return tuple(sorted(set(float(k) for k in grid) | set(TRANSITION_KNS)))


@dataclass(frozen=True)
class ScenarioConfig:
    """One sweep: a cavity, a ``k_n`` grid, and the observers to design."""

    kappa1: float
    kappa2: float
    kn_grid: tuple[float, ...]
    rho_candidates: tuple[float, ...] | None = None
    algorithms: tuple[str, ...] = ALGORITHMS

    def __post_init__(self) -> None:
        if self.kappa1 <= 0 or self.kappa2 <= 0:
            raise DomainError("mirror couplings must be positive")
        grid = tuple(float(k) for k in self.kn_grid)
        if not grid:
            raise DomainError("kn_grid must be non-empty")
        if any(k < 0 for k in grid):
            raise DomainError("kn_grid values must be non-negative")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError("kn_grid must be sorted ascending without duplicates")
        object.__setattr__(self, "kn_grid", grid)
        algs = tuple(self.algorithms)
        unknown = set(algs) - set(ALGORITHMS)
        if unknown:
            raise DomainError(f"unknown algorithms: {sorted(unknown)}")
        object.__setattr__(self, "algorithms", algs)
        if self.rho_candidates is not None:
            object.__setattr__(
                self, "rho_candidates", tuple(float(r) for r in self.rho_candidates)
            )


def scenario_config(
    name: str,
    kn_grid: Sequence[float] | None = None,
    algorithms: Sequence[str] = ALGORITHMS,
    rho_candidates: Sequence[float] | None = None,
) -> ScenarioConfig:
    """Config for one of the named scenarios ``s1``/``s2``/``s3``."""
    if name not in SCENARIOS:
        raise DomainError(f"unknown scenario {name!r}; expected one of {sorted(SCENARIOS)}")
    kappa1, kappa2 = SCENARIOS[name]
    return ScenarioConfig(
        kappa1=kappa1,
        kappa2=kappa2,
        kn_grid=tuple(kn_grid) if kn_grid is not None else default_kn_grid(),
        rho_candidates=rho_candidates,
        algorithms=tuple(algorithms),
    )


@dataclass
class SweepRow:
    """Scalar results of all requested designers at one ``k_n``.

    Fields stay ``None`` for algorithms that were not requested; designer
    failures land in ``errors`` keyed by algorithm name and never abort the
    sweep.
    """

    k_n: float
    alg1_trace: float | None = None
    alg1_frob: float | None = None
    alg1_nv2: int | None = None
    alg2_trace: float | None = None
    alg2_frob: float | None = None
    alg2_rho: float | None = None
    alg3_trace: float | None = None
    alg3_frob: float | None = None
    alg3_nv2: int | None = None
    alg3_transformed: bool | None = None
    alg3_failure_reason: str | None = None
    classical_trace: float | None = None
    classical_frob: float | None = None
    errors: dict = field(default_factory=dict)


def _sweep_point(config: ScenarioConfig, k_n: float) -> SweepRow:
    row = SweepRow(k_n=k_n)
    plant = make_cavity_plant(config.kappa1, config.kappa2, k_n)
    if "alg1" in config.algorithms:
        try:
            obs = design_algorithm1(plant)
            rep = evaluate_performance(plant, obs)
            row.alg1_trace, row.alg1_frob = rep.trace, rep.frobenius
            row.alg1_nv2 = obs.n_v2
        except QobsError as exc:
            row.errors["alg1"] = f"{exc.reason_code}: {exc}"
    if "alg2" in config.algorithms:
        try:
            obs, rho_opt, _ = design_algorithm2(plant, config.rho_candidates)
            rep = evaluate_performance(plant, obs)
            row.alg2_trace, row.alg2_frob = rep.trace, rep.frobenius
            row.alg2_rho = rho_opt
        except QobsError as exc:
            row.errors["alg2"] = f"{exc.reason_code}: {exc}"
    if "alg3" in config.algorithms:
        try:
            obs, reason = design_algorithm3(plant)
            rep = evaluate_performance(plant, obs)
            row.alg3_trace, row.alg3_frob = rep.trace, rep.frobenius
            row.alg3_nv2 = obs.n_v2
            row.alg3_transformed = bool(obs.provenance.transformed)
            row.alg3_failure_reason = reason
        except QobsError as exc:
            row.errors["alg3"] = f"{exc.reason_code}: {exc}"
    if "classical" in config.algorithms:
        try:
            obs = design_classical(plant)
            rep = evaluate_performance(plant, obs)
            row.classical_trace, row.classical_frob = rep.trace, rep.frobenius
        except QobsError as exc:
            row.errors["classical"] = f"{exc.reason_code}: {exc}"
    return row


def run_sweep(config: ScenarioConfig) -> list[SweepRow]:
    """Design and score every requested observer at each grid point."""
    return [_sweep_point(config, k_n) for k_n in config.kn_grid]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def emit_csv(rows: Sequence[SweepRow], destination) -> None:
    """Write sweep rows as CSV with shortest round-trip decimals.

    Refuses to create a file for an empty row list; IO failures are re-raised
    with the destination path attached.
    """
    if not rows:
        raise DomainError("no rows to write; refusing to create an empty file")
    columns = [f.name for f in fields(SweepRow) if f.name not in ("errors", "alg3_failure_reason")]
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(",".join(_cell(getattr(row, name)) for name in columns))
    try:
        Path(destination).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {destination}: {exc}") from exc


def emit_plot_data(rows: Sequence[SweepRow], directory) -> list[Path]:
    """Two-column ``k_n  trace`` files, one per algorithm with data."""
    if not rows:
        raise DomainError("no rows to write")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for alg in ALGORITHMS:
        pairs = [
            (row.k_n, getattr(row, f"{alg}_trace"))
            for row in rows
            if getattr(row, f"{alg}_trace") is not None
        ]
        if not pairs:
            continue
        path = directory / f"{alg}.dat"
        body = "\n".join(f"{repr(k)} {repr(v)}" for k, v in pairs)
        try:
            path.write_text(body + "\n", encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write plot data to {path}: {exc}") from exc
        written.append(path)
    return written
