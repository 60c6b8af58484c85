"""Command-line front end.

Subcommands::

    qobs sweep  --scenario {s1|s2|s3|custom} [...] --out FILE.csv
    qobs design --plant FILE.json --algorithm {alg1|alg2|alg3|classical} --out FILE.json
    qobs check  --system FILE.json

Exit codes: 0 success, 1 usage error, 2 numerical failure (including a failed
realizability check), 3 IO or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import FileFormatError, QobsError
from .observers import (
    design_algorithm1,
    design_algorithm2,
    design_algorithm3,
    design_classical,
)
from .realizability import min_vacuum_rank, skew_riccati_transform, stilde
from .sweep import (
    ALGORITHMS,
    SCENARIOS,
    ScenarioConfig,
    default_kn_grid,
    emit_csv,
    emit_plot_data,
    run_sweep,
)
from .systems import load_system

USAGE_ERROR, NUMERICAL_ERROR, IO_ERROR = 1, 2, 3


class _UsageError(Exception):
    """Flag combinations argparse cannot express; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; this CLI reserves 2 for
    # numerical failures, so route usage errors to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="qobs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qobs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser(
        "sweep", help="compare observers across a thermal-intensity grid"
    )
    p_sweep.add_argument(
        "--scenario", choices=[*sorted(SCENARIOS), "custom"], default="s1"
    )
    p_sweep.add_argument("--kappa1", type=float, help="required for --scenario custom")
    p_sweep.add_argument("--kappa2", type=float, help="required for --scenario custom")
    p_sweep.add_argument("--kn-min", type=float, default=None)
    p_sweep.add_argument("--kn-max", type=float, default=None)
    p_sweep.add_argument("--kn-points", type=int, default=None)
    p_sweep.add_argument(
        "--algorithms",
        default=",".join(ALGORITHMS),
        help=f"comma-separated subset of {','.join(ALGORITHMS)}",
    )
    p_sweep.add_argument("--out", required=True, help="CSV destination")
    p_sweep.add_argument(
        "--plot-dir", default=None, help="also write two-column k_n/trace files here"
    )
    p_sweep.set_defaults(func=_cmd_sweep)

    p_design = sub.add_parser("design", help="design one observer for a plant file")
    p_design.add_argument("--plant", required=True)
    p_design.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    p_design.add_argument("--out", required=True)
    p_design.set_defaults(func=_cmd_design)

    p_check = sub.add_parser(
        "check", help="physical-realizability report for a system file"
    )
    p_check.add_argument("--system", required=True)
    p_check.set_defaults(func=_cmd_check)
    return parser


def _sweep_grid(args) -> tuple[float, ...]:
    custom = [args.kn_min, args.kn_max, args.kn_points]
    if all(v is None for v in custom):
        return default_kn_grid()
    if any(v is None for v in custom):
        raise _UsageError("--kn-min, --kn-max and --kn-points must be given together")
    if args.kn_points < 2 or args.kn_max <= args.kn_min or args.kn_min < 0:
        raise _UsageError("need kn-points >= 2 and 0 <= kn-min < kn-max")
    if args.kn_min == 0:
        # log spacing needs a positive start; keep the requested zero point
        grid = np.concatenate(
            [[0.0], np.logspace(np.log10(1e-3), np.log10(args.kn_max), args.kn_points - 1)]
        )
    else:
        grid = np.logspace(np.log10(args.kn_min), np.log10(args.kn_max), args.kn_points)
    return tuple(float(k) for k in grid)


def _cmd_sweep(args) -> int:
    if args.scenario == "custom":
        if args.kappa1 is None or args.kappa2 is None:
            raise _UsageError("--scenario custom requires --kappa1 and --kappa2")
        kappa1, kappa2 = args.kappa1, args.kappa2
    else:
        kappa1, kappa2 = SCENARIOS[args.scenario]
    algorithms = tuple(a for a in args.algorithms.split(",") if a)
    config = ScenarioConfig(
        kappa1=kappa1, kappa2=kappa2, kn_grid=_sweep_grid(args), algorithms=algorithms
    )
    rows = run_sweep(config)
    emit_csv(rows, args.out)
    sidecar = {
        "kappa1": config.kappa1,
        "kappa2": config.kappa2,
        "algorithms": list(config.algorithms),
        "kn_points": len(config.kn_grid),
        "matrix_norm": "frobenius",
        "scenario": args.scenario,
        "tool": f"qobs {__version__}",
    }
    Path(str(args.out) + ".meta.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    if args.plot_dir:
        emit_plot_data(rows, args.plot_dir)
    failures = sum(bool(row.errors) for row in rows)
    print(f"wrote {len(rows)} rows to {args.out}" + (f" ({failures} rows carry designer errors)" if failures else ""))
    return 0


def _matrix(M: np.ndarray) -> list:
    return np.asarray(M).tolist()


def _cmd_design(args) -> int:
    plant = load_system(args.plant)
    if args.algorithm == "classical":
        obs = design_classical(plant)
        payload = {
            "n_x": plant.n_x,
            "A": _matrix(obs.A_hat),
            "B": _matrix(obs.K),
            "C": _matrix(np.eye(plant.n_x)),
            "D": _matrix(np.zeros((plant.n_x, plant.n_y))),
            "channels": [{"kind": "vacuum"} for _ in range(plant.n_y // 2)],
            "provenance": {"algorithm": "classical"},
            "K": _matrix(obs.K),
        }
    else:
        if args.algorithm == "alg1":
            obs = design_algorithm1(plant)
            extra = {}
        elif args.algorithm == "alg2":
            obs, rho_opt, _ = design_algorithm2(plant)
            extra = {"rho": rho_opt}
        else:
            obs, reason = design_algorithm3(plant)
            extra = {"transformed": bool(obs.provenance.transformed)}
            if reason is not None:
                extra["fallback_reason"] = reason
        payload = {
            "n_x": plant.n_x,
            "A": _matrix(obs.A_hat),
            "B": _matrix(obs.B_hat),
            "C": _matrix(obs.C_hat),
            "D": _matrix(np.zeros((obs.C_hat.shape[0], obs.B_hat.shape[1]))),
            "channels": [{"kind": "vacuum"} for _ in range(obs.B_hat.shape[1] // 2)],
            "B_v1": _matrix(obs.B_v1),
            "B_v2": _matrix(obs.B_v2),
            "noise_gain_v1": _matrix(obs.noise_gain_v1),
            "n_v2": obs.n_v2,
            "provenance": {"algorithm": obs.provenance.algorithm, **extra},
        }
        if obs.transform is not None:
            payload["transform"] = {
                "T": _matrix(obs.transform.T),
                "X": _matrix(obs.transform.X),
                "A_tilde": _matrix(obs.transform.A_tilde),
                "B_tilde": _matrix(obs.transform.B_tilde),
                "C_tilde": _matrix(obs.transform.C_tilde),
                "B_v1_tilde": _matrix(obs.transform.B_v1_tilde),
            }
    Path(args.out).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {args.algorithm} observer to {args.out}")
    return 0


def check_system(path) -> int:
    """Realizability report for a system description file.

    Prints the commutation residual norm, the commutation-defect matrix and
    its rank (the minimal number of extra vacuum quadratures), and whether
    the zero-extra-channel state transformation exists. Returns 0 exactly
    when the residual norm is at most 1e-8.
    """
    sys_ = load_system(path)
    res_norm = float(np.linalg.norm(sys_.residual()))
    S_t = stilde(sys_.A, sys_.B, sys_.C, sys_.theta)
    n_v2 = min_vacuum_rank(S_t)
    print(f"commutation residual norm: {res_norm:.6e}")
    print("commutation defect matrix:")
    print(np.array2string(S_t, precision=6, suppress_small=True))
    print(f"minimal extra vacuum quadratures (n_v2): {n_v2}")
    try:
        skew_riccati_transform(sys_.A, sys_.B, sys_.C, sys_.theta)
    except QobsError as exc:
        print(f"state transformation (n_v2 = 0): failed ({exc.reason_code})")
    else:
        print("state transformation (n_v2 = 0): success")
    ok = res_norm <= 1e-8
    print(f"physically realizable: {'yes' if ok else 'no'}")
    return 0 if ok else NUMERICAL_ERROR


def _cmd_check(args) -> int:
    return check_system(args.system)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"qobs: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except FileFormatError as exc:
        print(f"qobs: {exc}", file=sys.stderr)
        return IO_ERROR
    except OSError as exc:
        print(f"qobs: {exc}", file=sys.stderr)
        return IO_ERROR
    except QobsError as exc:
        print(f"qobs: {exc.reason_code}: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
