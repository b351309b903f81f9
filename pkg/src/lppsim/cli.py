"""Command-line frontend.

Every run requires an explicit seed (no wall-clock seeding): the point of
the tool is reproducible verification, and every result file echoes the
fully resolved configuration so it can be rerun byte-for-byte.

Exit codes: 0 success, 1 runtime failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .experiments import (
    ConfigError,
    ExperimentConfig,
    config_from_dict,
    run_config,
)
from .lattice import LatticePoint, LineInterval, scaled_target
from .passage import line_to_point_profile, p2p_profile
from .weights import WeightField

_EXPERIMENT_COMMANDS = {
    "tail",
    "extrema",
    "stationarity",
    "association",
    "modulus",
    "corridor",
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=str, help="JSON config file (flags override)")
    p.add_argument("--seed", type=int, help="master seed (mandatory, no default)")
    p.add_argument("--N", type=int, help="system size")
    p.add_argument("--n-samples", dest="n_samples", type=int, help="replica count")
    p.add_argument("--threads", type=int, help="worker count (never affects output)")
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--trunc-const", dest="trunc_const", type=float)
    p.add_argument("--checkpoint-stride", dest="checkpoint_stride", type=int)
    p.add_argument("--out", type=str, help="output directory for result files")
    p.add_argument(
        "--dry-run",
        action="store_true",
        help="validate and print the resolved config without computing",
    )


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lppsim",
        description="Exponential last-passage percolation experiments",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tail", help="tail probability estimation")
    _add_common(p)
    p.add_argument("--geometry", choices=["p2p", "p2l"])
    p.add_argument("--direction", choices=["upper", "lower"])
    p.add_argument("--t", type=float)
    p.add_argument("--t-list", dest="t_list", type=float, nargs="+")
    p.add_argument("--s", type=float)
    p.add_argument("--fit-power", dest="fit_power", type=float)
    p.add_argument("--n-ladder", dest="n_ladder", type=int, nargs="+")

    p = sub.add_parser("extrema", help="running extrema of scaled profiles")
    _add_common(p)
    p.add_argument("--process", choices=["airy1", "airy2"])
    p.add_argument("--t-list", dest="t_list", type=float, nargs="+")

    p = sub.add_parser("stationarity", help="KS tests across spatial positions")
    _add_common(p)
    p.add_argument("--s-list", dest="s_list", type=float, nargs="+")

    p = sub.add_parser("association", help="covariance of two profile points")
    _add_common(p)
    p.add_argument("--s1", type=float)
    p.add_argument("--s2", type=float)

    p = sub.add_parser("modulus", help="modulus-of-continuity quantiles")
    _add_common(p)
    p.add_argument("--s-window", dest="s_window", type=float)
    p.add_argument("--delta-list", dest="delta_list", type=float, nargs="+")

    p = sub.add_parser("corridor", help="restricted vs unrestricted upper tail")
    _add_common(p)
    p.add_argument("--t", type=float)
    p.add_argument("--corridor-c", dest="corridor_c", type=float)

    p = sub.add_parser("profile", help="dump one passage-time profile as CSV")
    _add_common(p)
    p.add_argument("--geometry", choices=["p2p", "p2l"], default="p2p")
    p.add_argument("--s-lo", dest="s_lo", type=float, default=0.0)
    p.add_argument("--s-hi", dest="s_hi", type=float, default=1.0)

    p = sub.add_parser("geodesic", help="dump one geodesic path as CSV")
    _add_common(p)
    p.add_argument("--geometry", choices=["p2p", "p2l"], default="p2p")
    p.add_argument("--s", type=float, default=0.0)

    p = sub.add_parser("oracle-check", help="exact DP vs enumeration suite")
    _add_common(p)
    p.add_argument("--max-steps", dest="max_steps", type=int, default=12)
    p.add_argument("--cases", type=int, default=200)

    return ap


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge config file and flags (flags win); validate fully."""
    d: dict = {}
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ConfigError("config", "config file must hold a JSON object")
        d.update(loaded)
    for key in (
        "seed",
        "N",
        "n_samples",
        "threads",
        "batch_size",
        "trunc_const",
        "checkpoint_stride",
        "out",
        "geometry",
        "direction",
        "t",
        "t_list",
        "s",
        "s_list",
        "s1",
        "s2",
        "process",
        "s_window",
        "delta_list",
        "corridor_c",
        "fit_power",
        "n_ladder",
    ):
        v = getattr(args, key, None)
        if v is not None:
            d[key] = v
    d["experiment"] = args.command
    if "seed" not in d:
        raise ConfigError("seed", "a seed is mandatory (no wall-clock seeding)")
    return config_from_dict(d)


def _cmd_experiment(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    if args.dry_run:
        print(json.dumps(asdict(cfg), sort_keys=True, indent=2))
        return 0
    result = run_config(cfg)
    if cfg.out:
        print(f"wrote {cfg.out}/{cfg.experiment}-seed{cfg.seed}.json")
    else:
        print(json.dumps(asdict(result), sort_keys=True, indent=2))
    return 0


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise ConfigError(name, "required flag missing")


def _cmd_profile(args: argparse.Namespace) -> int:
    _require(args, "seed", "N")
    N = args.N
    f = WeightField(args.seed)
    lo = scaled_target(N, args.s_hi, allow_outside_cone=args.geometry == "p2l")
    hi = scaled_target(N, args.s_lo, allow_outside_cone=args.geometry == "p2l")
    if args.dry_run:
        print(json.dumps({"psi_lo": lo.x - lo.y, "psi_hi": hi.x - hi.y}, indent=2))
        return 0
    if args.geometry == "p2p":
        prof = p2p_profile(f, LatticePoint(0, 0), 2 * N, lo.x - lo.y, hi.x - hi.y)
    else:
        margin = int(6 * float(N * N) ** (1.0 / 3.0))
        prof = line_to_point_profile(
            f, 0, lo.x - lo.y - margin, hi.x - hi.y + margin, 2 * N,
            lo.x - lo.y, hi.x - hi.y,
        )
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"profile-{args.geometry}-N{N}-seed{args.seed}.csv"
    path.write_text(prof.to_csv())
    print(f"wrote {path}")
    return 0


def _cmd_geodesic(args: argparse.Namespace) -> int:
    from .geodesic import backtrack

    _require(args, "seed", "N")
    N = args.N
    f = WeightField(args.seed)
    target = scaled_target(N, args.s)
    if args.dry_run:
        print(json.dumps({"target": [target.x, target.y]}, indent=2))
        return 0
    if args.geometry == "p2p":
        g = backtrack(f, LatticePoint(0, 0), target)
    else:
        margin = int(6 * float(N * N) ** (1.0 / 3.0))
        psi_t = target.x - target.y
        iv = LineInterval(0, psi_t - margin, psi_t + margin)
        g = backtrack(f, iv, target)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"geodesic-{args.geometry}-N{N}-seed{args.seed}.csv"
    path.write_text(g.to_csv())
    print(f"wrote {path}")
    return 0


def _cmd_oracle_check(args: argparse.Namespace) -> int:
    from .lattice import psi as psi_of
    from .oracle import brute_force_passage

    _require(args, "seed")
    if args.dry_run:
        print(json.dumps({"cases": args.cases, "max_steps": args.max_steps}, indent=2))
        return 0
    from .passage import p2p as p2p_value

    rng = np.random.default_rng(args.seed)
    failures = 0
    for _ in range(args.cases):
        f = WeightField(int(rng.integers(0, 2**63)))
        total = int(rng.integers(2, args.max_steps + 1))
        m = int(rng.integers(0, total + 1))
        n = total - m
        tgt = LatticePoint(m, n)
        got = p2p_value(f, LatticePoint(0, 0), tgt)
        want, _ = brute_force_passage(f, LatticePoint(0, 0), tgt)
        if got != want:
            failures += 1
            continue
        iv = LineInterval(0, psi_of(tgt) - 4, psi_of(tgt) + 4)
        prof = line_to_point_profile(
            f, 0, iv.psi_lo, iv.psi_hi, m + n, psi_of(tgt), psi_of(tgt)
        )
        want2, _ = brute_force_passage(f, iv, tgt)
        if float(prof.values[0]) != want2:
            failures += 1
    if failures:
        print(f"oracle-check: {failures}/{args.cases} mismatches")
        return 1
    print(f"oracle-check: all {args.cases} cases bitwise equal")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command in _EXPERIMENT_COMMANDS:
            return _cmd_experiment(args)
        if args.command == "profile":
            return _cmd_profile(args)
        if args.command == "geodesic":
            return _cmd_geodesic(args)
        return _cmd_oracle_check(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
