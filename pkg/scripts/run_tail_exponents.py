#!/usr/bin/env python3
"""Tail-exponent experiment driver.

Estimates upper and lower tail probabilities on shared realizations, fits
the t^(3/2) and t^3 exponents, and writes result JSON/CSV files.  Scale it
down with --n-samples for a quick look; the acceptance-scale runs use
n >= 10^5.
"""
import argparse

from lppsim.experiments import ExperimentConfig, run_config


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--N", type=int, default=1000)
    ap.add_argument("--n-samples", type=int, default=20000)
    ap.add_argument("--ladder", type=int, nargs="*", default=[250, 500])
    ap.add_argument("--threads", type=int, default=2)
    ap.add_argument("--out", type=str, default="results/tails")
    args = ap.parse_args()

    grids = {
        ("p2p", "upper"): ([1.0, 1.5, 2.0], 1.5),
        ("p2l", "upper"): ([1.0, 1.5, 2.0], 1.5),
        ("p2p", "lower"): ([2.5, 3.0, 3.5], 3.0),
        ("p2l", "lower"): ([2.0, 2.4, 2.8], 3.0),
    }
    for (geometry, direction), (ts, power) in grids.items():
        cfg = ExperimentConfig(
            experiment="tail",
            seed=args.seed,
            N=args.N,
            n_samples=args.n_samples,
            geometry=geometry,
            direction=direction,
            t_list=ts,
            fit_power=power,
            n_ladder=args.ladder,
            threads=args.threads,
            batch_size=128,
            out=f"{args.out}/{geometry}-{direction}",
        )
        result = run_config(cfg)
        fit = result.statistics["main"].get("fit")
        label = f"{geometry} {direction}"
        if fit:
            print(f"{label}: coefficient {fit['coefficient']:.4f} "
                  f"+- {fit['stderr']:.4f} (power {power})")
        else:
            print(f"{label}: {result.statistics['main'].get('fit_error')}")


if __name__ == "__main__":
    main()
