#!/usr/bin/env python3
"""Profile-functional experiments: stationarity, association, modulus."""
import argparse

from lppsim.experiments import ExperimentConfig, run_config


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--N", type=int, default=500)
    ap.add_argument("--threads", type=int, default=2)
    ap.add_argument("--out", type=str, default="results/profiles")
    args = ap.parse_args()

    r = run_config(ExperimentConfig(
        experiment="stationarity", seed=args.seed, N=args.N, n_samples=2000,
        s_list=[0.0, 0.5, 1.0], threads=args.threads, batch_size=128,
        out=f"{args.out}/stationarity",
    ))
    for pair in r.statistics["pairs"]:
        print(f"stationarity s={pair['s1']} vs s={pair['s2']}: "
              f"KS p-value {pair['p_value']:.4f}")

    r = run_config(ExperimentConfig(
        experiment="association", seed=args.seed, N=args.N, n_samples=5000,
        s1=0.0, s2=0.5, threads=args.threads, batch_size=128,
        out=f"{args.out}/association",
    ))
    print(f"association: cov {r.statistics['covariance']:.4f}, "
          f"95% lower bound {r.statistics['lower_95']:.4f}")

    r = run_config(ExperimentConfig(
        experiment="modulus", seed=args.seed, N=2 * args.N, n_samples=200,
        s_window=1.0, delta_list=[0.01, 0.02, 0.04, 0.08, 0.16],
        threads=args.threads, batch_size=64, out=f"{args.out}/modulus",
    ))
    for row in r.statistics["per_delta"]:
        print(f"modulus delta={row['delta']}: median {row['median']:.4f}")


if __name__ == "__main__":
    main()
