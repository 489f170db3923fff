#!/usr/bin/env python3
"""Solve one random instance with every position solver and print a summary:
final MSE, rounds used, and per-solver position-step iteration counts."""

import argparse

import numpy as np

from fluidaircomp.driver import METHODS, AoOptions, ao_optimize
from fluidaircomp.model import sample_scenario


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--N", type=int, default=10)
    parser.add_argument("--K", type=int, default=10)
    parser.add_argument("--snr-db", type=float, default=-10.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--rounds", type=int, default=100)
    args = parser.parse_args()

    scenario = sample_scenario(args.N, args.K, args.snr_db, seed=args.seed)
    print(f"N={args.N} K={args.K} SNR={args.snr_db:+.0f} dB seed={args.seed}")
    print(f"{'method':6s} {'mse':>12s} {'rounds':>7s} {'inner':>7s} "
          f"{'seconds':>8s}  status")
    for method in METHODS:
        report = ao_optimize(scenario, AoOptions(method=method,
                                                 max_rounds=args.rounds))
        inner = sum(report.inner_iterations)
        print(f"{method:6s} {report.state.mse:12.6f} {report.rounds:7d} "
              f"{inner:7d} {report.seconds:8.2f}  {report.status}")
        final = report.state
        assert np.all(np.abs(final.b) ** 2 <= scenario.powers + 1e-12)


if __name__ == "__main__":
    main()
