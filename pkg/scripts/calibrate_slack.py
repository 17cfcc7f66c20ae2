#!/usr/bin/env python
import argparse
import sys

from basis_speed_limits import bounds
from basis_speed_limits import montecarlo


def main() -> int:
    """Sample both qutrit classes over several seeds and print the excess over the bounds."""
    parser = argparse.ArgumentParser()
    parser.add_argument(
        "-n",
        "--samples",
        dest="samples",
        default=montecarlo.DEFAULT_SAMPLES,
        type=int,
        help="Samples per seed",
    )
    parser.add_argument(
        "-s",
        "--seeds",
        dest="seeds",
        default=[1, 2, 3, 4, 5],
        type=int,
        nargs="+",
        help="The seeds to run",
    )
    parser.add_argument(
        "-w",
        "--workers",
        dest="workers",
        default=1,
        type=int,
        help="Number of worker processes",
    )
    args = parser.parse_args()

    targets = [
        ("plus", montecarlo.sample_plus, bounds.unbiased_bound(3, 1.0).bound_value),
        ("tilde", montecarlo.sample_tilde, bounds.qutrit_tilde_bound(1.0).bound_value),
    ]
    for name, sample, bound_value in targets:
        excess = []
        for seed in args.seeds:
            histogram = sample(args.samples, seed, workers=args.workers)
            excess.append(histogram.min_et - bound_value)
            print(f"{name} seed={seed} min_et={histogram.min_et:.9f} excess={excess[-1]:.3e}")
        print(f"{name} bound={bound_value:.9f} min_excess={min(excess):.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
