#!/usr/bin/env python
import argparse
import sys

from basis_speed_limits import oracle


def main() -> int:
    """Minimize the cosine sum on the general unbiased regions and store the results as JSON."""
    parser = argparse.ArgumentParser()
    parser.add_argument(
        "-o",
        "--output-file",
        dest="output_file",
        default="cos_sum_minima.json",
        type=str,
        help="The output file",
    )
    parser.add_argument(
        "-d",
        "--dims",
        dest="dims",
        default=None,
        type=int,
        nargs="+",
        help=f"The dimensions to check (2..{oracle.MAX_GRID_DIM} by default)",
    )
    parser.add_argument(
        "-g",
        "--grid",
        dest="grid",
        default=oracle.DEFAULT_GRID_POINTS,
        type=int,
        help="Grid points along each axis",
    )
    parser.add_argument(
        "-w",
        "--workers",
        dest="workers",
        default=1,
        type=int,
        help="Number of worker processes",
    )
    parser.add_argument(
        "-s",
        "--show",
        dest="show",
        default=None,
        type=str,
        help="Print a previously saved file instead of running",
    )
    args = parser.parse_args()

    if args.show:
        results = oracle.load_results(args.show)
    else:
        results = oracle.run_general_bound(args.dims, args.grid, args.workers)
        oracle.save_results(results, args.output_file)

    for region, result in results:
        print(
            f"d={region.d} cap={region.sum_cap:.6f} min={result.min_value:.12f} "
            f"sqrt(d)={region.d ** 0.5:.12f}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
