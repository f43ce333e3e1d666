#!/usr/bin/env python3
"""Where do the closed-form cutoff estimates miss the exact optimum?

Sweeps each rounded estimator against the exact argmax over its natural
count model and prints the misses with their margins, e.g.

    python scripts/failure_scan.py --to 3000
    python scripts/failure_scan.py --estimator lambertuniform --to 10000
"""

import argparse
import sys

sys.path.insert(0, "src")

from secstop.estimate import EstimatorId  # noqa: E402
from secstop.lab import scan_estimator_failures  # noqa: E402

UNIFORM = (
    EstimatorId.ROUND_N_THETA,
    EstimatorId.AFFINE_THETA,
    EstimatorId.LAMBERT_UNIFORM,
)
POISSON = (EstimatorId.HALF_LAMBDA_MINUS_ONE, EstimatorId.R_STAR_LAMBDA)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--estimator", choices=[e.value.lower() for e in EstimatorId])
    ap.add_argument("--from", dest="lo", type=int, default=2)
    ap.add_argument("--to", type=int, default=3000)
    ap.add_argument("--poisson-to", type=int, default=200,
                    help="separate upper end for the rate-model estimators")
    args = ap.parse_args()

    todo = list(UNIFORM) + list(POISSON)
    if args.estimator:
        todo = [e for e in todo if e.value.lower() == args.estimator]

    for est in todo:
        hi = args.to if est in UNIFORM else min(args.to, args.poisson_to)
        scan = scan_estimator_failures(est, args.lo, hi)
        print(f"{est.value} on [{scan.n_min}, {scan.n_max}]: "
              f"{len(scan.failures)} misses, max deviation {scan.max_deviation}")
        for n, rounded, exact in scan.details:
            print(f"    n={n:<6d} rounds to {rounded:<6d} exact M = {exact}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
