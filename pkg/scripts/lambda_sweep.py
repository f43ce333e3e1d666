#!/usr/bin/env python3
"""Sweep the Poisson rate and trace M(lambda) and P(lambda) for one variant.

The best-or-worst curve has three features worth eyeballing: the interior
success maximum at lambda_m = 2.0177 with P = 0.72647; the rate
lambda0 = 2.2197715 where the conditional step-1 accept/reject comparison
flips sign; and the much later boundary near lambda = 4.832 where the
unconstrained argmax finally leaves 0 (jumping straight to M = 2).

    python scripts/lambda_sweep.py --from 0.5 --to 6 --step 0.1
"""

import argparse
import sys

sys.path.insert(0, "src")

from secstop.core_model import Poisson, Variant  # noqa: E402
from secstop.estimate import lambda0, lambda_m  # noqa: E402
from secstop.exact import best_cutoff  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--variant", default="bw", choices=[v.value for v in Variant])
    ap.add_argument("--from", dest="lo", type=float, default=0.5)
    ap.add_argument("--to", type=float, default=6.0)
    ap.add_argument("--step", type=float, default=0.1)
    args = ap.parse_args()

    variant = Variant(args.variant)
    steps = int(round((args.to - args.lo) / args.step))
    print(f"{'lambda':>8}  {'M':>4}  {'P':>16}")
    for i in range(steps + 1):
        lam = args.lo + i * args.step
        rep = best_cutoff(variant, Poisson(lam))
        print(f"{lam:8.3f}  {rep.cutoff:4d}  {rep.prob:16.12f}")

    if variant is Variant.BEST_OR_WORST:
        lm, plm = lambda_m()
        print(f"\nstep-1 accept/reject comparison flips at lambda0 = {lambda0():.10f}")
        print(f"success peaks at lambda_m = {lm:.10f} with P = {plm:.12f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
