"""Bound dominance over seeded random Gaussian-sum potentials.

Every admissible family is checked against one integration per (potential, E);
violations are listed with the offending inequality.
"""

import argparse
import sys
import time

from szscatter import verify
from szscatter.engine import Tolerances


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--potentials", type=int, default=200)
    ap.add_argument("--energies", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--slack", type=float, default=1e-9)
    ap.add_argument("--tighten", type=float, default=1.0)
    args = ap.parse_args()

    t0 = time.perf_counter()
    tol = Tolerances().tightened(args.tighten) if args.tighten != 1.0 else Tolerances()
    checks = verify.dominance_suite(args.potentials, args.energies, args.seed,
                                    tolerances=tol, slack=args.slack)
    report = verify.VerifyReport(checks, time.perf_counter() - t0)
    print(report.summary())
    by_family = {}
    for c in checks:
        by_family.setdefault(str(c.family), []).append(c.passed)
    for fam, oks in sorted(by_family.items()):
        print(f"  {fam:<12} {sum(oks)}/{len(oks)}")
    sys.exit(0 if report.ok else 1)


if __name__ == "__main__":
    main()
