"""Error of the Born, distorted Born and above-barrier beta against the ODE
on lambda-scaled sech^2 barriers, with the fitted log-log slopes."""

import argparse

import numpy as np

from szscatter import catalog
from szscatter.approximations import above_barrier_beta, born_beta, distorted_born_beta
from szscatter.engine import PhaseVariant, integrate
from szscatter.potentials import DEFAULT_UNITS as U

ESTIMATES = (("born", born_beta, PhaseVariant.CONSTANT_K),
             ("distorted_born", distorted_born_beta, PhaseVariant.CONSTANT_K),
             ("above_barrier", above_barrier_beta, PhaseVariant.WKB))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--V0", type=float, default=0.2)
    ap.add_argument("--E", type=float, default=1.0)
    ap.add_argument("--levels", type=int, default=6, help="lambda = 2^0 .. 2^-(levels-1)")
    args = ap.parse_args()

    lams = 2.0 ** -np.arange(args.levels)
    errs = {name: [] for name, *_ in ESTIMATES}
    print("lambda," + ",".join(f"err_{n}" for n in errs))
    for lam in lams.tolist():
        pot = catalog.sech2_potential(lam * args.V0, 1.0)
        row = []
        for name, fn, variant in ESTIMATES:
            e = abs(fn(pot, U, args.E).beta - integrate(pot, U, args.E, variant).beta)
            errs[name].append(e)
            row.append(repr(e))
        print(f"{lam!r}," + ",".join(row))
    for name, e in errs.items():
        slope = np.polyfit(np.log(lams), np.log(e), 1)[0]
        print(f"# {name:<15} slope {slope:.2f}")


if __name__ == "__main__":
    main()
