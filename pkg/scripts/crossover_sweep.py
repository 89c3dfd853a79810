"""Case 1 vs Case 2b reflection caps on sech^2 barriers across energy.

For the sech^2 family the two caps trade places near
E_x = hbar^2 (V_ext - V_inf)^2 / (2 m I^2), I = int |V - V_inf| dx.
"""

import argparse

import numpy as np

from szscatter import catalog
from szscatter.bounds import case1_bound, crossover_energy, profile_bound
from szscatter.engine import integrate
from szscatter.potentials import DEFAULT_UNITS as U


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--V-e", type=float, nargs="+", default=[0.02, 0.1, 0.3])
    ap.add_argument("--L", type=float, default=1.0)
    ap.add_argument("--n", type=int, default=12)
    args = ap.parse_args()

    print("V_e,E,E_over_Ex,R_numeric,R_cap_case1,R_cap_case2b,tighter")
    for V_e in args.V_e:
        pot = catalog.sech2_potential(V_e, args.L)
        Ex = crossover_energy(pot, V_e, U)
        for E in np.geomspace(1.05 * V_e, 50 * max(Ex, V_e), args.n).tolist():
            c1 = case1_bound(pot, U, E)[0].R_cap
            c2 = profile_bound(pot, U, E).R_cap
            R = integrate(pot, U, E).R
            print(f"{V_e!r},{E!r},{E / Ex!r},{R!r},{c1!r},{c2!r},"
                  f"{'Case1' if c1 < c2 else 'Case2b'}")


if __name__ == "__main__":
    main()
