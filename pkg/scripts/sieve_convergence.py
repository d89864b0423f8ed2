#!/usr/bin/env python3
"""Residuals |R_k(x) - expansion truncated at N| against the Omega sieve."""

import argparse
import math

from mertens.verify import CONVERGENCE_GRID, convergence_grid


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, nargs="*", default=[2, 3, 4])
    ap.add_argument("--prec", type=int, default=192)
    args = ap.parse_args()

    for k in args.k:
        Ns, xs = CONVERGENCE_GRID[k]
        g = convergence_grid(k, Ns, xs, args.prec)
        print(f"k = {k}")
        print("  " + f"{'x':>10}" + "".join(f"{'N=' + str(N):>12}" for N in g["Ns"]))
        for x in g["xs"]:
            print("  " + f"{x:>10.0e}" + "".join(f"{g['residual'][(x, N)]:>12.3e}" for N in g["Ns"]))
        print("  C = residual * log^(N+1) x:")
        for x in g["xs"]:
            cs = [g["residual"][(x, N)] * math.log(x) ** (N + 1) for N in g["Ns"]]
            print("  " + f"{x:>10.0e}" + "".join(f"{c:>12.3e}" for c in cs))
        print(f"  decreasing in N: {g['monotone_in_N']}")
        print(f"  decreasing in x: {g['monotone_in_x']}")
        print(f"  envelope spread: { {N: round(s, 2) for N, s in g['envelope_spread'].items()} }\n")


if __name__ == "__main__":
    main()
