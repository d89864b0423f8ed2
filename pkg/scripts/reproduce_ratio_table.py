#!/usr/bin/env python3
"""Print alpha_j / (j! 2^j / (2 j^2)) for j = 1..jmax next to the reference digits."""

import argparse
import time

import mpmath

from mertens.constants import ratio_table, rh_refinement_diagnostic
from mertens.verify import load_reference_ratios


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--jmax", type=int, default=26)
    ap.add_argument("--prec", type=int, default=192)
    ap.add_argument("--diagnostic", action="store_true", help="also print (ratio - 1) (4/3)^j")
    args = ap.parse_args()

    ref = load_reference_ratios()
    t0 = time.perf_counter()
    rows = ratio_table(args.jmax, args.prec)
    print(f"{'j':>3}  {'ratio':<24}  {'reference':<10}  in [d, d + 1e-6)")
    for j, r in rows:
        d = ref.get(j)
        inside = "" if d is None else ("yes" if mpmath.mpf(d) <= r < mpmath.mpf(d) + mpmath.mpf("1e-6") else "NO")
        print(f"{j:>3}  {mpmath.nstr(r, 20):<24}  {d or '':<10}  {inside}")
    if args.diagnostic:
        print("\n  j  (ratio - 1) (4/3)^j")
        for j, _, v in rh_refinement_diagnostic(range(10, args.jmax + 1), args.prec):
            print(f"{j:>3}  {mpmath.nstr(v, 8)}")
    print(f"\n{time.perf_counter() - t0:.1f}s at {args.prec} bits")


if __name__ == "__main__":
    main()
