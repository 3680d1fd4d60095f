"""Chi-square(1) coverage of -2 log R_n at the centring parameter over a few sample sizes.

Usage: python scripts/calibration.py [--sizes 500,1000,2000] [--reps 500]
"""

import argparse

from unifbw.harness import calibration_study
from unifbw.model import Cell


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", default="500,1000,2000")
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--t", type=float, default=1.5)
    p.add_argument("--z", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=7)
    args = p.parse_args()
    print("n,h,coverage")
    for n in (int(s) for s in args.sizes.split(",")):
        h = n ** -0.2
        cov = calibration_study(n, args.reps, Cell(args.t, args.z, h), args.seed)
        print(f"{n},{h:.6f},{cov:.4f}")


if __name__ == "__main__":
    main()
