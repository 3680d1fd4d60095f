"""Spread of the normalized sup |W_n(Id)| ratio across seeds, for judging the slow convergence.

Usage: python scripts/sup_ratio_seeds.py [--seeds 20] [--sizes 1000,10000,100000]
"""

import argparse

import numpy as np

from unifbw.harness import sup_ratio_trend


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--sizes", default="1000,10000,100000")
    args = p.parse_args()
    sizes = tuple(int(s) for s in args.sizes.split(","))
    ratios = np.array([[r.ratio for r in sup_ratio_trend(sizes=sizes, seed=s)] for s in range(args.seeds)])
    print("n,median_ratio,q10,q90")
    for j, n in enumerate(sizes):
        q10, med, q90 = np.percentile(ratios[:, j], [10, 50, 90])
        print(f"{n},{med:.4f},{q10:.4f},{q90:.4f}")
    closer = np.mean(np.abs(ratios[:, -1] - 1) < np.abs(ratios[:, 0] - 1))
    print(f"# fraction of seeds closer to 1 at n={sizes[-1]} than at n={sizes[0]}: {closer:.2f}")


if __name__ == "__main__":
    main()
