"""Sup-statistic study at delta = 1/20 and delta = 1/10 with density curves and SVG plots.

Usage: python scripts/reproduce_figures.py [--outdir results] [--reps 100] [--workers 4]
"""

import argparse
from pathlib import Path

from unifbw.harness import StudyConfig, run_study


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--outdir", default="results")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    outdir = Path(args.outdir)
    for tag, delta in (("delta20", 1 / 20), ("delta10", 1 / 10)):
        config = StudyConfig(
            reps=args.reps, delta=delta, seed=args.seed, workers=args.workers,
            out=str(outdir / f"study_{tag}.csv"), svg=str(outdir / "figs"), density=True,
        )
        _, summary = run_study(config)
        print(f"delta={delta:g}")
        print("n,median,iqr,flagged")
        for s in summary:
            print(f"{s['n']},{s['median']:.4f},{s['iqr']:.4f},{s['flagged']}")


if __name__ == "__main__":
    main()
