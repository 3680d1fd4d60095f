"""Command line entry point: ``unifbw <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from unifbw import harness
from unifbw.bandwidth import cv_table, indicator_weight
from unifbw.density import density_grid, lscv_bandwidth, pr_density
from unifbw.el import log_ratio
from unifbw.kernels import KERNEL_NAMES, get_kernel
from unifbw.model import Cell, Dataset, SimulationModel, centring_m

log = logging.getLogger("unifbw")


def _int_list(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.split(",") if x.strip())


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{x:.17g}"
    return str(x)


def _emit(fh, header, rows) -> None:
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(_fmt(v) for v in row) + "\n")


def cmd_simulate(args) -> int:
    values = {}
    if args.config:
        values.update(harness.load_config_file(args.config))
    flag_map = {
        "sizes": args.sizes, "reps": args.reps, "delta": args.delta, "grid_z": args.grid_z,
        "grid_t": args.grid_t, "grid_h": args.grid_h, "eps": args.eps, "kernel": args.kernel,
        "seed": args.seed, "out": args.out, "svg": args.svg, "workers": args.workers,
    }
    values.update({k: v for k, v in flag_map.items() if v is not None})
    if args.density:
        values["density"] = True
    if args.timing:
        values["timing"] = True
    config = harness.StudyConfig(**values)
    _, summary = harness.run_study(config)
    _emit(sys.stdout, ["n", "median", "iqr", "flagged"], [(s["n"], s["median"], s["iqr"], s["flagged"]) for s in summary])
    return 0


def cmd_calibrate(args) -> int:
    h = args.h if args.h is not None else args.n ** -0.2
    cell = Cell(args.t, args.z, h)
    cov = harness.calibration_study(args.n, args.reps, cell, args.seed, args.kernel)
    _emit(sys.stdout, ["n", "reps", "t", "z", "h", "coverage"], [(args.n, args.reps, args.t, args.z, h, cov)])
    return 0


def cmd_sup_trend(args) -> int:
    rows = harness.sup_ratio_trend(
        sizes=args.sizes, seed=args.seed, kernel_name=args.kernel, delta=args.delta,
        z_points=args.z_points, h_points=args.h_points,
    )
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        _emit(out, ["n", "h_lo", "h_hi", "sup_stat", "target", "ratio"],
              [(r.n, r.h_lo, r.h_hi, r.sup_stat, r.target, r.ratio) for r in rows])
    finally:
        if args.out:
            out.close()
    return 0


def cmd_el_stat(args) -> int:
    data = Dataset.from_csv(args.input)
    kernel = get_kernel(args.kernel)
    cell = Cell(args.t, args.z, args.h)
    theta = centring_m(SimulationModel(), cell, kernel) if args.model_centring else args.theta
    sol = log_ratio(data, cell, theta, kernel)
    _emit(sys.stdout, ["lambda", "log_r", "minus_2_log_r", "hull_ok"],
          [(sol.lam, sol.log_r, sol.minus_2_log_r, sol.hull_ok)])
    return 0


def cmd_cv_bandwidth(args) -> int:
    data = Dataset.from_csv(args.input)
    kernel = get_kernel(args.kernel)
    hs, scores = cv_table(data, args.delta, args.grid_size, indicator_weight(args.w_lo, args.w_hi), kernel)
    if np.all(np.isnan(scores)):
        log.error("every bandwidth on the grid is infeasible")
        return 1
    best = int(np.nanargmin(scores))
    _emit(sys.stdout, ["h", "cv", "selected"], [(h, s, j == best) for j, (h, s) in enumerate(zip(hs, scores))])
    return 0


def _read_values(path) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    try:
        col = next(header.index(c) for c in ("value", "sup_stat", "x") if c in header)
        vals = [float(r[col]) for r in rows if r and r[col] != ""]
    except StopIteration:
        # headerless single column
        vals = [float(header[0])] + [float(r[0]) for r in rows if r]
    vals = np.array(vals)
    return vals[np.isfinite(vals)]


def cmd_density(args) -> int:
    xs = _read_values(args.input)
    h = args.bandwidth if args.bandwidth else lscv_bandwidth(xs)
    est = pr_density(xs, h, density_grid(xs, h, args.grid_points))
    harness.write_density_csv(est.grid, est.values, args.out)
    print(f"bandwidth,{h:.17g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="unifbw", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="Monte Carlo study of the sup statistic")
    s.add_argument("--config", help="key=value file; command line flags override it")
    s.add_argument("--sizes", type=_int_list)
    s.add_argument("--reps", type=int)
    s.add_argument("--delta", type=float)
    s.add_argument("--grid-z", type=int)
    s.add_argument("--grid-t", type=int)
    s.add_argument("--grid-h", type=int)
    s.add_argument("--eps", type=float)
    s.add_argument("--kernel", choices=KERNEL_NAMES)
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.add_argument("--svg", help="directory for an SVG plot of the density curves")
    s.add_argument("--density", action="store_true", help="write per-n density CSVs")
    s.add_argument("--workers", type=int)
    s.add_argument("--timing", action="store_true", help="record runtime_ms (output no longer reproducible)")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("calibrate", help="chi-square(1) coverage of -2 log R_n at one cell")
    c.add_argument("--n", type=int, default=2000)
    c.add_argument("--reps", type=int, default=500)
    c.add_argument("--t", type=float, default=1.5)
    c.add_argument("--z", type=float, default=0.5)
    c.add_argument("--h", type=float, help="default n^(-1/5)")
    c.add_argument("--seed", type=int, default=7)
    c.add_argument("--kernel", choices=KERNEL_NAMES, default="epanechnikov")
    c.set_defaults(func=cmd_calibrate)

    t = sub.add_parser("theorem1-trend", help="normalized sup of |W_n(Id)| against its a.s. limit")
    t.add_argument("--sizes", type=_int_list, default=(1000, 10000, 100000))
    t.add_argument("--seed", type=int, default=11)
    t.add_argument("--delta", type=float, default=0.05)
    t.add_argument("--z-points", type=int, default=101)
    t.add_argument("--h-points", type=int, default=5)
    t.add_argument("--kernel", choices=KERNEL_NAMES, default="epanechnikov")
    t.add_argument("--out")
    t.set_defaults(func=cmd_sup_trend)

    e = sub.add_parser("el-stat", help="EL ratio at one cell for a y,z CSV")
    e.add_argument("--input", required=True)
    e.add_argument("--t", type=float, required=True)
    e.add_argument("--z", type=float, required=True)
    e.add_argument("--h", type=float, required=True)
    g = e.add_mutually_exclusive_group(required=True)
    g.add_argument("--theta", type=float)
    g.add_argument("--model-centring", action="store_true", help="theta = m(C,h,z) under the simulation model")
    e.add_argument("--kernel", choices=KERNEL_NAMES, default="epanechnikov")
    e.set_defaults(func=cmd_el_stat)

    b = sub.add_parser("cv-bandwidth", help="leave-one-out CV bandwidth for Nadaraya-Watson")
    b.add_argument("--input", required=True)
    b.add_argument("--delta", type=float, default=0.05)
    b.add_argument("--grid-size", type=int, default=30)
    b.add_argument("--w-lo", type=float, default=0.25)
    b.add_argument("--w-hi", type=float, default=0.75)
    b.add_argument("--kernel", choices=KERNEL_NAMES, default="epanechnikov")
    b.set_defaults(func=cmd_cv_bandwidth)

    d = sub.add_parser("density", help="Parzen-Rosenblatt density with LSCV bandwidth")
    d.add_argument("--input", required=True)
    d.add_argument("--grid-points", type=int, default=256)
    d.add_argument("--bandwidth", type=float)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_density)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
