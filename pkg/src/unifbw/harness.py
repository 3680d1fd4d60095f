"""Monte Carlo study of the sup statistic, chi-square calibration and the W_n trend experiment."""

from __future__ import annotations

import dataclasses
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from unifbw.bandwidth import geometric_grid, paper_bandwidth_interval
from unifbw.density import density_grid, lscv_bandwidth, pr_density
from unifbw.el import _solution_from_weights, confidence_interval, log_ratio, normalized_statistic
from unifbw.estimators import identity_entry, sup_deviation
from unifbw.kernels import get_kernel
from unifbw.model import Cell, SimulationModel, centring_m, sample

log = logging.getLogger(__name__)

CHI2_1_95 = 3.841459
STUDY_HEADER = "n,rep,sup_stat,hull_failures,runtime_ms"
MODEL = SimulationModel()


@dataclass(frozen=True)
class StudyConfig:
    sizes: tuple[int, ...] = (50, 100, 500, 1000)
    reps: int = 100
    delta: float = 0.05
    grid_z: int = 5
    grid_t: int = 5
    grid_h: int = 2
    t_range: tuple[float, float] = (1.0, 2.0)
    seed: int = 42
    kernel: str = "epanechnikov"
    eps: float = 0.1
    out: str = "study.csv"
    svg: str | None = None
    density: bool = False
    workers: int = 1
    timing: bool = False

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if list(sizes) != sorted(sizes) or not sizes:
            raise ValueError("sizes must be a nonempty ascending list")
        if min(self.grid_z, self.grid_t, self.grid_h) < 1:
            raise ValueError("grid counts must be positive")
        if self.reps < 1:
            raise ValueError("reps must be positive")

    def replace(self, **kw) -> "StudyConfig":
        return dataclasses.replace(self, **kw)


@dataclass
class StudyRow:
    n: int
    rep: int
    sup_stat: float
    hull_failures: int
    runtime_ms: float | None = None

    @property
    def flagged(self) -> bool:
        return math.isinf(self.sup_stat)

    def csv(self) -> str:
        rt = "" if self.runtime_ms is None else f"{self.runtime_ms:.3f}"
        return f"{self.n},{self.rep},{self.sup_stat:.17g},{self.hull_failures},{rt}"


_INT_KEYS = {"reps", "grid_z", "grid_h", "grid_t", "seed", "workers"}
_FLOAT_KEYS = {"delta", "eps"}
_BOOL_KEYS = {"density", "timing"}


def parse_config_value(key: str, raw: str):
    raw = raw.strip()
    if key == "sizes":
        return tuple(int(s) for s in raw.split(",") if s.strip())
    if key == "t_range":
        lo, hi = (float(s) for s in raw.split(","))
        return (lo, hi)
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _BOOL_KEYS:
        return raw.lower() in {"1", "true", "yes", "on"}
    if key in {"kernel", "out", "svg"}:
        return raw or None
    raise KeyError(f"unknown config key {key!r}")


def load_config_file(path) -> dict:
    """key=value lines; blank lines and '#' comments are skipped."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        values[key] = parse_config_value(key, raw)
    return values


def study_grid(n: int, config: StudyConfig) -> list[Cell]:
    """Product grid: uniform in z over H and t over [1, 2], geometric in h over [h_n, h^n]."""
    h_lo, h_hi = paper_bandwidth_interval(n, config.delta)
    zs = np.linspace(MODEL.H[0], MODEL.H[1], config.grid_z) if config.grid_z > 1 else np.array([0.5])
    ts = np.linspace(*config.t_range, config.grid_t) if config.grid_t > 1 else np.array([np.mean(config.t_range)])
    hs = geometric_grid(h_lo, h_hi, config.grid_h)
    return [Cell(float(t), float(z), float(h)) for z in zs for h in hs for t in ts]


@lru_cache(maxsize=64)
def _centrings(n: int, config: StudyConfig) -> tuple[float, ...]:
    kernel = get_kernel(config.kernel)
    return tuple(centring_m(MODEL, cell, kernel) for cell in study_grid(n, config))


def replication_statistics(n: int, rep: int, config: StudyConfig) -> tuple[list[Cell], np.ndarray]:
    """Per-cell normalized statistic -log R_n(m) / log(1/h) for one simulated sample."""
    kernel = get_kernel(config.kernel)
    data = sample(MODEL, n, config.seed, rep)
    cells = study_grid(n, config)
    thetas = _centrings(n, config)
    stats = np.empty(len(cells))
    kcache = {}
    for j, (cell, theta) in enumerate(zip(cells, thetas)):
        key = (cell.z, cell.h)
        if key not in kcache:
            kcache[key] = kernel((data.z - cell.z) / cell.h)
        ind = (data.y <= cell.t).astype(float)
        sol = _solution_from_weights(kcache[key] * (ind - theta))
        stats[j] = normalized_statistic(sol, cell.h, kernel.d)
    return cells, stats


def run_replication(n: int, rep: int, config: StudyConfig) -> StudyRow:
    t0 = time.perf_counter()
    _, stats = replication_statistics(n, rep, config)
    failures = int(np.count_nonzero(np.isinf(stats)))
    finite = stats[np.isfinite(stats)]
    # Cells violating the hull condition are counted, not maximized over.
    sup = float(finite.max()) if finite.size else math.inf
    runtime = (time.perf_counter() - t0) * 1e3 if config.timing else None
    return StudyRow(n=n, rep=rep, sup_stat=sup, hull_failures=failures, runtime_ms=runtime)


def _run_task(args) -> StudyRow:
    n, rep, config = args
    return run_replication(n, rep, config)


def run_rows(config: StudyConfig) -> list[StudyRow]:
    tasks = [(n, rep, config) for n in config.sizes for rep in range(config.reps)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * config.workers))))
    else:
        rows = [_run_task(t) for t in tasks]
    rows.sort(key=lambda r: (r.n, r.rep))
    return rows


def summarize(rows: list[StudyRow]) -> list[dict]:
    out = []
    for n in sorted({r.n for r in rows}):
        vals = np.array([r.sup_stat for r in rows if r.n == n])
        finite = vals[np.isfinite(vals)]
        q25, med, q75 = np.percentile(finite, [25, 50, 75]) if finite.size else (math.nan,) * 3
        out.append(
            {
                "n": n,
                "reps": int(vals.size),
                "median": float(med),
                "q25": float(q25),
                "q75": float(q75),
                "iqr": float(q75 - q25),
                "flagged": int(vals.size - finite.size),
            }
        )
    return out


def write_rows(rows: list[StudyRow], path) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            fh.write(STUDY_HEADER + "\n")
            for r in rows:
                fh.write(r.csv() + "\n")
    except OSError as exc:
        raise OSError(f"cannot write study CSV to {path}: {exc}") from exc


def write_summary(summary: list[dict], path) -> None:
    path = Path(path)
    cols = ["n", "reps", "median", "q25", "q75", "iqr", "flagged"]
    try:
        with path.open("w", newline="") as fh:
            fh.write(",".join(cols) + "\n")
            for s in summary:
                fh.write(",".join(f"{s[c]:.17g}" if isinstance(s[c], float) else str(s[c]) for c in cols) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write summary CSV to {path}: {exc}") from exc


def write_density_csv(grid, values, path) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            fh.write("x,fhat\n")
            for x, f in zip(grid, values):
                fh.write(f"{x:.17g},{f:.17g}\n")
    except OSError as exc:
        raise OSError(f"cannot write density CSV to {path}: {exc}") from exc


def sup_densities(rows: list[StudyRow], points: int = 256) -> dict:
    """LSCV-bandwidth Epanechnikov density of the finite sup statistics, per n."""
    curves = {}
    for n in sorted({r.n for r in rows}):
        vals = np.array([r.sup_stat for r in rows if r.n == n and not r.flagged])
        if vals.size < 3 or np.ptp(vals) == 0:
            log.warning("n=%d: too few distinct finite values for a density estimate", n)
            continue
        h = lscv_bandwidth(vals)
        est = pr_density(vals, h, density_grid(vals, h, points))
        curves[n] = est
    return curves


def svg_lines(curves: dict, title: str, width: int = 640, height: int = 400) -> str:
    """Plain SVG line plot, one polyline per sample size."""
    pad = 50
    xs = np.concatenate([c.grid for c in curves.values()])
    ys = np.concatenate([c.values for c in curves.values()])
    x0, x1 = float(xs.min()), float(xs.max())
    y1 = float(ys.max()) or 1.0
    sx = lambda x: pad + (x - x0) / (x1 - x0 or 1.0) * (width - 2 * pad)
    sy = lambda y: height - pad - y / y1 * (height - 2 * pad)
    colors = ["#000000", "#999999", "#4477aa", "#555555", "#cc6677", "#117733"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{width / 2}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{title}</text>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{pad}" y="{height - pad + 18}" font-family="sans-serif" font-size="11">{x0:.2f}</text>',
        f'<text x="{width - pad}" y="{height - pad + 18}" text-anchor="end" font-family="sans-serif" font-size="11">{x1:.2f}</text>',
        f'<text x="{pad - 5}" y="{pad}" text-anchor="end" font-family="sans-serif" font-size="11">{y1:.2f}</text>',
    ]
    for j, (n, est) in enumerate(sorted(curves.items())):
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(est.grid, est.values))
        color = colors[j % len(colors)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        parts.append(
            f'<text x="{width - pad - 5}" y="{pad + 15 * (j + 1)}" text-anchor="end" fill="{color}" '
            f'font-family="sans-serif" font-size="12">n={n}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def run_study(config: StudyConfig) -> tuple[list[StudyRow], list[dict]]:
    """Runs every (n, rep), writes the study CSV plus a summary, and optionally the density curves."""
    rows = run_rows(config)
    summary = summarize(rows)
    out = Path(config.out)
    write_rows(rows, out)
    write_summary(summary, out.with_name(out.stem + "_summary.csv"))
    if config.density or config.svg:
        curves = sup_densities(rows)
        for n, est in curves.items():
            write_density_csv(est.grid, est.values, out.with_name(f"{out.stem}_density_n{n}.csv"))
        if config.svg and curves:
            svg_dir = Path(config.svg)
            svg_dir.mkdir(parents=True, exist_ok=True)
            (svg_dir / f"{out.stem}_density.svg").write_text(
                svg_lines(curves, f"sup statistic density, delta={config.delta:g}")
            )
    return rows, summary


def calibration_study(
    n: int, reps: int, cell: Cell, seed: int, kernel_name: str = "epanechnikov", level: float = CHI2_1_95
) -> float:
    """Fraction of replications with -2 log R_n(m(C, h, z)) <= level."""
    kernel = get_kernel(kernel_name)
    theta = centring_m(MODEL, cell, kernel)
    hits = 0
    for rep in range(reps):
        sol = log_ratio(sample(MODEL, n, seed, rep), cell, theta, kernel)
        if sol.hull_ok and sol.minus_2_log_r <= level:
            hits += 1
    return hits / reps


def joint_interval_coverage(n: int, config: StudyConfig) -> np.ndarray:
    """Per replication: True when every grid cell's interval at c = h^{d+eps} contains m(C, h, z)."""
    kernel = get_kernel(config.kernel)
    out = np.empty(config.reps, dtype=bool)
    for rep in range(config.reps):
        _, stats = replication_statistics(n, rep, config)
        # m in I_n(c) with c = h^{d+eps} exactly when -log R_n(m) / log(h^{-d}) <= 1 + eps/d.
        out[rep] = bool(np.all(stats <= 1.0 + config.eps / kernel.d))
    return out


def interval_coverage_check(n: int, rep: int, config: StudyConfig) -> list[tuple[Cell, float, float, float, bool]]:
    """Explicit interval construction at every cell; (cell, m, lo, hi, covered)."""
    kernel = get_kernel(config.kernel)
    data = sample(MODEL, n, config.seed, rep)
    result = []
    for cell, theta in zip(study_grid(n, config), _centrings(n, config)):
        c = cell.h ** (kernel.d + config.eps)
        ci = confidence_interval(data, cell, c, kernel)
        result.append((cell, theta, ci.lo, ci.hi, ci.lo <= theta <= ci.hi))
    return result


@dataclass
class TrendRow:
    n: int
    sup_stat: float
    target: float
    ratio: float
    h_lo: float
    h_hi: float
    extra: dict = field(default_factory=dict)


def sup_ratio_trend(
    sizes=(1000, 10000, 100000),
    seed: int = 11,
    kernel_name: str = "epanechnikov",
    delta: float = 0.05,
    z_points: int = 101,
    h_points: int = 5,
) -> list[TrendRow]:
    """Normalized sup of |W_n(Id, h, z)| over H x [h_n, h^n] against Delta(G) ||K||_2."""
    kernel = get_kernel(kernel_name)
    entry = identity_entry(MODEL)
    zs = np.linspace(MODEL.H[0], MODEL.H[1], z_points)
    delta_g = float(np.sqrt(np.max(entry.delta_sq(zs))))
    target = delta_g * kernel.l2_norm
    rows = []
    for n in sizes:
        data = sample(MODEL, n, seed, 0)
        h_lo, h_hi = paper_bandwidth_interval(n, delta)
        hs = geometric_grid(h_lo, h_hi, h_points)
        stat = sup_deviation(data, entry, zs, hs, MODEL, kernel)
        rows.append(TrendRow(n=n, sup_stat=stat.value, target=target, ratio=stat.value / target, h_lo=h_lo, h_hi=h_hi))
    return rows
