"""Bandwidth intervals, geometric grids and leave-one-out cross-validation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from unifbw.kernels import Kernel
from unifbw.model import Dataset

# A data-driven rule returns a bandwidth for every evaluation point.
DataDrivenBandwidth = Callable[[Dataset], Callable[[float], float]]


class InfeasibleBandwidth(ValueError):
    pass


@dataclass(frozen=True)
class BandwidthGrid:
    h_lo: float
    h_hi: float
    points: np.ndarray

    @classmethod
    def geometric(cls, h_lo: float, h_hi: float, size: int) -> "BandwidthGrid":
        return cls(h_lo, h_hi, geometric_grid(h_lo, h_hi, size))


def geometric_grid(lo: float, hi: float, size: int) -> np.ndarray:
    if size < 1:
        raise ValueError("grid size must be positive")
    if not 0 < lo <= hi:
        raise ValueError("need 0 < lo <= hi")
    if size == 1 or lo == hi:
        return np.full(size, float(lo))
    pts = np.geomspace(lo, hi, size)
    pts[0], pts[-1] = lo, hi
    return pts


def paper_bandwidth_interval(n: int, delta: float) -> tuple[float, float]:
    """(n^{-1/5-delta}, n^{-1/5+delta})."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 <= delta < 0.2:
        raise ValueError("delta must lie in [0, 1/5)")
    return n ** (-0.2 - delta), n ** (-0.2 + delta)


def indicator_weight(lo: float = 0.25, hi: float = 0.75) -> Callable:
    def w(z):
        z = np.asarray(z, dtype=float)
        return np.where((z >= lo) & (z <= hi), 1.0, 0.0)

    return w


def cv_score(data: Dataset, h: float, w: Callable | None = None, kernel: Kernel | None = None) -> float:
    """(1/n) sum_i [Y_i - r_{n,-i}(Z_i)]^2 w(Z_i) with leave-one-out Nadaraya-Watson fits."""
    if kernel is None:
        raise ValueError("a kernel is required")
    w = indicator_weight() if w is None else w
    wz = np.asarray(w(data.z), dtype=float)
    active = np.flatnonzero(wz > 0)
    if active.size == 0:
        return 0.0
    total = 0.0
    for start in range(0, active.size, 512):
        idx = active[start:start + 512]
        kmat = kernel((data.z[idx, None] - data.z[None, :]) / h)
        # leave observation i out of its own fit
        kmat[np.arange(idx.size), idx] = 0.0
        den = kmat.sum(axis=1)
        num = kmat @ data.y
        if np.any(den <= 0):
            raise InfeasibleBandwidth(f"empty leave-one-out window at h={h}")
        resid = data.y[idx] - num / den
        total += float(np.sum(resid**2 * wz[idx]))
    return total / data.n


def cv_search_range(n: int, delta: float) -> tuple[float, float]:
    """[n^{-1+delta}, n^{-delta}]."""
    if not 0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    return n ** (-1.0 + delta), n ** (-delta)


def cv_table(data: Dataset, delta: float, grid_size: int, w=None, kernel: Kernel | None = None):
    """(h, CV(h)) pairs over the geometric search grid; infeasible h get NaN."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    hs = geometric_grid(*cv_search_range(data.n, delta), grid_size)
    scores = np.empty_like(hs)
    for j, h in enumerate(hs):
        try:
            scores[j] = cv_score(data, h, w, kernel)
        except InfeasibleBandwidth:
            scores[j] = np.nan
    return hs, scores


def select_cv_bandwidth(data: Dataset, delta: float, grid_size: int, w=None, kernel: Kernel | None = None) -> float:
    """Grid argmin of CV(h); ties go to the smaller bandwidth."""
    hs, scores = cv_table(data, delta, grid_size, w, kernel)
    if np.all(np.isnan(scores)):
        raise InfeasibleBandwidth("every bandwidth on the grid is infeasible")
    # nanargmin returns the first minimizer, i.e. the smallest h.
    return float(hs[int(np.nanargmin(scores))])
