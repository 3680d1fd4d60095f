"""Data-generating process, dataset container and the smoothed centring parameter.

The simulation model draws Z uniform on [0, 1] and, given Z = z, Y exponential
with mean 1/z, so that P(Y <= t | Z = z) = 1 - exp(-z t).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from unifbw.kernels import Kernel, adaptive_quad

QUAD_ATOL = 1e-10
MIN_MASS = 1e-12


@dataclass(frozen=True)
class Dataset:
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        z = np.asarray(self.z, dtype=float)
        if y.ndim != 1 or z.ndim != 1 or y.shape != z.shape:
            raise ValueError("y and z must be 1-d arrays of equal length")
        if y.size < 2:
            raise ValueError("a dataset needs at least 2 observations")
        y.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return int(self.y.size)

    def take(self, idx) -> "Dataset":
        return Dataset(self.y[idx], self.z[idx])

    @classmethod
    def from_csv(cls, path) -> "Dataset":
        """Reads a CSV with header ``y,z`` (extra columns are ignored)."""
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"y", "z"} <= set(reader.fieldnames):
                raise ValueError(f"{path}: expected a header with columns y,z")
            rows = [(float(r["y"]), float(r["z"])) for r in reader]
        if not rows:
            raise ValueError(f"{path}: no observations")
        y, z = zip(*rows)
        return cls(np.array(y), np.array(z))

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            fh.write("y,z\n")
            for yi, zi in zip(self.y, self.z):
                fh.write(f"{float(yi)!r},{float(zi)!r}\n")


@dataclass(frozen=True)
class Cell:
    """Evaluation cell: the set C = [0, t], a covariate point z and a bandwidth h."""

    t: float
    z: float
    h: float

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("bandwidth must be positive")


@dataclass(frozen=True)
class SimulationModel:
    H: tuple[float, float] = (0.25, 0.75)
    support: tuple[float, float] = field(default=(0.0, 1.0), repr=False)

    def f_z(self, z):
        z = np.asarray(z, dtype=float)
        return np.where((z >= self.support[0]) & (z <= self.support[1]), 1.0, 0.0)

    def conditional_cdf(self, t, z):
        t = np.asarray(t, dtype=float)
        z = np.asarray(z, dtype=float)
        return np.where(t >= 0, -np.expm1(-z * np.maximum(t, 0.0)), 0.0)

    def conditional_mean(self, z):
        return 1.0 / np.asarray(z, dtype=float)

    def conditional_second_moment(self, z):
        return 2.0 / np.asarray(z, dtype=float) ** 2


def replication_rng(seed: int, rep: int = 0) -> np.random.Generator:
    """Independent stream for each (seed, replication index) pair."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(rep),))
    return np.random.Generator(np.random.PCG64(ss))


def sample(model: SimulationModel, n: int, seed: int, rep: int = 0) -> Dataset:
    """Draws n pairs (Y_i, Z_i) from the stream of (seed, rep).

    Pairs are drawn in order, so samples of different sizes from the same
    stream are nested prefixes of one another.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    uv = replication_rng(seed, rep).random((n, 2))
    lo, hi = model.support
    # 1 - U lies in (0, 1], so Z > 0 and the inverse CDF below stays finite.
    z = lo + (hi - lo) * (1.0 - uv[:, 0])
    y = -np.log1p(-uv[:, 1]) / z
    return Dataset(y, z)


def true_prob(model: SimulationModel, t: float, z: float) -> float:
    """r(C, z) = P(Y <= t | Z = z) for C = [0, t]."""
    if z <= 0:
        raise ValueError("z must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    return float(model.conditional_cdf(t, z))


def true_sigma2(model: SimulationModel, t: float, z: float) -> float:
    p = true_prob(model, t, z)
    return p * (1.0 - p)


def _window(model: SimulationModel, z: float, h: float) -> tuple[float, float]:
    lo = max(z - 0.5 * h, model.support[0])
    hi = min(z + 0.5 * h, model.support[1])
    return lo, hi


def kernel_expectation(
    model: SimulationModel, kernel: Kernel, z: float, h: float, cond_mean: Callable | None = None
) -> float:
    """E[ g(Y) K((Z - z)/h) ] where ``cond_mean(u) = E[g(Y) | Z = u]``; g == 1 when omitted.

    The integral runs over the kernel window intersected with the support of f_Z.
    """
    lo, hi = _window(model, z, h)
    if hi <= lo:
        return 0.0
    if cond_mean is None:
        integrand = lambda u: kernel((u - z) / h) * model.f_z(u)
    else:
        integrand = lambda u: kernel((u - z) / h) * cond_mean(u) * model.f_z(u)
    return adaptive_quad(integrand, lo, hi, atol=QUAD_ATOL)


def centring_m(model: SimulationModel, cell: Cell, kernel: Kernel) -> float:
    """m(C, h, z) = E[1_C(Y) K((Z-z)/h)] / E[K((Z-z)/h)] with C = [0, t]."""
    den = kernel_expectation(model, kernel, cell.z, cell.h)
    if den < MIN_MASS:
        raise ValueError(f"kernel window around z={cell.z} with h={cell.h} carries no mass of f_Z")
    num = kernel_expectation(
        model, kernel, cell.z, cell.h, lambda u: model.conditional_cdf(cell.t, u)
    )
    return min(max(num / den, 0.0), 1.0)
