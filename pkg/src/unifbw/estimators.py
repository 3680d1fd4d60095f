"""Kernel sums: the deviation process W_n, Nadaraya-Watson regression and EL building blocks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from unifbw.kernels import Kernel
from unifbw.model import Cell, Dataset, SimulationModel, kernel_expectation


@dataclass(frozen=True)
class FunctionClassEntry:
    """One member g of the function class with its coefficient maps c_g and d_g.

    ``cond_mean(u) = E[g(Y) | Z = u]`` is needed only to centre W_n exactly in
    simulation mode; ``delta_sq(z) = E[(c_g(z) g(Y) + d_g(z))^2 | Z = z]`` when
    known in closed form.
    """

    g: Callable
    c_g: Callable = lambda z: 1.0
    d_g: Callable = lambda z: 0.0
    cond_mean: Callable | None = None
    delta_sq: Callable | None = None
    name: str = "g"


def identity_entry(model: SimulationModel) -> FunctionClassEntry:
    return FunctionClassEntry(
        g=lambda y: y,
        cond_mean=model.conditional_mean,
        delta_sq=model.conditional_second_moment,
        name="Id",
    )


def indicator_entry(model: SimulationModel, t: float) -> FunctionClassEntry:
    def delta_sq(z):
        return model.conditional_cdf(t, z)

    return FunctionClassEntry(
        g=lambda y: np.where((y >= 0) & (y <= t), 1.0, 0.0),
        cond_mean=lambda u: model.conditional_cdf(t, u),
        delta_sq=delta_sq,
        name=f"1[0,{t}]",
    )


@dataclass
class DeviationStat:
    value: float
    # rows of (z, h, raw W_n, normalizer)
    per_point: np.ndarray


def _check_h(h: float) -> None:
    if not 0 < h < 1:
        raise ValueError(f"bandwidth must lie in (0, 1), got {h}")


def _exact_expectation(model, kernel, ent, z, h, c, d) -> float:
    if c == 0.0 and d == 0.0:
        return 0.0
    e_g = 0.0
    if c != 0.0:
        if ent.cond_mean is None:
            raise ValueError(f"entry {ent.name} has no conditional mean for exact centring")
        e_g = kernel_expectation(model, kernel, z, h, ent.cond_mean)
    e_1 = kernel_expectation(model, kernel, z, h) if d != 0.0 else 0.0
    return c * e_g + d * e_1


def _window_slice(z_sorted: np.ndarray, z: float, h: float) -> slice:
    lo = np.searchsorted(z_sorted, z - 0.5 * h, side="left")
    hi = np.searchsorted(z_sorted, z + 0.5 * h, side="right")
    return slice(lo, hi)


def w_process(
    data: Dataset,
    entry: FunctionClassEntry,
    h: float,
    z: float,
    f_z_value: float,
    kernel: Kernel,
    model: SimulationModel | None = None,
    expectation: float | None = None,
) -> float:
    """W_n(g, h, z): centred kernel sum scaled by f_Z(z)^{-1/2}.

    Exactly one centring source is used. With ``model`` (simulation mode) the
    per-observation expectation E[(c_g(z) g(Y) + d_g(z)) K((Z - z)/h)] is
    computed by quadrature; otherwise the caller passes it as ``expectation``.
    """
    _check_h(h)
    if not f_z_value > 0:
        raise ValueError("f_Z(z) must be positive")
    c, d = float(entry.c_g(z)), float(entry.d_g(z))
    k = kernel((data.z - z) / h)
    raw = np.sum((c * np.asarray(entry.g(data.y), dtype=float) + d) * k)
    if expectation is None:
        if model is None:
            raise ValueError("data mode needs an explicit expectation value")
        expectation = _exact_expectation(model, kernel, entry, z, h, c, d)
    return float((raw - data.n * expectation) / np.sqrt(f_z_value))


def nw_regression(data: Dataset, h: float, z: float, kernel: Kernel) -> float:
    """Nadaraya-Watson estimate of E(Y | Z = z)."""
    k = kernel((z - data.z) / h)
    den = k.sum()
    if den <= 0:
        raise ValueError(f"no observation in the kernel window at z={z}, h={h}: estimate undefined")
    return float(np.dot(k, data.y) / den)


def el_weights(data: Dataset, cell: Cell, theta: float, kernel: Kernel) -> np.ndarray:
    """w_i = K((Z_i - z)/h) (1_{[0,t]}(Y_i) - theta)."""
    k = kernel((data.z - cell.z) / cell.h)
    ind = ((data.y >= 0) & (data.y <= cell.t)).astype(float)
    return k * (ind - theta)


def kernel_weighted_proportion(data: Dataset, cell: Cell, kernel: Kernel) -> float:
    """Sum K_i 1_C(Y_i) / Sum K_i, the theta at which X_n vanishes."""
    k = kernel((data.z - cell.z) / cell.h)
    den = k.sum()
    if den <= 0:
        raise ValueError("empty kernel window")
    ind = (data.y >= 0) & (data.y <= cell.t)
    return float(k[ind].sum() / den)


def xn_sn_un(
    data: Dataset, cell: Cell, theta: float, f_z_value: float, kernel: Kernel
) -> tuple[float, float, float]:
    """Returns (X_n, S_n, U_n) with U_n = X_n^2 / (f_Z(z) S_n)."""
    if not f_z_value > 0:
        raise ValueError("f_Z(z) must be positive")
    w = el_weights(data, cell, theta, kernel)
    x = float(w.sum())
    sum_sq = float(np.dot(w, w))
    if sum_sq == 0.0:
        raise ValueError("all EL weights vanish; S_n = 0")
    s = sum_sq / f_z_value
    return x, s, x * x / (f_z_value * s)


def sup_deviation(
    data: Dataset,
    entry: FunctionClassEntry | Sequence[FunctionClassEntry],
    z_grid,
    h_grid,
    model: SimulationModel,
    kernel: Kernel,
) -> DeviationStat:
    """max over (g, z, h) of |W_n(g, h, z)| / sqrt(2 n h^d log(h^{-d})), simulation mode."""
    entries = [entry] if isinstance(entry, FunctionClassEntry) else list(entry)
    z_grid = np.atleast_1d(np.asarray(z_grid, dtype=float))
    h_grid = np.atleast_1d(np.asarray(h_grid, dtype=float))
    if not entries or z_grid.size == 0 or h_grid.size == 0:
        raise ValueError("grids must be nonempty")
    for h in h_grid:
        _check_h(h)
    d = kernel.d
    order = np.argsort(data.z, kind="stable")
    zs, ys = data.z[order], data.y[order]
    n = data.n
    rows = []
    for ent in entries:
        gy = np.asarray(ent.g(ys), dtype=float)
        for h in h_grid:
            norm = np.sqrt(2.0 * n * h**d * np.log(h ** (-d)))
            for z in z_grid:
                f = float(model.f_z(z))
                if f <= 0:
                    raise ValueError("f_Z(z) must be positive on the z grid")
                c, dd = float(ent.c_g(z)), float(ent.d_g(z))
                sl = _window_slice(zs, z, h)
                k = kernel((zs[sl] - z) / h)
                raw = np.sum((c * gy[sl] + dd) * k)
                expect = _exact_expectation(model, kernel, ent, z, h, c, dd)
                w = (raw - n * expect) / np.sqrt(f)
                rows.append((z, h, w, norm))
    per_point = np.array(rows, dtype=float)
    value = float(np.max(np.abs(per_point[:, 2]) / per_point[:, 3]))
    return DeviationStat(value=value, per_point=per_point)
