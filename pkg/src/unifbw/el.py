"""Smoothed empirical likelihood for conditional probabilities P(Y in C | Z = z).

For constraint weights w_i the profile maximum of prod n p_i under
sum p_i w_i = 0 is attained at p_i = 1 / (n (1 + lam w_i)), where lam is the
root of sum w_i / (1 + lam w_i) = 0 on the interval where every 1 + lam w_i > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from unifbw.estimators import el_weights, kernel_weighted_proportion
from unifbw.kernels import Kernel
from unifbw.model import Cell, Dataset, SimulationModel, centring_m

RESIDUAL_RTOL = 1e-10
BRACKET_MARGIN = 1e-12
CI_TOL = 1e-8
# keeps the bracket finite when a weight is subnormal relative to max |w|
LAMBDA_CAP = 1e300


class HullError(ValueError):
    """Zero is not interior to the convex hull of the weights; the EL ratio is undefined."""


@dataclass
class ELSolution:
    lam: float
    log_r: float
    p: np.ndarray
    hull_ok: bool
    iterations: int = 0

    @property
    def minus_2_log_r(self) -> float:
        return -2.0 * self.log_r


@dataclass(frozen=True)
class ConfidenceInterval:
    lo: float
    hi: float
    c: float


def convex_hull_check(w) -> bool:
    """True when both signs occur among the nonzero weights."""
    w = np.asarray(w, dtype=float)
    n_pos = int(np.count_nonzero(w > 0))
    return 1 <= n_pos <= w.size - 1 and bool(np.any(w < 0))


def lambda_equation(lam: float, w: np.ndarray) -> float:
    return float(np.sum(w / (1.0 + lam * w)))


def solve_lambda(w, max_iter: int = 2000) -> float:
    """Root of sum w_i / (1 + lam w_i) by bisection-safeguarded Newton from lam = 0."""
    return _solve_lambda(np.asarray(w, dtype=float), max_iter)[0]


def _solve_lambda(w: np.ndarray, max_iter: int = 2000) -> tuple[float, int]:
    if not convex_hull_check(w):
        raise HullError("weights do not contain zero in their convex hull interior")
    # Work with weights scaled to max |w| = 1; lam scales back by the same factor.
    scale_w = np.abs(w).max()
    w = w[w != 0] / scale_w
    with np.errstate(over="ignore", divide="ignore"):
        lo = max(-1.0 / w.max(), -LAMBDA_CAP)
        hi = min(-1.0 / w.min(), LAMBDA_CAP)
    # Shrink the admissible interval so 1 + lam w_i stays strictly positive.
    width = hi - lo
    a = lo + BRACKET_MARGIN * width
    b = hi - BRACKET_MARGIN * width
    scale = np.abs(w).sum()
    lam = 0.0
    for it in range(1, max_iter + 1):
        denom = 1.0 + lam * w
        terms = w / denom
        f = terms.sum()
        if abs(f) <= 1e-15 * scale:
            return lam / scale_w, it
        # f is strictly decreasing, so its sign tells on which side the root lies.
        if f > 0:
            a = lam
        else:
            b = lam
        fprime = -np.dot(terms, terms)
        step = lam - f / fprime
        if not a < step < b:
            step = 0.5 * (a + b)
        if step == lam or b - a <= 4 * np.finfo(float).eps * max(abs(a), abs(b)):
            return step / scale_w, it
        lam = step
    return lam / scale_w, max_iter


def _solution_from_weights(w: np.ndarray) -> ELSolution:
    n = w.size
    if not convex_hull_check(w):
        return ELSolution(lam=math.nan, log_r=-math.inf, p=np.full(n, math.nan), hull_ok=False)
    lam, its = _solve_lambda(w)
    lw = lam * w
    p = 1.0 / (n * (1.0 + lw))
    log_r = -float(np.sum(np.log1p(lw)))
    return ELSolution(lam=lam, log_r=min(log_r, 0.0), p=p, hull_ok=True, iterations=its)


def el_from_weights(w) -> ELSolution:
    """EL solution for arbitrary constraint weights; hull failure encoded in the result."""
    return _solution_from_weights(np.asarray(w, dtype=float))


def log_ratio(data: Dataset, cell: Cell, theta: float, kernel: Kernel) -> ELSolution:
    """log R_n(theta, C, h, z) with C = [0, t]."""
    return _solution_from_weights(el_weights(data, cell, theta, kernel))


def theorem3_statistic(data: Dataset, cell: Cell, model: SimulationModel, kernel: Kernel) -> float:
    """-log R_n(m(C, h, z), C, h, z) / log(h^{-d}); +inf when the hull condition fails."""
    if not 0 < cell.h < 1:
        raise ValueError("bandwidth must lie in (0, 1)")
    theta = centring_m(model, cell, kernel)
    return normalized_statistic(log_ratio(data, cell, theta, kernel), cell.h, kernel.d)


def normalized_statistic(sol: ELSolution, h: float, d: int = 1) -> float:
    if not sol.hull_ok:
        return math.inf
    return -sol.log_r / (d * math.log(1.0 / h))


def confidence_interval(
    data: Dataset, cell: Cell, c: float, kernel: Kernel, tol: float = CI_TOL
) -> ConfidenceInterval:
    """{theta : R_n(theta) >= c}, an interval around the kernel-weighted proportion."""
    if not 0 < c < 1:
        raise ValueError("critical value must lie in (0, 1)")
    k = kernel((data.z - cell.z) / cell.h)
    ind = ((data.y >= 0) & (data.y <= cell.t)).astype(float)
    theta_hat = kernel_weighted_proportion(data, cell, kernel)
    if not 0 < theta_hat < 1:
        raise HullError("no theta satisfies the hull condition in this window")
    log_c = math.log(c)

    def gap(theta):
        # log R(theta) - log c, positive inside the interval; -inf outside the hull.
        return _solution_from_weights(k * (ind - theta)).log_r - log_c

    # The hull holds exactly for theta in (0, 1), where R_n degenerates at both ends.
    lo = _bisect(gap, 0.0, theta_hat, tol)
    hi = _bisect(gap, 1.0, theta_hat, tol)
    return ConfidenceInterval(lo=lo, hi=hi, c=c)


def _bisect(gap, outside: float, inside: float, tol: float) -> float:
    """Boundary between ``outside`` (gap < 0) and ``inside`` (gap >= 0)."""
    while abs(inside - outside) > tol:
        mid = 0.5 * (inside + outside)
        if gap(mid) >= 0:
            inside = mid
        else:
            outside = mid
    return 0.5 * (inside + outside)
