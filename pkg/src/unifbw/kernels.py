"""Compactly supported kernels on the cube [-1/2, 1/2]^d and Gauss-Legendre quadrature."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

GL_NODES = 64


def _gl_rule(nodes: int = GL_NODES) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(nodes)


_X64, _W64 = _gl_rule()


def gauss_legendre(f: Callable, a: float, b: float, panels: int = 1, nodes: int = GL_NODES) -> float:
    """Composite Gauss-Legendre rule for a vectorized ``f`` on [a, b]."""
    if b <= a:
        return 0.0
    x, w = (_X64, _W64) if nodes == GL_NODES else _gl_rule(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = np.asarray(f(pts), dtype=float).reshape(panels, -1)
    return float(np.sum(half * (vals @ w)))


def adaptive_quad(f: Callable, a: float, b: float, atol: float = 1e-10, max_panels: int = 4096) -> float:
    """Doubles the panel count until two successive composite rules agree within ``atol``."""
    panels = 1
    prev = gauss_legendre(f, a, b, panels)
    while panels < max_panels:
        panels *= 2
        cur = gauss_legendre(f, a, b, panels)
        if abs(cur - prev) <= atol:
            return cur
        prev = cur
    return prev


def cube_quad(f: Callable, d: int, nodes: int = GL_NODES) -> float:
    """Tensor Gauss-Legendre over [-1/2, 1/2]^d; ``f`` takes points of shape (m, d)."""
    x, w = _gl_rule(nodes)
    x, w = 0.5 * x, 0.5 * w
    grids = np.meshgrid(*([x] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wts = np.ones(pts.shape[0])
    for g in np.meshgrid(*([w] * d), indexing="ij"):
        wts = wts * g.ravel()
    return float(np.sum(wts * np.asarray(f(pts), dtype=float)))


# 1-d profiles on [-1/2, 1/2], each normalized to unit mass.
def _uniform(u):
    return np.where(np.abs(u) <= 0.5, 1.0, 0.0)


def _epanechnikov(u):
    return np.where(np.abs(u) <= 0.5, 1.5 * (1.0 - 4.0 * u * u), 0.0)


def _triweight(u):
    return np.where(np.abs(u) <= 0.5, (35.0 / 16.0) * (1.0 - 4.0 * u * u) ** 3, 0.0)


_PROFILES = {
    "uniform": _uniform,
    "epanechnikov": _epanechnikov,
    "triweight": _triweight,
}


@dataclass(frozen=True)
class Kernel:
    """Tensor-product kernel vanishing outside [-1/2, 1/2]^d.

    For d == 1 the kernel is applied elementwise to an array of any shape; for
    d > 1 the last axis holds the coordinates.
    """

    name: str
    d: int
    profile: Callable = field(repr=False, compare=False)
    l2_norm_sq: float = field(init=False)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("kernel dimension must be a positive integer")
        norm_1d = adaptive_quad(lambda u: self.profile(u) ** 2, -0.5, 0.5, atol=1e-10)
        object.__setattr__(self, "l2_norm_sq", norm_1d**self.d)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.d == 1:
            return self.profile(u)
        if u.shape[-1] != self.d:
            raise ValueError(f"point dimension {u.shape[-1]} does not match kernel dimension {self.d}")
        return np.prod(self.profile(u), axis=-1)

    def points(self, p) -> np.ndarray:
        """Kernel values at m points given as an array of shape (m, d)."""
        p = np.asarray(p, dtype=float)
        if p.ndim != 2 or p.shape[1] != self.d:
            raise ValueError(f"expected points of shape (m, {self.d}), got {p.shape}")
        return np.prod(self.profile(p), axis=-1)

    @property
    def l2_norm(self) -> float:
        return float(np.sqrt(self.l2_norm_sq))

    @property
    def nonnegative(self) -> bool:
        return True


def get_kernel(name: str, d: int = 1) -> Kernel:
    try:
        profile = _PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}; choose from {sorted(_PROFILES)}") from None
    return Kernel(name=name, d=d, profile=profile)


def product_kernel(base: Kernel, d: int) -> Kernel:
    return Kernel(name=base.name, d=d, profile=base.profile)


def eval_kernel(k: Kernel, u) -> float:
    """K(u) at a single point ``u`` in R^d."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.ndim != 1 or u.shape[0] != k.d:
        raise ValueError(f"expected a point in R^{k.d}, got shape {u.shape}")
    return float(np.prod(k.profile(u)))


def l2_norm_sq(k: Kernel) -> float:
    """Squared Lebesgue L2 norm, integral of K^2 over the support cube."""
    return k.l2_norm_sq


def kernel_mass(k: Kernel, nodes: int = GL_NODES) -> float:
    return cube_quad(k.points, k.d, nodes)


def kernel_sq_mass(k: Kernel, nodes: int = GL_NODES) -> float:
    return cube_quad(lambda p: k.points(p) ** 2, k.d, nodes)


KERNEL_NAMES = tuple(_PROFILES)
