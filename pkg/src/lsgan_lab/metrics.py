"""Density estimates, mode coverage, and the generator-gradient probe."""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .autodiff import Graph
from .synthetic import RingMixture


@dataclass(frozen=True)
class GridSpec:
    x_min: float = -3.0
    x_max: float = 3.0
    y_min: float = -3.0
    y_max: float = 3.0
    resolution: int = 128

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be at least 2")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("grid bounds must be increasing")

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinates ``min + i * step``, inclusive of both ends."""
        i = np.arange(self.resolution)
        dx = (self.x_max - self.x_min) / (self.resolution - 1)
        dy = (self.y_max - self.y_min) / (self.resolution - 1)
        return self.x_min + i * dx, self.y_min + i * dy

    @property
    def cell_area(self) -> float:
        r = self.resolution - 1
        return (self.x_max - self.x_min) / r * (self.y_max - self.y_min) / r


@dataclass
class DensityGrid:
    """``values[i, j]`` is the density at ``(xs[j], ys[i])``."""

    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def integral(self) -> float:
        return float(self.values.sum() * self.spec.cell_area)


def silverman_bandwidth(samples) -> float:
    s = np.asarray(samples, dtype=np.float64)
    n = s.shape[0]
    sd = math.sqrt(s.var(axis=0, ddof=1).mean()) if n > 1 else 1.0
    # d = 2: (4 / (d + 2)) ** (1 / (d + 4)) == 1
    return sd * n ** (-1.0 / 6.0)


def kde2d(samples, bandwidth: float | str = 0.1, grid: GridSpec | None = None,
          chunk: int = 4096) -> DensityGrid:
    """Isotropic Gaussian KDE evaluated on a regular grid.

    Samples are sorted before summation, so the result does not depend on
    their order.  ``bandwidth="silverman"`` picks the rule-of-thumb width.
    """
    s = np.asarray(samples, dtype=np.float64).reshape(-1, 2)
    if s.shape[0] == 0:
        raise ValueError("kde2d needs at least one sample")
    h = silverman_bandwidth(s) if bandwidth == "silverman" else float(bandwidth)
    if not h > 0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    grid = grid or GridSpec()
    s = s[np.lexsort((s[:, 1], s[:, 0]))]
    xs, ys = grid.axes()
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    out = np.zeros(pts.shape[0])
    for lo in range(0, pts.shape[0], chunk):
        p = pts[lo:lo + chunk]
        d2 = (p[:, None, 0] - s[None, :, 0]) ** 2 + (p[:, None, 1] - s[None, :, 1]) ** 2
        out[lo:lo + chunk] = np.exp(-d2 / (2 * h * h)).sum(axis=1)
    out /= s.shape[0] * 2 * math.pi * h * h
    return DensityGrid(grid, out.reshape(grid.resolution, grid.resolution))


@dataclass
class ModeStats:
    modes_covered: int
    high_quality_fraction: float
    per_mode_counts: list[int]

    def to_dict(self):
        return {"modes_covered": self.modes_covered,
                "high_quality_fraction": self.high_quality_fraction,
                "per_mode_counts": list(self.per_mode_counts)}


def nearest_mode(samples, mix: RingMixture) -> tuple[np.ndarray, np.ndarray]:
    """Index of the closest center (ties to the lowest index) and distance."""
    s = np.asarray(samples, dtype=np.float64).reshape(-1, 2)
    d2 = ((s[:, None, :] - mix.centers[None, :, :]) ** 2).sum(-1)
    idx = d2.argmin(axis=1)  # argmin returns the first minimum
    return idx, np.sqrt(d2[np.arange(len(s)), idx])


def mode_stats(samples, mix: RingMixture, dist_threshold: float | None = None,
               min_count: int | None = None) -> ModeStats:
    """Count high-quality samples per mode.

    Defaults: ``dist_threshold = 3 * sigma``, ``min_count = max(1, n // (10 K))``.
    """
    s = np.asarray(samples, dtype=np.float64).reshape(-1, 2)
    n = s.shape[0]
    if dist_threshold is None:
        dist_threshold = 3.0 * mix.sigma
    if min_count is None:
        min_count = max(1, n // (10 * mix.K))
    if dist_threshold <= 0 or min_count <= 0:
        raise ValueError("dist_threshold and min_count must be positive")
    if n == 0:
        return ModeStats(0, 0.0, [0] * mix.K)
    idx, dist = nearest_mode(s, mix)
    good = dist <= dist_threshold
    counts = np.bincount(idx[good], minlength=mix.K)
    return ModeStats(int((counts >= min_count).sum()), float(good.mean()),
                     [int(c) for c in counts])


def class_fidelity(samples, labels, mix: RingMixture) -> np.ndarray:
    """Per class, the fraction of samples whose nearest mode is that class."""
    idx, _ = nearest_mode(samples, mix)
    labels = np.asarray(labels)
    out = np.full(mix.K, np.nan)
    for k in range(mix.K):
        mine = labels == k
        if mine.any():
            out[k] = float((idx[mine] == k).mean())
    return out


def saturation_probe(loss_family: str, w, distances, c: float = 1.0) -> np.ndarray:
    """Generator-gradient norm for a fake point ``d * w`` under a fixed linear critic.

    The critic scores ``s(x) = w . x`` with ``w`` normalised to unit length.
    ``sigmoid_ce`` uses ``-log sigmoid(s)``; ``least_squares`` uses
    ``0.5 * (s - c) ** 2``.  Gradients come from the autodiff engine.
    """
    from .losses import ce_g_loss, ls_g_loss

    w = np.asarray(w, dtype=np.float64).reshape(-1)
    w = w / np.linalg.norm(w)
    norms = []
    for d in distances:
        g = Graph()
        x = g.input((float(d) * w).reshape(1, -1), requires_grad=True)
        s = g.matmul(x, g.constant(w.reshape(-1, 1)))
        if loss_family == "sigmoid_ce":
            loss = ce_g_loss(g.sigmoid(s), "non_saturating")
        elif loss_family == "least_squares":
            loss = ls_g_loss(s, c)
        else:
            raise ValueError(f"unknown loss family {loss_family!r}")
        g.backward(loss)
        norms.append(float(np.linalg.norm(x.grad)))
    return np.array(norms)
