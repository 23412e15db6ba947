"""Ring-of-Gaussians data, latent noise, and the exact mixture density."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
import itertools
import math

import numpy as np

from . import rng as _rng


@dataclass(frozen=True)
class RingMixture:
    """``K`` isotropic Gaussians centred on a circle, equally weighted."""

    K: int = 8
    radius: float = 2.0
    sigma: float = 0.05

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"K must be positive, got {self.K}")
        if self.radius < 0 or self.sigma < 0:
            raise ValueError("radius and sigma must be non-negative")
        if self.K > 1:
            d = self.centers
            gaps = [np.linalg.norm(d[i] - d[j])
                    for i, j in itertools.combinations(range(self.K), 2)]
            if min(gaps) <= 6 * self.sigma:
                raise ValueError(
                    f"modes overlap: min center distance {min(gaps):.4g} <= 6*sigma")

    @cached_property
    def centers(self) -> np.ndarray:
        angles = 2.0 * np.pi * np.arange(self.K) / self.K
        return self.radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)

    def to_dict(self):
        return {"K": self.K, "radius": self.radius, "sigma": self.sigma}


def sample_mixture(mix: RingMixture, n: int, seed: int, counter=()) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` labelled points.  Returns ``(points (n, 2), labels (n,))``."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    g = _rng.stream(seed, _rng.DATA, *counter)
    labels = g.integers(0, mix.K, size=n)
    noise = _rng.box_muller(g, (n, 2))
    return mix.centers[labels] + mix.sigma * noise, labels


def sample_latent(n: int, dim: int, kind: str = "gaussian", seed: int = 0, counter=(),
                  purpose: int = _rng.LATENT) -> np.ndarray:
    if n <= 0 or dim <= 0:
        raise ValueError(f"n and dim must be positive, got n={n}, dim={dim}")
    g = _rng.stream(seed, purpose, *counter)
    if kind == "uniform":
        return 2.0 * g.random((n, dim)) - 1.0
    if kind == "gaussian":
        return _rng.box_muller(g, (n, dim))
    raise ValueError(f"unknown latent kind {kind!r}")


def true_density(mix: RingMixture, point) -> np.ndarray | float:
    """Mixture pdf at one point ``(2,)`` or many points ``(n, 2)``."""
    p = np.asarray(point, dtype=np.float64)
    single = p.ndim == 1
    p = np.atleast_2d(p)
    var = mix.sigma ** 2
    d2 = ((p[:, None, :] - mix.centers[None, :, :]) ** 2).sum(-1)
    dens = np.exp(-d2 / (2 * var)).sum(1) / (mix.K * 2 * math.pi * var)
    return float(dens[0]) if single else dens
