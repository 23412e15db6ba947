"""Seeded random streams.

All randomness comes from numpy's PCG64 bit generator.  A stream is keyed
by ``(seed, purpose, *counter)`` through ``SeedSequence.spawn_key``, so
data, latent, and initialization draws never share state and any draw can
be regenerated from its key alone (no generator state to checkpoint).
"""

from __future__ import annotations

import numpy as np

ALGORITHM = "numpy.PCG64/SeedSequence(spawn_key=(purpose, *counter))"

INIT_G = 0
INIT_D = 1
INIT_EMBED = 2
DATA = 3
LATENT = 4
EVAL = 5
ORACLE = 6


def stream(seed: int, purpose: int, *counter: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    key = (int(purpose),) + tuple(int(c) for c in counter)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


def box_muller(rng: np.random.Generator, size) -> np.ndarray:
    """Standard normal variates from pairs of uniforms."""
    shape = (size,) if np.isscalar(size) else tuple(size)
    n = int(np.prod(shape))
    pairs = (n + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # (0, 1]
    u2 = rng.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:n].reshape(shape)
