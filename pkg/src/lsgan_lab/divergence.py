"""Closed-form GAN optima on finite supports.

With both distributions given as probability vectors, the integrals in the
optimal-discriminator analysis become sums and can be checked exactly
against the divergences they are supposed to equal.  Support points where
both masses vanish carry no measure and are dropped from every sum.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from . import rng as _rng

LOG4 = math.log(4.0)


@dataclass(frozen=True)
class DiscreteDist:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64).reshape(-1)
        if p.size == 0:
            raise ValueError("empty distribution")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite and non-negative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        object.__setattr__(self, "probs", p)

    def __len__(self):
        return self.probs.size


def _pair(p_d, p_g):
    pd = p_d.probs if isinstance(p_d, DiscreteDist) else DiscreteDist(p_d).probs
    pg = p_g.probs if isinstance(p_g, DiscreteDist) else DiscreteDist(p_g).probs
    if pd.size != pg.size:
        raise ValueError(f"support sizes differ: {pd.size} vs {pg.size}")
    return pd, pg


def optimal_discriminator(p_d, p_g, a: float = 0.0, b: float = 1.0) -> np.ndarray:
    """``(b p_d + a p_g) / (p_d + p_g)`` per point; NaN where both masses are 0."""
    pd, pg = _pair(p_d, p_g)
    tot = pd + pg
    out = np.full(pd.shape, np.nan)
    live = tot > 0
    out[live] = (b * pd[live] + a * pg[live]) / tot[live]
    return out


def lsgan_value_at_optimum(p_d, p_g, a: float, b: float, c: float) -> float:
    """``2C(G)``: the symmetric generator objective evaluated at the optimal D."""
    pd, pg = _pair(p_d, p_g)
    dstar = optimal_discriminator(pd, pg, a, b)
    live = ~np.isnan(dstar)
    if np.any(~live & ((pd > 0) | (pg > 0))):
        raise ValueError("optimal discriminator undefined on a point with mass")
    r = dstar[live] - c
    return float(np.sum(pd[live] * r * r + pg[live] * r * r))


def pearson_chi2_mix(p_d, p_g) -> float:
    """``chi2(p_d + p_g || 2 p_g) = sum (2 p_g - (p_d + p_g))^2 / (p_d + p_g)``.

    The first argument sits in the denominator.
    """
    pd, pg = _pair(p_d, p_g)
    tot = pd + pg
    live = tot > 0
    diff = 2.0 * pg[live] - tot[live]
    return float(np.sum(diff * diff / tot[live]))


def _xlogy_ratio(p, q):
    # sum p log(p / q) with 0 log 0 := 0
    m = p > 0
    return float(np.sum(p[m] * np.log(p[m] / q[m])))


def kl_divergence(p, q) -> float:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if np.any((p > 0) & (q == 0)):
        return math.inf
    return _xlogy_ratio(p, q)


def js_divergence(p, q) -> float:
    pd, pg = _pair(p, q)
    m = 0.5 * (pd + pg)
    return 0.5 * _xlogy_ratio(pd, m) + 0.5 * _xlogy_ratio(pg, m)


def gan_value_at_optimum(p_d, p_g) -> float:
    """Regular GAN value ``E_d[log D*] + E_g[log(1 - D*)]`` with ``D* = p_d/(p_d+p_g)``."""
    pd, pg = _pair(p_d, p_g)
    tot = pd + pg
    total = 0.0
    md = pd > 0
    total += float(np.sum(pd[md] * np.log(pd[md] / tot[md])))
    mg = pg > 0
    total += float(np.sum(pg[mg] * np.log(pg[mg] / tot[mg])))
    return total


def random_pair(seed: int, index: int, K: int, zero_frac: float = 0.1):
    """A reproducible pair of distributions on ``K`` points.

    Uniform variates are normalised after zeroing about ``zero_frac`` of
    the entries; at least one entry of each vector is kept positive.
    """
    g = _rng.stream(seed, _rng.ORACLE, index)
    out = []
    for _ in range(2):
        v = g.random(K)
        if K > 1:
            v[g.random(K) < zero_frac] = 0.0
            if not np.any(v > 0):
                v[g.integers(K)] = 1.0
        else:
            v[:] = 1.0
        out.append(DiscreteDist(v / v.sum()))
    return out[0], out[1]


@dataclass
class OracleRow:
    pair: int
    K: int
    value: float
    chi2: float

    @property
    def diff(self) -> float:
        return abs(self.value - self.chi2)


def chi2_table(num_pairs: int, support_size: int | None, seed: int,
               scheme=(-1.0, 1.0, 0.0), k_range=(2, 16)) -> list[OracleRow]:
    """``2C(G)`` against the mixture chi-squared on random pairs.

    ``support_size=None`` draws K uniformly from ``k_range`` per pair.
    """
    a, b, c = scheme
    rows = []
    sizes = _rng.stream(seed, _rng.ORACLE)
    for i in range(num_pairs):
        K = support_size or int(sizes.integers(k_range[0], k_range[1] + 1))
        pd, pg = random_pair(seed, i, K)
        rows.append(OracleRow(i, K, lsgan_value_at_optimum(pd, pg, a, b, c),
                              pearson_chi2_mix(pd, pg)))
    return rows
