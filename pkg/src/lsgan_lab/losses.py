"""Least-squares and sigmoid cross-entropy adversarial objectives.

Score arguments are graph nodes of shape ``(batch, 1)``.  All losses return
``1x1`` nodes so they can be passed straight to ``Graph.backward``.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import NamedTuple

import numpy as np

from .autodiff import Node

FAMILIES = ("least_squares", "sigmoid_ce")
CE_VARIANTS = ("minimax", "non_saturating")


class Coding(NamedTuple):
    chi2: bool
    real_target: bool


def validate_coding(a: float, b: float, c: float) -> Coding:
    """Which of the two standard target-selection rules ``(a, b, c)`` meets.

    ``chi2``: ``b - c == 1`` and ``b - a == 2``, the Pearson chi-squared case.
    ``real_target``: ``c == b``, the generator aims at the real label.
    """
    return Coding(chi2=(b - c == 1) and (b - a == 2), real_target=(c == b))


@dataclass(frozen=True)
class LossSpec:
    family: str = "least_squares"
    a: float = 0.0
    b: float = 1.0
    c: float = 1.0
    ce_variant: str = "non_saturating"
    symmetric_g: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown loss family {self.family!r}")
        if self.ce_variant not in CE_VARIANTS:
            raise ValueError(f"unknown ce_variant {self.ce_variant!r}")
        if self.family == "least_squares" and not self.a < self.b:
            raise ValueError(f"least-squares coding needs a < b, got a={self.a}, b={self.b}")

    def chi2_conditions(self) -> bool:
        return validate_coding(self.a, self.b, self.c).chi2

    def to_dict(self):
        return asdict(self)


def _check_batch(*nodes):
    for n in nodes:
        if n.value.size == 0:
            raise ValueError("empty score batch")


def _half_mse(scores: Node, target: float) -> Node:
    g = scores.graph
    return g.mul(0.5, g.mean(g.square(g.sub(scores, float(target)))))


def ls_d_loss(real_scores: Node, fake_scores: Node, a: float = 0.0, b: float = 1.0) -> Node:
    _check_batch(real_scores, fake_scores)
    g = real_scores.graph
    return g.add(_half_mse(real_scores, b), _half_mse(fake_scores, a))


def ls_g_loss(fake_scores: Node, c: float = 1.0, real_scores: Node | None = None,
              symmetric: bool = False) -> Node:
    """Generator least-squares loss.

    With ``symmetric=True`` the real-data term is added; real scores are
    detached first so only ``fake_scores`` carries gradient.
    """
    _check_batch(fake_scores)
    loss = _half_mse(fake_scores, c)
    if symmetric:
        if real_scores is None:
            raise ValueError("symmetric generator loss needs real_scores")
        _check_batch(real_scores)
        g = fake_scores.graph
        loss = g.add(loss, _half_mse(g.constant(real_scores.value), c))
    return loss


class NonFiniteScores(ValueError):
    """Probabilities contain NaN; the network has diverged."""


def _check_probs(*nodes):
    for n in nodes:
        v = n.value
        if v.size == 0:
            raise ValueError("empty probability batch")
        if not np.isfinite(v).all():
            raise NonFiniteScores("probabilities contain non-finite values")
        if not np.all((v > 0) & (v < 1)):
            raise ValueError(
                f"probabilities must lie in (0, 1); got range [{v.min()}, {v.max()}]")


def ce_d_loss(real_probs: Node, fake_probs: Node) -> Node:
    _check_probs(real_probs, fake_probs)
    g = real_probs.graph
    real = g.mean(g.log(real_probs))
    fake = g.mean(g.log(g.sub(1.0, fake_probs)))
    return g.sub(g.mul(-1.0, real), fake)


def ce_g_loss(fake_probs: Node, variant: str = "non_saturating") -> Node:
    _check_probs(fake_probs)
    g = fake_probs.graph
    if variant == "minimax":
        return g.mean(g.log(g.sub(1.0, fake_probs)))
    if variant == "non_saturating":
        return g.mul(-1.0, g.mean(g.log(fake_probs)))
    raise ValueError(f"unknown ce_variant {variant!r}")


def discriminator_loss(spec: LossSpec, real_scores: Node, fake_scores: Node) -> Node:
    if spec.family == "least_squares":
        return ls_d_loss(real_scores, fake_scores, spec.a, spec.b)
    return ce_d_loss(real_scores, fake_scores)


def generator_loss(spec: LossSpec, fake_scores: Node, real_scores: Node | None = None) -> Node:
    if spec.family == "least_squares":
        return ls_g_loss(fake_scores, spec.c, real_scores, spec.symmetric_g)
    return ce_g_loss(fake_scores, spec.ce_variant)


def output_head(spec: LossSpec) -> str:
    """Discriminator head matching a loss family."""
    return "linear" if spec.family == "least_squares" else "sigmoid"
