"""Alternating adversarial training on the ring mixture.

Each generator step runs ``d_steps_per_g`` discriminator updates, each on a
fresh real batch and a fresh fake batch, then one generator update through
another fresh fake batch with the discriminator held fixed.  Every random
draw is keyed by ``(seed, purpose, step, substep)``, which is what makes a
resumed run match an uninterrupted one bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json
import logging
import math
from pathlib import Path

import numpy as np

from . import rng as _rng
from .autodiff import Graph
from .checkpoint import Checkpoint, checkpoint_save
from .config import TrainConfig
from .losses import NonFiniteScores, discriminator_loss, generator_loss, output_head
from .metrics import ModeStats, mode_stats
from .networks import (Bound, LabelEmbed, MlpParams, bind, conditional_forward,
                       discriminator_forward, generator_forward, init_label_embed,
                       init_mlp, one_hot)
from .optim import adam_init, adam_step, rmsprop_init, rmsprop_step
from .synthetic import sample_latent, sample_mixture

log = logging.getLogger(__name__)

CSV_HEADER = "step,d_loss,g_loss,g_grad_norm"


class NonFiniteLoss(FloatingPointError):
    pass


@dataclass
class StepRecord:
    step: int
    d_loss: float
    g_loss: float
    g_grad_norm: float

    def csv(self) -> str:
        return f"{self.step},{self.d_loss!r},{self.g_loss!r},{self.g_grad_norm!r}"


@dataclass
class Snapshot:
    step: int
    samples: np.ndarray
    labels: np.ndarray | None
    stats: ModeStats

    def to_json(self) -> str:
        doc = {"step": self.step, "stats": self.stats.to_dict(),
               "samples": [[repr(float(v)) for v in row] for row in self.samples]}
        if self.labels is not None:
            doc["labels"] = [int(v) for v in self.labels]
        return json.dumps(doc, sort_keys=True)


@dataclass
class RunLog:
    config: TrainConfig
    records: list[StepRecord] = field(default_factory=list)
    snapshots: list[Snapshot] = field(default_factory=list)
    prng: str = _rng.ALGORITHM
    aborted: dict | None = None

    def csv(self) -> str:
        return "\n".join([CSV_HEADER] + [r.csv() for r in self.records]) + "\n"

    def meta(self) -> dict:
        return {"config": self.config.to_dict(), "prng": self.prng,
                "config_hash": self.config.trajectory_hash(), "aborted": self.aborted,
                "steps_logged": len(self.records),
                "snapshot_steps": [s.step for s in self.snapshots]}

    @property
    def final_stats(self) -> ModeStats | None:
        return self.snapshots[-1].stats if self.snapshots else None


@dataclass
class TrainState:
    g: MlpParams
    d: MlpParams
    embed: LabelEmbed | None
    opt_g: dict
    opt_d: dict
    step: int = 0

    def d_arrays(self) -> list[np.ndarray]:
        out = self.d.arrays()
        if self.embed is not None:
            out.append(self.embed.mapping_matrix)
        return out

    def set_d_arrays(self, arrays):
        if self.embed is not None:
            self.embed = LabelEmbed(arrays[-1])
            arrays = arrays[:-1]
        self.d = self.d.with_arrays(arrays)


def init_state(cfg: TrainConfig) -> TrainState:
    code = cfg.embed_dim if cfg.conditional else 0
    g = init_mlp([cfg.latent_dim + code, *cfg.g_hidden, 2], cfg.g_activation, "linear",
                 cfg.seed, _rng.INIT_G)
    d = init_mlp([2 + code, *cfg.d_hidden, 1], cfg.d_activation, output_head(cfg.loss),
                 cfg.seed, _rng.INIT_D)
    embed = init_label_embed(cfg.data.K, cfg.embed_dim, cfg.seed) if cfg.conditional else None
    st = TrainState(g, d, embed, None, None)
    init = adam_init if cfg.optimizer["kind"] == "adam" else rmsprop_init
    st.opt_g = init(g.arrays())
    st.opt_d = init(st.d_arrays())
    return st


def state_from_checkpoint(ck: Checkpoint) -> TrainState:
    return TrainState(ck.g, ck.d, ck.embed, ck.opt_g, ck.opt_d, ck.step)


def to_checkpoint(st: TrainState, cfg: TrainConfig) -> Checkpoint:
    return Checkpoint(st.g, st.d, st.embed, st.opt_g, st.opt_d, st.step, cfg.trajectory_hash())


def _apply(cfg: TrainConfig, state: dict, params, grads):
    o = cfg.optimizer
    if o["kind"] == "adam":
        return adam_step(state, params, grads, o["lr"], o["beta1"], o["beta2"], o["eps"])
    return rmsprop_step(state, params, grads, o["lr"], o["decay"], o["eps"])


def _batch(cfg: TrainConfig, step: int, sub: int):
    real, labels = sample_mixture(cfg.data, cfg.batch_size, cfg.seed, counter=(step, sub))
    z = sample_latent(cfg.batch_size, cfg.latent_dim, cfg.latent_kind, cfg.seed,
                      counter=(step, sub))
    return real, labels, z


@dataclass
class StepGraph:
    graph: Graph
    loss: object
    g: Bound
    d: Bound
    embed: object = None


def discriminator_update_graph(cfg: TrainConfig, st: TrainState, step: int, sub: int) -> StepGraph:
    """Graph for one D update; only D (and the label map) are trainable."""
    real, labels, z = _batch(cfg, step, sub)
    if cfg.conditional:
        out = conditional_forward(st.g, st.d, st.embed, z, real, one_hot(labels, cfg.data.K),
                                  train_g=False, train_d=True, train_embed=True)
        loss = discriminator_loss(cfg.loss, out.real_scores, out.fake_scores)
        return StepGraph(out.graph, loss, out.g, out.d, out.embed)
    g = Graph()
    gb = bind(g, st.g, trainable=False)
    db = bind(g, st.d, trainable=True)
    fake = generator_forward(st.g, z, graph=g, bound=gb)
    rs = discriminator_forward(st.d, real, graph=g, bound=db)
    fs = discriminator_forward(st.d, fake, graph=g, bound=db)
    return StepGraph(g, discriminator_loss(cfg.loss, rs, fs), gb, db)


def generator_update_graph(cfg: TrainConfig, st: TrainState, step: int) -> StepGraph:
    """Graph for the G update; D and the label map enter as constants."""
    real, labels, z = _batch(cfg, step, cfg.d_steps_per_g)
    if cfg.conditional:
        out = conditional_forward(st.g, st.d, st.embed, z, real, one_hot(labels, cfg.data.K),
                                  train_g=True, train_d=False, train_embed=False)
        loss = generator_loss(cfg.loss, out.fake_scores, out.real_scores)
        return StepGraph(out.graph, loss, out.g, out.d, out.embed)
    g = Graph()
    gb = bind(g, st.g, trainable=True)
    db = bind(g, st.d, trainable=False)
    fake = generator_forward(st.g, z, graph=g, bound=gb)
    fs = discriminator_forward(st.d, fake, graph=g, bound=db)
    rs = discriminator_forward(st.d, real, graph=g, bound=db) if cfg.loss.symmetric_g else None
    return StepGraph(g, generator_loss(cfg.loss, fs, rs), gb, db)


def _grads(sg: StepGraph, which: str):
    nodes = (sg.g if which == "g" else sg.d).nodes()
    grads = [n.grad for n in nodes]
    bias = [i for i in range(1, len(nodes), 2)]
    for i in bias:
        grads[i] = grads[i].reshape(-1)
    if which == "d" and sg.embed is not None:
        grads.append(sg.embed.grad)
    return grads


def _build(fn, cfg, st, *args):
    try:
        return fn(cfg, st, *args)
    except NonFiniteScores as exc:
        raise NonFiniteLoss(f"{exc} at step {st.step + 1}") from exc


def train_step(cfg: TrainConfig, st: TrainState) -> StepRecord:
    """Advance ``st`` by one generator step.  Raises NonFiniteLoss before any update."""
    step = st.step + 1
    d_losses = []
    for sub in range(cfg.d_steps_per_g):
        sg = _build(discriminator_update_graph, cfg, st, step, sub)
        val = sg.loss.item()
        if not math.isfinite(val):
            raise NonFiniteLoss(f"discriminator loss {val} at step {step}, substep {sub}")
        sg.graph.backward(sg.loss)
        st.opt_d, new = _apply(cfg, st.opt_d, st.d_arrays(), _grads(sg, "d"))
        st.set_d_arrays(new)
        d_losses.append(val)

    sg = _build(generator_update_graph, cfg, st, step)
    g_val = sg.loss.item()
    if not math.isfinite(g_val):
        raise NonFiniteLoss(f"generator loss {g_val} at step {step}")
    sg.graph.backward(sg.loss)
    grads = _grads(sg, "g")
    norm = math.sqrt(sum(float((x * x).sum()) for x in grads))
    st.opt_g, new = _apply(cfg, st.opt_g, st.g.arrays(), grads)
    st.g = st.g.with_arrays(new)
    st.step = step
    return StepRecord(step, float(sum(d_losses) / len(d_losses)), g_val, norm)


def generate(cfg: TrainConfig, st: TrainState, n: int | None = None, labels=None):
    """Evaluation samples from a fixed latent batch (same every call)."""
    n = n or cfg.eval_samples
    z = sample_latent(n, cfg.latent_dim, cfg.latent_kind, cfg.seed, purpose=_rng.EVAL)
    if cfg.conditional:
        if labels is None:
            labels = np.arange(n) % cfg.data.K
        code = one_hot(labels, cfg.data.K) @ st.embed.mapping_matrix
        z = np.concatenate([z, code], axis=1)
    out = generator_forward(st.g, z, trainable=False).value
    return out, (np.asarray(labels) if cfg.conditional else None)


def snapshot(cfg: TrainConfig, st: TrainState) -> Snapshot:
    samples, labels = generate(cfg, st)
    return Snapshot(st.step, samples, labels, mode_stats(samples, cfg.data))


def train_run(cfg: TrainConfig, out_dir=None, resume: Checkpoint | None = None,
              progress: bool = False) -> tuple[RunLog, Checkpoint]:
    """Train to ``cfg.total_g_steps`` generator steps.

    With ``resume`` the run continues from the checkpoint's step.  When
    ``out_dir`` is given the step CSV, snapshots, run metadata, and
    checkpoints are written there.
    """
    if resume is not None:
        if resume.config_hash != cfg.trajectory_hash():
            from .checkpoint import CheckpointError
            raise CheckpointError("config hash mismatch", checkpoint=resume.config_hash,
                                  expected=cfg.trajectory_hash())
        st = state_from_checkpoint(resume)
    else:
        st = init_state(cfg)
    runlog = RunLog(cfg)
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        (out / "snapshots").mkdir(parents=True, exist_ok=True)

    while st.step < cfg.total_g_steps:
        try:
            rec = train_step(cfg, st)
        except NonFiniteLoss as exc:
            runlog.aborted = {"step": st.step + 1, "reason": str(exc)}
            log.error("aborting run: %s", exc)
            break
        runlog.records.append(rec)
        if st.step % cfg.snapshot_every == 0:
            snap = snapshot(cfg, st)
            runlog.snapshots.append(snap)
            if progress:
                log.info("step %d d=%.4f g=%.4f modes=%d hq=%.3f", st.step, rec.d_loss,
                         rec.g_loss, snap.stats.modes_covered, snap.stats.high_quality_fraction)
            if out is not None:
                (out / "snapshots" / f"step_{st.step:07d}.json").write_text(snap.to_json())
                checkpoint_save(to_checkpoint(st, cfg), out / "checkpoint_latest.json")

    ck = to_checkpoint(st, cfg)
    if out is not None:
        (out / "steps.csv").write_text(runlog.csv())
        (out / "run.json").write_text(json.dumps(runlog.meta(), indent=2, sort_keys=True))
        checkpoint_save(ck, out / "checkpoint_final.json")
    return runlog, ck
