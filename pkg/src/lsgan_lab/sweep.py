"""Seed sweeps over training configs, optionally across worker processes."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import os
import statistics

from .config import TrainConfig
from .metrics import class_fidelity
from .trainer import generate, state_from_checkpoint, train_run

THREADS_ENV = "LSGAN_LAB_THREADS"


@dataclass
class SeedResult:
    name: str
    seed: int
    modes_covered: int
    high_quality_fraction: float
    class_fidelity: list[float] | None = None
    aborted: bool = False


def run_seed(name: str, cfg_dict: dict, seed: int) -> SeedResult:
    cfg = TrainConfig.from_dict({**cfg_dict, "seed": seed})
    # one snapshot at the very end
    cfg = cfg.replace(snapshot_every=max(1, cfg.total_g_steps))
    runlog, ck = train_run(cfg)
    st = state_from_checkpoint(ck)
    if runlog.snapshots:
        stats = runlog.final_stats
    else:
        from .metrics import mode_stats
        stats = mode_stats(generate(cfg, st)[0], cfg.data)
    fid = None
    if cfg.conditional:
        samples, labels = generate(cfg, st)
        fid = [float(v) for v in class_fidelity(samples, labels, cfg.data)]
    return SeedResult(name, seed, stats.modes_covered, stats.high_quality_fraction, fid,
                      runlog.aborted is not None)


def workers_from_env() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def sweep(jobs: list[tuple[str, TrainConfig]], seeds, workers: int | None = None) -> list[SeedResult]:
    """Run every (config, seed) pair; results ordered by job then seed."""
    workers = workers or workers_from_env()
    tasks = [(name, cfg.to_dict(), s) for name, cfg in jobs for s in seeds]
    if workers == 1 or len(tasks) == 1:
        return [run_seed(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_seed, *t) for t in tasks]
        return [f.result() for f in futures]


def median_modes(results: list[SeedResult], name: str) -> float:
    return statistics.median(r.modes_covered for r in results if r.name == name)


def median_hq(results: list[SeedResult], name: str) -> float:
    return statistics.median(r.high_quality_fraction for r in results if r.name == name)
