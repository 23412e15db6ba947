"""Command-line entry point.

Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from .checkpoint import CheckpointError, checkpoint_load
from .config import ConfigError, TrainConfig, gan_toy_config, lsgan_toy_config
from .divergence import chi2_table
from .heatmap import grid_from_csv, grid_to_csv, render_ppm
from .metrics import GridSpec, kde2d, saturation_probe
from .synthetic import RingMixture, sample_mixture
from .sweep import median_hq, median_modes, sweep, workers_from_env
from .trainer import generate, state_from_checkpoint, train_run

OK, CHECK_FAILED, USAGE = 0, 1, 2

TRAIN_OUTPUTS = ("steps.csv", "run.json", "checkpoint_final.json", "kde.csv", "kde.ppm")


class UsageError(Exception):
    pass


def _refuse_overwrite(paths, force: bool):
    existing = [str(p) for p in paths if Path(p).exists()]
    if existing and not force:
        raise UsageError("refusing to overwrite " + ", ".join(existing) + " (use --force)")


def _load_config(path) -> TrainConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    return TrainConfig.from_json(text)


def cmd_train(args) -> int:
    cfg = _load_config(args.config)
    out = Path(args.out_dir)
    _refuse_overwrite([out / name for name in TRAIN_OUTPUTS], args.force)
    out.mkdir(parents=True, exist_ok=True)
    resume = checkpoint_load(args.resume, cfg.trajectory_hash()) if args.resume else None
    runlog, ck = train_run(cfg, out, resume=resume, progress=args.verbose)
    samples, _ = generate(cfg, state_from_checkpoint(ck))
    r = cfg.data.radius + 1.0
    grid = kde2d(samples, args.bandwidth, GridSpec(-r, r, -r, r, args.resolution))
    (out / "kde.csv").write_text(grid_to_csv(grid))
    (out / "kde.ppm").write_bytes(render_ppm(grid.values))
    if runlog.aborted:
        print(f"run aborted: {runlog.aborted['reason']}", file=sys.stderr)
        return CHECK_FAILED
    stats = runlog.final_stats
    if stats is not None:
        print(f"step {ck.step}: modes_covered={stats.modes_covered} "
              f"high_quality_fraction={stats.high_quality_fraction:.4f}")
    return OK


def cmd_divergence_check(args) -> int:
    rows = chi2_table(args.num_pairs, args.support_size, args.seed, tuple(args.scheme))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["pair", "K", "two_c_g", "chi2", "abs_diff"])
    for r in rows:
        w.writerow([r.pair, r.K, repr(r.value), repr(r.chi2), repr(r.diff)])
    worst = max((r.diff for r in rows), default=0.0)
    ok = worst <= args.tol
    print(f"# max_abs_diff={worst!r} tol={args.tol!r} {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    return OK if ok else CHECK_FAILED


def _distances(args):
    if args.distances:
        return [float(d) for d in args.distances]
    n = int(round((args.d_max - args.d_min) / args.d_step))
    return [args.d_min + i * args.d_step for i in range(n + 1)]


def cmd_probe(args) -> int:
    ds = _distances(args)
    families = ["sigmoid_ce", "least_squares"] if args.family == "both" else [args.family]
    cols = {f: saturation_probe(f, args.direction, ds, c=args.c) for f in families}
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["distance", *families])
    for i, d in enumerate(ds):
        w.writerow([repr(d), *(repr(float(cols[f][i])) for f in families)])
    finite = all(np.all(np.isfinite(v)) for v in cols.values())
    return OK if finite else CHECK_FAILED


def _compare_configs(args):
    ls = _load_config(args.lsgan_config) if args.lsgan_config else lsgan_toy_config()
    gan = _load_config(args.gan_config) if args.gan_config else gan_toy_config()
    if args.steps is not None:
        ls, gan = ls.replace(total_g_steps=args.steps), gan.replace(total_g_steps=args.steps)
    return ls, gan


def cmd_compare(args) -> int:
    ls, gan = _compare_configs(args)
    workers = args.workers or workers_from_env()
    results = sweep([("lsgan", ls), ("gan", gan)], args.seeds, workers)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["config", "seed", "modes_covered", "high_quality_fraction"])
    for r in results:
        w.writerow([r.name, r.seed, r.modes_covered, f"{r.high_quality_fraction:.6f}"])
    med = {n: (median_modes(results, n), median_hq(results, n)) for n in ("lsgan", "gan")}
    for n, (m, hq) in med.items():
        w.writerow([n, "median", m, f"{hq:.6f}"])
    return OK if med["lsgan"][0] >= med["gan"][0] else CHECK_FAILED


def cmd_emit_data(args) -> int:
    mix = RingMixture(args.K, args.radius, args.sigma)
    pts, labels = sample_mixture(mix, args.n, args.seed)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "label"])
    for (x, y), k in zip(pts, labels):
        w.writerow([repr(float(x)), repr(float(y)), int(k)])
    if args.out:
        _refuse_overwrite([args.out], args.force)
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return OK


def cmd_render(args) -> int:
    _refuse_overwrite([args.out_ppm], args.force)
    try:
        grid = grid_from_csv(Path(args.grid_csv).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {args.grid_csv}: {exc.strerror}") from None
    except ValueError as exc:
        raise UsageError(f"{args.grid_csv}: {exc}") from None
    Path(args.out_ppm).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out_ppm).write_bytes(render_ppm(grid.values))
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lsgan-lab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train one model from a JSON config")
    t.add_argument("config")
    t.add_argument("out_dir")
    t.add_argument("--resume", help="checkpoint to continue from")
    t.add_argument("--bandwidth", type=float, default=0.1)
    t.add_argument("--resolution", type=int, default=128)
    t.add_argument("--force", action="store_true")
    t.add_argument("-v", "--verbose", action="store_true")
    t.set_defaults(func=cmd_train)

    d = sub.add_parser("divergence-check", help="2C(G) vs Pearson chi2 on random pairs (CSV)")
    d.add_argument("--num-pairs", type=int, default=100)
    d.add_argument("--support-size", type=int, default=None,
                   help="fixed K; default draws K from 2..16 per pair")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--scheme", type=float, nargs=3, default=[-1.0, 1.0, 0.0],
                   metavar=("A", "B", "C"))
    d.add_argument("--tol", type=float, default=1e-10)
    d.set_defaults(func=cmd_divergence_check)

    pr = sub.add_parser("probe", help="generator-gradient norm vs distance (CSV)")
    pr.add_argument("--family", choices=["both", "sigmoid_ce", "least_squares"], default="both")
    pr.add_argument("--d-min", type=float, default=0.0)
    pr.add_argument("--d-max", type=float, default=10.0)
    pr.add_argument("--d-step", type=float, default=1.0)
    pr.add_argument("--distances", type=float, nargs="+")
    pr.add_argument("--direction", type=float, nargs="+", default=[1.0, 0.0])
    pr.add_argument("--c", type=float, default=1.0)
    pr.set_defaults(func=cmd_probe)

    c = sub.add_parser("compare", help="LSGAN vs regular GAN mode coverage over seeds")
    c.add_argument("--lsgan-config")
    c.add_argument("--gan-config")
    c.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    c.add_argument("--steps", type=int, help="override total_g_steps on both sides")
    c.add_argument("--workers", type=int, help="worker processes; default $LSGAN_LAB_THREADS or 1")
    c.set_defaults(func=cmd_compare)

    e = sub.add_parser("emit-data", help="sample the ring mixture as CSV x,y,label")
    e.add_argument("--n", type=int, default=1000)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--K", type=int, default=8)
    e.add_argument("--radius", type=float, default=2.0)
    e.add_argument("--sigma", type=float, default=0.05)
    e.add_argument("--out")
    e.add_argument("--force", action="store_true")
    e.set_defaults(func=cmd_emit_data)

    r = sub.add_parser("render", help="grid CSV to P6 PPM heatmap")
    r.add_argument("grid_csv")
    r.add_argument("out_ppm")
    r.add_argument("--force", action="store_true")
    r.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(message)s")
    try:
        return args.func(args)
    except (ConfigError, UsageError, CheckpointError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
