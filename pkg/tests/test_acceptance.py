"""Acceptance checks, one per criterion.

Each test records a single ``[ACCEPT n] PASS|FAIL`` line with the measured
quantity, then asserts; the lines are repeated in the terminal summary.  Criteria 6 and 7 train full-length toy models and
take tens of minutes on one core; set LSGAN_LAB_THREADS to fan out seeds.
"""

import math
import statistics
import time

import numpy as np
import pytest

from lsgan_lab.autodiff import Graph, finite_diff_check
from lsgan_lab.config import gan_toy_config, lsgan_toy_config
from lsgan_lab.divergence import (
    gan_value_at_optimum, js_divergence, lsgan_value_at_optimum, optimal_discriminator,
    pearson_chi2_mix, random_pair,
)
from lsgan_lab.losses import ce_d_loss, ce_g_loss, ls_d_loss, ls_g_loss
from lsgan_lab.metrics import saturation_probe
from lsgan_lab.networks import Bound, init_mlp, mlp_forward
from lsgan_lab.sweep import median_modes, sweep
from lsgan_lab.checkpoint import dumps
from lsgan_lab.losses import LossSpec
from lsgan_lab.trainer import train_run

ORACLE_SEED = 20240


def oracle_pairs(n=100):
    sizes = np.random.default_rng(ORACLE_SEED).integers(2, 17, size=n)
    return [random_pair(ORACLE_SEED, i, int(k)) for i, k in enumerate(sizes)]


def golden_min(f, lo, hi, tol=1e-11):
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


# 1 ------------------------------------------------------------------------

def _random_case(seed):
    rng = np.random.default_rng(seed)
    depth = int(rng.integers(1, 4))
    sizes = [int(rng.integers(1, 5))] + [int(rng.integers(1, 17)) for _ in range(depth)] + [1]
    act = ("relu", "leaky_relu", "tanh")[seed % 3]
    p = init_mlp(sizes, act, "linear", seed=seed)
    arrays = [a if a.ndim == 2 else a.reshape(1, -1) for a in p.arrays()]
    arrays = [a + 0.1 * rng.normal(size=a.shape) for a in arrays]
    real = rng.normal(size=(4, sizes[0]))
    fake = rng.normal(size=(4, sizes[0]))
    return p, arrays, real, fake


def _check_family(family):
    worst, checked, skipped, where = 0.0, 0, 0, None
    for seed in range(100):
        p, arrays, real, fake = _random_case(seed)

        def build(g, nodes):
            b = Bound(p, nodes[0::2], nodes[1::2])
            rs = mlp_forward(g, b, g.constant(real))
            fs = mlp_forward(g, b, g.constant(fake))
            if family == "least_squares":
                return g.add(ls_d_loss(rs, fs, 0.0, 1.0), ls_g_loss(fs, 1.0))
            rp, fp = g.sigmoid(rs), g.sigmoid(fs)
            return g.add(ce_d_loss(rp, fp), ce_g_loss(fp))

        res = finite_diff_check(build, arrays, eps=1e-4)
        if res.max_error > worst:
            worst, where = res.max_error, (seed, p.hidden_activation, res.worst_pair)
        checked, skipped = checked + res.checked, skipped + res.skipped
    return worst, checked, skipped, where


def test_1_gradient_correctness(report):
    t = time.perf_counter()
    out = {f: _check_family(f) for f in ("least_squares", "sigmoid_ce")}
    elapsed = time.perf_counter() - t
    fam, (worst, _, _, (seed, act, (ad, fd))) = max(out.items(), key=lambda kv: kv[1][0])
    checked = sum(v[1] for v in out.values())
    ok = worst <= 1e-5 and elapsed < 30 and checked > 0
    report(1, "finite differences vs autodiff, 100 MLPs x {LS, CE}", ok,
           f"max rel err {worst:.2e} over {checked} coords "
           f"({sum(v[2] for v in out.values())} kink-skipped), {elapsed:.1f}s; worst at "
           f"{fam} seed {seed} ({act}): autodiff {ad:.6e} vs fd {fd:.6e}")


# 2 ------------------------------------------------------------------------

def test_2_pearson_chi2_equivalence(report):
    t = time.perf_counter()
    pairs = oracle_pairs()
    worst = {}
    for scheme in ((-1.0, 1.0, 0.0), (0.0, 2.0, 1.0)):
        worst[scheme] = max(abs(lsgan_value_at_optimum(pd, pg, *scheme) - pearson_chi2_mix(pd, pg))
                            for pd, pg in pairs)
    elapsed = time.perf_counter() - t
    ok = max(worst.values()) <= 1e-10 and elapsed < 5
    report(2, "2C(G) = chi2(p_d+p_g || 2p_g)", ok,
           ", ".join(f"{s}: {w:.1e}" for s, w in worst.items()) + f", {elapsed:.2f}s")


# 3 ------------------------------------------------------------------------

def test_3_optimal_discriminator(report):
    a, b = 0.0, 1.0
    worst = 0.0
    for pd, pg in oracle_pairs():
        closed = optimal_discriminator(pd, pg, a, b)
        for x in range(len(pd)):
            wd, wg = pd.probs[x], pg.probs[x]
            if wd + wg == 0:
                continue
            s = golden_min(lambda s: 0.5 * wd * (s - b) ** 2 + 0.5 * wg * (s - a) ** 2, a - 1, b + 1)
            worst = max(worst, abs(s - closed[x]))
    report(3, "closed-form D* vs golden-section minimiser", worst <= 1e-6, f"max |diff| {worst:.1e}")


# 4 ------------------------------------------------------------------------

def test_4_gan_js_equivalence(report):
    worst = max(abs(gan_value_at_optimum(pd, pg) - (2 * js_divergence(pd, pg) - math.log(4)))
                for pd, pg in oracle_pairs())
    # at p_d = p_g the optimum is exactly -log 4
    equal = [abs(gan_value_at_optimum(pd, pd) + math.log(4)) for pd, _ in oracle_pairs(20)]
    ok = worst <= 1e-10 and max(equal) <= 1e-12
    report(4, "GAN optimum = 2 JS - log 4", ok,
           f"max |diff| {worst:.1e}, at p_d=p_g max |V + log 4| {max(equal):.1e}")


# 5 ------------------------------------------------------------------------

def test_5_saturation_probe(report):
    d = list(range(11))
    ce = saturation_probe("sigmoid_ce", [1.0, 0.0], d)
    ls = saturation_probe("least_squares", [1.0, 0.0], d)
    ok = (np.all(np.diff(ce) < 0) and ce[10] < 1e-3 and np.all(np.diff(ls[1:]) > 0)
          and abs(ls[10] - 9.0) <= 1e-12 and ls[1] == 0.0)
    report(5, "generator-gradient saturation", ok,
           f"CE d=10 {ce[10]:.3e}; LS d=1 {float(ls[1])!r}, d=10 {float(ls[10])!r}")


# 6 ------------------------------------------------------------------------

SEEDS = [1, 2, 3, 4, 5]


@pytest.fixture(scope="module")
def stability_results():
    t = time.perf_counter()
    res = sweep([("lsgan", lsgan_toy_config()), ("gan", gan_toy_config())], SEEDS)
    return res, time.perf_counter() - t


def test_6_stability(stability_results, report):
    res, elapsed = stability_results
    ls, gan = median_modes(res, "lsgan"), median_modes(res, "gan")
    per = " ".join(f"{r.name}/{r.seed}={r.modes_covered}" for r in res)
    ok = ls >= 7 and ls >= gan and elapsed / len(res) <= 15 * 60
    report(6, "8-mode ring, 20k steps, 5 seeds", ok,
           f"median modes LSGAN {ls} vs GAN {gan}; {per}; {elapsed / len(res):.0f}s/run")


# 7 ------------------------------------------------------------------------

def test_7_conditional(report):
    res = sweep([("cond", lsgan_toy_config(conditional=True))], [1, 2, 3])
    good = [sum(f > 0.5 for f in r.class_fidelity) for r in res]
    med = statistics.median(good)
    report(7, "conditional ring, classes with >50% on own mode", med >= 6,
           f"median {med} of 8 (per seed {good})")


# 8 ------------------------------------------------------------------------

def test_8_determinism_and_resume(report):
    cfg = lsgan_toy_config(total_g_steps=200, snapshot_every=100, eval_samples=256)
    a, ca = train_run(cfg)
    b, cb = train_run(cfg)
    _, mid = train_run(cfg.replace(total_g_steps=120))
    rest, cr = train_run(cfg, resume=mid)
    same = a.csv() == b.csv() and dumps(ca) == dumps(cb)
    resumed = dumps(cr) == dumps(ca) and [r.csv() for r in rest.records] == [
        r.csv() for r in a.records[120:]]
    report(8, "bit-identical reruns and resume", same and resumed,
           f"rerun identical={same}, resume identical={resumed}")


# 9 ------------------------------------------------------------------------

def test_9_symmetric_term_neutral(report):
    cfg = lsgan_toy_config(total_g_steps=100, snapshot_every=100, eval_samples=256)
    la, ca = train_run(cfg)
    lb, cb = train_run(cfg.replace(loss=LossSpec(symmetric_g=True)))
    same = all(x.tobytes() == y.tobytes() for x, y in zip(
        ca.g.arrays() + ca.d.arrays(), cb.g.arrays() + cb.d.arrays()))
    changed = any(r.g_loss != s.g_loss for r, s in zip(la.records, lb.records))
    report(9, "symmetric generator term", same and changed,
           f"parameters identical={same}, logged g_loss differs={changed}")
