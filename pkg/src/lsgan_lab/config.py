"""Training configuration and its JSON form."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
import hashlib
import json

from .losses import LossSpec, FAMILIES, CE_VARIANTS
from .networks import ACTIVATIONS
from .synthetic import RingMixture


class ConfigError(ValueError):
    """Raised with every failing field, not just the first."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid config:\n" + "\n".join(f"  - {p}" for p in self.problems))


@dataclass
class TrainConfig:
    loss: LossSpec = field(default_factory=LossSpec)
    latent_dim: int = 16
    latent_kind: str = "gaussian"
    batch_size: int = 256
    total_g_steps: int = 20000
    d_steps_per_g: int = 1
    optimizer: dict = field(default_factory=lambda: {
        "kind": "adam", "lr": 1e-3, "beta1": 0.5, "beta2": 0.999, "eps": 1e-8})
    data: RingMixture = field(default_factory=RingMixture)
    g_hidden: tuple = (128, 128)
    d_hidden: tuple = (128, 128)
    g_activation: str = "tanh"
    d_activation: str = "tanh"
    conditional: bool = False
    embed_dim: int = 4
    seed: int = 0
    snapshot_every: int = 1000
    eval_samples: int = 2048

    def to_dict(self) -> dict:
        d = asdict(self)
        d["loss"] = self.loss.to_dict()
        d["data"] = self.data.to_dict()
        d["g_hidden"] = list(self.g_hidden)
        d["d_hidden"] = list(self.d_hidden)
        d["optimizer"] = dict(self.optimizer)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def trajectory_hash(self) -> str:
        """Hash of every field that influences parameter updates."""
        d = self.to_dict()
        for k in ("total_g_steps", "snapshot_every", "eval_samples"):
            d.pop(k)
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()

    def replace(self, **changes) -> "TrainConfig":
        d = self.to_dict()
        for k, v in changes.items():
            d[k] = v.to_dict() if hasattr(v, "to_dict") else v
        return TrainConfig.from_dict(d)

    @classmethod
    def from_dict(cls, raw: dict) -> "TrainConfig":
        problems: list[str] = []
        defaults = cls()
        known = set(defaults.to_dict())
        for k in raw:
            if k not in known:
                problems.append(f"{k}: unknown field")

        def pos_int(name):
            v = raw.get(name, getattr(defaults, name))
            if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
                problems.append(f"{name}: must be a positive integer, got {v!r}")
            return v

        kw = {name: pos_int(name) for name in
              ("latent_dim", "batch_size", "d_steps_per_g", "snapshot_every", "eval_samples",
               "embed_dim")}
        steps = raw.get("total_g_steps", defaults.total_g_steps)
        if isinstance(steps, bool) or not isinstance(steps, int) or steps < 0:
            problems.append(f"total_g_steps: must be a non-negative integer, got {steps!r}")
        kw["total_g_steps"] = steps
        seed = raw.get("seed", defaults.seed)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            problems.append(f"seed: must be a non-negative integer, got {seed!r}")
        kw["seed"] = seed

        kind = raw.get("latent_kind", defaults.latent_kind)
        if kind not in ("gaussian", "uniform"):
            problems.append(f"latent_kind: must be 'gaussian' or 'uniform', got {kind!r}")
        kw["latent_kind"] = kind

        for name in ("g_activation", "d_activation"):
            v = raw.get(name, getattr(defaults, name))
            if v not in ACTIVATIONS:
                problems.append(f"{name}: must be one of {ACTIVATIONS}, got {v!r}")
            kw[name] = v
        for name in ("g_hidden", "d_hidden"):
            v = raw.get(name, list(getattr(defaults, name)))
            if not isinstance(v, (list, tuple)) or not all(
                    isinstance(h, int) and not isinstance(h, bool) and h > 0 for h in v):
                problems.append(f"{name}: must be a list of positive integers, got {v!r}")
                v = ()
            kw[name] = tuple(v)

        cond = raw.get("conditional", False)
        if not isinstance(cond, bool):
            problems.append(f"conditional: must be true or false, got {cond!r}")
        kw["conditional"] = bool(cond)

        loss_raw = raw.get("loss", {})
        loss = None
        if not isinstance(loss_raw, dict):
            problems.append("loss: must be an object")
        else:
            bad = set(loss_raw) - {"family", "a", "b", "c", "ce_variant", "symmetric_g"}
            problems += [f"loss.{k}: unknown field" for k in sorted(bad)]
            fam = loss_raw.get("family", "least_squares")
            var = loss_raw.get("ce_variant", "non_saturating")
            if fam not in FAMILIES:
                problems.append(f"loss.family: must be one of {FAMILIES}, got {fam!r}")
            if var not in CE_VARIANTS:
                problems.append(f"loss.ce_variant: must be one of {CE_VARIANTS}, got {var!r}")
            nums = {}
            for k, dv in (("a", 0.0), ("b", 1.0), ("c", 1.0)):
                v = loss_raw.get(k, dv)
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    problems.append(f"loss.{k}: must be a number, got {v!r}")
                    v = dv
                nums[k] = float(v)
            if fam == "least_squares" and not nums["a"] < nums["b"]:
                problems.append(f"loss.a/loss.b: least squares needs a < b, got {nums['a']}, {nums['b']}")
            sym = loss_raw.get("symmetric_g", False)
            if not isinstance(sym, bool):
                problems.append(f"loss.symmetric_g: must be true or false, got {sym!r}")
            if not any(p.startswith("loss.") for p in problems):
                loss = LossSpec(fam, nums["a"], nums["b"], nums["c"], var, sym)

        opt = raw.get("optimizer", defaults.optimizer)
        opt_out = None
        if not isinstance(opt, dict) or opt.get("kind") not in ("adam", "rmsprop"):
            problems.append("optimizer.kind: must be 'adam' or 'rmsprop'")
        else:
            if opt["kind"] == "adam":
                base = {"kind": "adam", "lr": 1e-3, "beta1": 0.5, "beta2": 0.999, "eps": 1e-8}
            else:
                base = {"kind": "rmsprop", "lr": 1e-3, "decay": 0.9, "eps": 1e-8}
            for k in opt:
                if k not in base:
                    problems.append(f"optimizer.{k}: unknown field for {opt['kind']}")
            base.update({k: v for k, v in opt.items() if k in base})
            for k, v in base.items():
                if k == "kind":
                    continue
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    problems.append(f"optimizer.{k}: must be a number, got {v!r}")
                    continue
                base[k] = float(v)
                if k in ("lr", "eps") and not v > 0:
                    problems.append(f"optimizer.{k}: must be positive, got {v!r}")
                if k in ("beta1", "beta2", "decay") and not 0 <= v < 1:
                    problems.append(f"optimizer.{k}: must lie in [0, 1), got {v!r}")
            opt_out = base

        data_raw = raw.get("data", {})
        data = None
        if not isinstance(data_raw, dict):
            problems.append("data: must be an object")
        else:
            bad = set(data_raw) - {"K", "radius", "sigma"}
            problems += [f"data.{k}: unknown field" for k in sorted(bad)]
            if not bad:
                try:
                    data = RingMixture(int(data_raw.get("K", 8)), float(data_raw.get("radius", 2.0)),
                                       float(data_raw.get("sigma", 0.05)))
                except (TypeError, ValueError) as exc:
                    problems.append(f"data: {exc}")

        if problems:
            raise ConfigError(problems)
        return cls(loss=loss, optimizer=opt_out, data=data, **kw)

    @classmethod
    def from_json(cls, text: str) -> "TrainConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"<file>: not valid JSON ({exc})"]) from None
        if not isinstance(raw, dict):
            raise ConfigError(["<file>: top level must be an object"])
        return cls.from_dict(raw)


def lsgan_toy_config(**overrides) -> TrainConfig:
    return TrainConfig().replace(**overrides)


def gan_toy_config(**overrides) -> TrainConfig:
    cfg = TrainConfig(loss=LossSpec(family="sigmoid_ce"))
    return cfg.replace(**overrides) if overrides else cfg
