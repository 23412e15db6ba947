"""Bit-exact JSON checkpoints.

Arrays are stored as the hexadecimal form of their IEEE-754 64-bit words,
so a save/load round trip preserves every bit.  A SHA-256 of the payload
detects corruption; the config hash guards against resuming a different
experiment.
"""

from __future__ import annotations

from dataclasses import dataclass
import hashlib
import json
from pathlib import Path

import numpy as np

from .networks import LabelEmbed, MlpParams

FORMAT = "lsgan-lab-checkpoint"
VERSION = 1


class CheckpointError(Exception):
    def __init__(self, reason: str, **details):
        self.reason = reason
        self.details = details
        extra = ", ".join(f"{k}={v}" for k, v in details.items())
        super().__init__(f"{reason}" + (f" ({extra})" if extra else ""))


@dataclass
class Checkpoint:
    g: MlpParams
    d: MlpParams
    embed: LabelEmbed | None
    opt_g: dict
    opt_d: dict
    step: int
    config_hash: str


def encode_array(a: np.ndarray) -> dict:
    a = np.ascontiguousarray(a, dtype=np.float64)
    return {"shape": list(a.shape), "hex": a.astype(">f8").tobytes().hex()}


def decode_array(obj: dict) -> np.ndarray:
    text = obj["hex"]
    shape = tuple(obj["shape"])
    n = int(np.prod(shape)) if shape else 1
    if len(text) != 16 * n:
        raise CheckpointError("array length does not match shape", shape=shape, chars=len(text))
    try:
        raw = bytes.fromhex(text)
    except ValueError:
        raise CheckpointError("array data is not hexadecimal", shape=shape) from None
    return np.frombuffer(raw, dtype=">f8").astype(np.float64).reshape(shape)


def _mlp_to_json(p: MlpParams) -> dict:
    return {"layer_sizes": list(p.layer_sizes), "hidden_activation": p.hidden_activation,
            "output_head": p.output_head, "seed": p.seed,
            "arrays": [encode_array(a) for a in p.arrays()]}


def _mlp_from_json(obj: dict) -> MlpParams:
    arrays = [decode_array(a) for a in obj["arrays"]]
    return MlpParams(tuple(obj["layer_sizes"]), arrays[0::2], arrays[1::2],
                     obj["hidden_activation"], obj["output_head"], obj["seed"])


def _opt_to_json(state: dict) -> dict:
    out = {"kind": state["kind"], "t": state["t"]}
    for k in ("m", "v", "ms"):
        if k in state:
            out[k] = [encode_array(a) for a in state[k]]
    return out


def _opt_from_json(obj: dict) -> dict:
    out = {"kind": obj["kind"], "t": int(obj["t"])}
    for k in ("m", "v", "ms"):
        if k in obj:
            out[k] = [decode_array(a) for a in obj[k]]
    return out


def _payload(ck: Checkpoint) -> dict:
    return {
        "step": ck.step,
        "config_hash": ck.config_hash,
        "g": _mlp_to_json(ck.g),
        "d": _mlp_to_json(ck.d),
        "embed": None if ck.embed is None else encode_array(ck.embed.mapping_matrix),
        "opt_g": _opt_to_json(ck.opt_g),
        "opt_d": _opt_to_json(ck.opt_d),
    }


def _digest(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def dumps(ck: Checkpoint) -> str:
    payload = _payload(ck)
    doc = {"format": FORMAT, "version": VERSION, "payload_sha256": _digest(payload),
           "payload": payload}
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def loads(text: str, expected_config_hash: str | None = None) -> Checkpoint:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CheckpointError("not valid JSON", error=str(exc)) from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise CheckpointError("not a checkpoint document")
    if doc.get("version") != VERSION:
        raise CheckpointError("unsupported version", found=doc.get("version"), expected=VERSION)
    payload = doc.get("payload")
    if not isinstance(payload, dict):
        raise CheckpointError("missing payload")
    found = _digest(payload)
    if found != doc.get("payload_sha256"):
        raise CheckpointError("payload checksum mismatch",
                              stored=doc.get("payload_sha256"), computed=found)
    if expected_config_hash is not None and payload["config_hash"] != expected_config_hash:
        raise CheckpointError("config hash mismatch",
                              checkpoint=payload["config_hash"], expected=expected_config_hash)
    try:
        embed = payload["embed"]
        return Checkpoint(
            g=_mlp_from_json(payload["g"]),
            d=_mlp_from_json(payload["d"]),
            embed=None if embed is None else LabelEmbed(decode_array(embed)),
            opt_g=_opt_from_json(payload["opt_g"]),
            opt_d=_opt_from_json(payload["opt_d"]),
            step=int(payload["step"]),
            config_hash=payload["config_hash"],
        )
    except CheckpointError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointError("malformed payload", error=repr(exc)) from None


def checkpoint_save(ck: Checkpoint, path) -> None:
    Path(path).write_text(dumps(ck))


def checkpoint_load(path, expected_config_hash: str | None = None) -> Checkpoint:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CheckpointError("cannot read file", path=str(path), error=exc.strerror) from None
    return loads(text, expected_config_hash)
