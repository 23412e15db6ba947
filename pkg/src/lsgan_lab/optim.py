"""Adam and RMSProp updates over lists of numpy arrays.

State is a plain dict so it serializes into checkpoints without adapters.
Updates return new arrays; inputs are never modified in place.
"""

from __future__ import annotations

import numpy as np


def _check(params, grads, *moments):
    if len(params) != len(grads):
        raise ValueError(f"{len(params)} parameters but {len(grads)} gradients")
    for i, (p, g) in enumerate(zip(params, grads)):
        if p.shape != g.shape:
            raise ValueError(f"parameter {i}: shape {p.shape} vs gradient {g.shape}")
        for m in moments:
            if m[i].shape != p.shape:
                raise ValueError(f"parameter {i}: state shape {m[i].shape} vs {p.shape}")


def adam_init(params) -> dict:
    return {"kind": "adam", "t": 0,
            "m": [np.zeros_like(p) for p in params],
            "v": [np.zeros_like(p) for p in params]}


def adam_step(state, params, grads, lr=1e-3, beta1=0.5, beta2=0.999, eps=1e-8):
    """Bias-corrected Adam.  Returns ``(new_state, new_params)``."""
    _check(params, grads, state["m"], state["v"])
    t = state["t"] + 1
    c1 = 1.0 - beta1 ** t
    c2 = 1.0 - beta2 ** t
    ms, vs, out = [], [], []
    for p, g, m, v in zip(params, grads, state["m"], state["v"]):
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * (g * g)
        out.append(p - lr * (m / c1) / (np.sqrt(v / c2) + eps))
        ms.append(m)
        vs.append(v)
    return {"kind": "adam", "t": t, "m": ms, "v": vs}, out


def rmsprop_init(params) -> dict:
    return {"kind": "rmsprop", "t": 0, "ms": [np.zeros_like(p) for p in params]}


def rmsprop_step(state, params, grads, lr=1e-3, decay=0.9, eps=1e-8):
    _check(params, grads, state["ms"])
    mss, out = [], []
    for p, g, ms in zip(params, grads, state["ms"]):
        ms = decay * ms + (1.0 - decay) * (g * g)
        out.append(p - lr * g / (np.sqrt(ms) + eps))
        mss.append(ms)
    return {"kind": "rmsprop", "t": state["t"] + 1, "ms": mss}, out
