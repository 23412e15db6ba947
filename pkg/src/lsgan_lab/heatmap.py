"""Density-grid CSV files and binary PPM heatmaps.

Grid CSV layout::

    # x_min=<f>,x_max=<f>,y_min=<f>,y_max=<f>,resolution=<n>
    v[0,0],v[0,1],...        <- row i holds y = y_min + i * dy
    ...

Colormap: piecewise-linear through black, indigo, crimson, orange and
pale yellow.  Perceived luminance (Rec. 601 weights) increases strictly
along the ramp, so brighter always means denser.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .metrics import DensityGrid, GridSpec

ANCHORS = np.array([
    [0, 0, 0],
    [40, 11, 84],
    [187, 55, 84],
    [249, 142, 9],
    [252, 255, 164],
], dtype=np.float64)


def colormap(t) -> np.ndarray:
    """Map values in [0, 1] to uint8 RGB triples."""
    t = np.clip(np.asarray(t, dtype=np.float64), 0.0, 1.0)
    pos = t * (len(ANCHORS) - 1)
    lo = np.minimum(pos.astype(np.int64), len(ANCHORS) - 2)
    frac = (pos - lo)[..., None]
    rgb = ANCHORS[lo] * (1.0 - frac) + ANCHORS[lo + 1] * frac
    return np.rint(rgb).astype(np.uint8)


def grid_to_csv(grid: DensityGrid) -> str:
    s = grid.spec
    lines = [f"# x_min={s.x_min!r},x_max={s.x_max!r},y_min={s.y_min!r},"
             f"y_max={s.y_max!r},resolution={s.resolution}"]
    lines += [",".join(repr(float(v)) for v in row) for row in grid.values]
    return "\n".join(lines) + "\n"


def grid_from_csv(text: str) -> DensityGrid:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ValueError("grid CSV must start with a '# x_min=...' header")
    fields = {}
    for part in lines[0].lstrip("#").split(","):
        key, _, val = part.strip().partition("=")
        fields[key] = val
    try:
        spec = GridSpec(float(fields["x_min"]), float(fields["x_max"]), float(fields["y_min"]),
                        float(fields["y_max"]), int(fields["resolution"]))
    except KeyError as exc:
        raise ValueError(f"grid CSV header missing {exc}") from None
    values = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    if values.shape != (spec.resolution, spec.resolution):
        raise ValueError(f"grid has shape {values.shape}, header says {spec.resolution}")
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise ValueError("grid values must be finite and non-negative")
    return DensityGrid(spec, values)


def render_ppm(values: np.ndarray) -> bytes:
    """P6 image, one pixel per cell, highest y row at the top."""
    v = np.asarray(values, dtype=np.float64)
    top = v.max() if v.size else 0.0
    t = v / top if top > 0 else np.zeros_like(v)
    rgb = colormap(t[::-1])
    h, w = v.shape
    return f"P6\n{w} {h}\n255\n".encode() + rgb.tobytes()


def write_ppm(values, path) -> None:
    Path(path).write_bytes(render_ppm(values))


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6":
        raise ValueError("not a binary PPM")
    w, h = (int(x) for x in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)
