"""Reading and writing channel description files.

A channel file is YAML (JSON is accepted as a subset)::

    input_alphabet: ["0", "1"]
    output_alphabet: ["0", "1"]
    matrix:
      - [0.9, 0.1]
      - [0.1, 0.9]
    cost: [0, 1]          # optional, defaults to all zero
"""
from __future__ import annotations

from pathlib import Path
from typing import Union

import numpy as np
import yaml

from .channel import ROW_SUM_TOL, Channel, ChannelError

RENORMALIZE_TOL = 1e-9


def parse_channel(doc) -> Channel:
    if not isinstance(doc, dict):
        raise ChannelError("channel file must be a mapping")
    missing = [k for k in ("input_alphabet", "output_alphabet", "matrix") if k not in doc]
    if missing:
        raise ChannelError(f"channel file is missing key(s): {', '.join(missing)}")
    xs = [str(s) for s in doc["input_alphabet"]]
    ys = [str(s) for s in doc["output_alphabet"]]
    try:
        w = np.array(doc["matrix"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ChannelError(f"matrix is not numeric: {exc}") from None
    if w.shape != (len(xs), len(ys)):
        raise ChannelError(f"matrix has shape {w.shape}, expected ({len(xs)}, {len(ys)})")
    sums = w.sum(axis=1)
    for x, s in enumerate(sums):
        if abs(s - 1.0) > RENORMALIZE_TOL:
            raise ChannelError(f"row {x} sums to {s:.12g}")
    # rows already within the validator's tolerance keep their decimals as written
    fix = np.abs(sums - 1.0) > ROW_SUM_TOL
    w[fix] /= sums[fix, None]
    cost = doc.get("cost")
    if cost is not None:
        cost = np.array(cost, dtype=float)
    return Channel(w, cost, tuple(xs), tuple(ys))


def load_channel(path: Union[str, Path]) -> Channel:
    text = Path(path).read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ChannelError(f"cannot parse {path}: {exc}") from None
    return parse_channel(doc)


def dump_channel(ch: Channel) -> str:
    return yaml.safe_dump({
        "input_alphabet": list(ch.input_labels),
        "output_alphabet": list(ch.output_labels),
        "matrix": ch.matrix.tolist(),
        "cost": ch.cost.tolist(),
    }, sort_keys=False, default_flow_style=None)
