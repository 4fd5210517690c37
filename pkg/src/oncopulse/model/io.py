"""Model archive format: one JSON document, float64 arrays as base64.

Arrays are stored little-endian row-major so archives round-trip
bit-identically across platforms.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

import numpy as np

from ..errors import ContractError

FORMAT_VERSION = 1


def encode_array(a: np.ndarray) -> dict:
    a = np.ascontiguousarray(a, dtype="<f8")
    return {
        "shape": list(a.shape),
        "data": base64.b64encode(a.tobytes()).decode("ascii"),
    }


def decode_array(d: dict) -> np.ndarray:
    raw = base64.b64decode(d["data"])
    a = np.frombuffer(raw, dtype="<f8").reshape(tuple(d["shape"]))
    return a.astype(np.float64).copy()


def write_archive(path: str | Path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"format_version": FORMAT_VERSION, **payload}
    path.write_text(json.dumps(doc, sort_keys=True) + "\n", encoding="utf-8")


def read_archive(path: str | Path) -> dict:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ContractError(f"unsupported archive format_version: {version!r}")
    return doc
