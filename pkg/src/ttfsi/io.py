"""Value-function and score file formats.

VFN1 binary layout: 8-byte magic ``TTFSIVF1``, little-endian ``u32`` d, then
``2^d`` little-endian float64 values in mask order. JSON alternative:
``{"d": int, "values": [...]}``.
"""
from __future__ import annotations

import csv
import io
import json
import struct
from pathlib import Path

import numpy as np

from .correction import MAX_D
from .fsi import InteractionScores
from .lattice import ValueFunction, mask_to_features

MAGIC = b"TTFSIVF1"


class FormatError(ValueError):
    pass


def write_vfn1(path, v: ValueFunction) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", v.d))
        fh.write(np.asarray(v.values, dtype="<f8").tobytes())


def read_vfn1(path) -> ValueFunction:
    raw = Path(path).read_bytes()
    return _parse_vfn1(raw)


def _parse_vfn1(raw: bytes) -> ValueFunction:
    if raw[:8] != MAGIC or len(raw) < 12:
        raise FormatError("not a VFN1 file")
    (d,) = struct.unpack("<I", raw[8:12])
    if d > MAX_D:
        raise FormatError(f"feature count {d} exceeds the supported maximum {MAX_D}")
    expected = 12 + 8 * (1 << d)
    if len(raw) != expected:
        raise FormatError(f"VFN1 with d={d} must be {expected} bytes, got {len(raw)}")
    values = np.frombuffer(raw, dtype="<f8", offset=12).astype(np.float64)
    try:
        return ValueFunction.from_array(values)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def write_json_values(path, v: ValueFunction) -> None:
    Path(path).write_text(json.dumps({"d": v.d, "values": v.values.tolist()}))


def read_value_function(path) -> ValueFunction:
    """Load VFN1 or JSON, sniffing the magic bytes."""
    raw = Path(path).read_bytes()
    if raw[:8] == MAGIC:
        return _parse_vfn1(raw)
    try:
        doc = json.loads(raw)
        d, values = int(doc["d"]), doc["values"]
    except (ValueError, KeyError, TypeError) as exc:
        raise FormatError(f"{path}: neither VFN1 nor value-function JSON") from exc
    if not 0 <= d <= MAX_D:
        raise FormatError(f"feature count {d} outside [0, {MAX_D}]")
    if len(values) != 1 << d:
        raise FormatError(f"expected {1 << d} values for d={d}, got {len(values)}")
    try:
        return ValueFunction.from_array(values)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def scores_to_json(scores: InteractionScores) -> str:
    doc = {
        "d": scores.d,
        "ell": scores.ell,
        "offset": scores.offset,
        "scores": [
            {"mask": m, "features": mask_to_features(m), "value": val}
            for m, val in zip(scores.masks.tolist(), scores.values.tolist())
        ],
    }
    return json.dumps(doc)


def scores_to_csv(scores: InteractionScores) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mask", "size", "features", "value"])
    for m, val in zip(scores.masks.tolist(), scores.values.tolist()):
        feats = mask_to_features(m)
        w.writerow([m, len(feats), ";".join(map(str, feats)), repr(val)])
    return buf.getvalue()


def scores_from_json(text: str) -> InteractionScores:
    doc = json.loads(text)
    masks = np.array([e["mask"] for e in doc["scores"]], dtype=np.int64)
    values = np.array([e["value"] for e in doc["scores"]], dtype=np.float64)
    return InteractionScores(doc["d"], doc["ell"], masks, values, doc["offset"])


def scores_from_csv(text: str, d: int, ell: int, offset: float = 0.0) -> InteractionScores:
    rows = list(csv.DictReader(io.StringIO(text)))
    masks = np.array([int(r["mask"]) for r in rows], dtype=np.int64)
    values = np.array([float(r["value"]) for r in rows])
    return InteractionScores(d, ell, masks, values, offset)
