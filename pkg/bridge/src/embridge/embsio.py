"""Writer for the EMBS embedding interchange format.

Layout (all integers little-endian):

    magic b"EMBS" | u32 version=1 | u32 metadata length | metadata JSON
    | row-major float32 payload | id table (per id: u16 length + UTF-8)

Metadata is compact JSON with sorted keys, so identical metadata always
serializes to identical bytes and reruns of a deterministic encoder
produce byte-identical files.  SHARED files carry one row per record;
PER_EMOTION files carry k rows per record, record-major in the metadata's
emotion order.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, DataError

MAGIC = b"EMBS"
VERSION = 1
SHARED = "SHARED"
PER_EMOTION = "PER_EMOTION"
VARIANTS = (SHARED, PER_EMOTION)


def write_embs(
    path: str | Path,
    vectors: np.ndarray,
    ids: Sequence[str],
    *,
    variant: str,
    emotions: Sequence[str],
    encoder: str,
    template_id: str,
    extra: dict | None = None,
    created: str = "",
) -> None:
    if variant not in VARIANTS:
        raise ConfigError(f"variant must be one of {VARIANTS}, got {variant!r}")
    vectors = np.ascontiguousarray(vectors, dtype="<f4")
    if vectors.ndim != 2:
        raise DataError(f"vectors must be 2-d, got shape {vectors.shape}")
    if not np.isfinite(vectors).all():
        raise DataError("vectors contain non-finite entries")
    ids = [str(i) for i in ids]
    emotions = [str(e) for e in emotions]
    n, k = len(ids), len(emotions)
    if variant == PER_EMOTION and k == 0:
        raise DataError("PER_EMOTION files need a non-empty emotion order")
    expected_rows = n if variant == SHARED else n * k
    if vectors.shape[0] != expected_rows:
        raise DataError(
            f"{variant} file with n={n}, k={k} needs {expected_rows} rows, "
            f"got {vectors.shape[0]}"
        )

    meta = {
        "created": created,
        "d": int(vectors.shape[1]),
        "dtype": "f32le",
        "emotions": emotions,
        "encoder": encoder,
        "extra": extra or {},
        "k": k,
        "n": n,
        "template_id": template_id,
        "variant": variant,
    }
    blob = json.dumps(meta, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(vectors.tobytes())
        for rid in ids:
            raw = rid.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise DataError(f"record id too long to store: {rid[:40]!r}...")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
