"""Embedding interchange format, encoder prompt rendering, synthetic embeddings.

The on-disk format ("EMBS") is a single self-describing binary file:

    magic b"EMBS" | u32 version=1 | u32 metadata length | metadata JSON (UTF-8)
    | row-major little-endian float32 payload | id table

The id table stores, per record id, a little-endian u16 byte length followed
by the UTF-8 bytes.  Metadata is compact JSON with sorted keys so that equal
sets serialize to equal bytes.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .dataset import LabeledDataset
from .errors import ConfigError, DataError

MAGIC = b"EMBS"
VERSION = 1

SHARED = "SHARED"
PER_EMOTION = "PER_EMOTION"
VARIANTS = (SHARED, PER_EMOTION)


# ---------------------------------------------------------------------------
# Prompt rendering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PromptTemplate:
    """One of the three instruction formats used when embedding text."""

    template_id: str
    requires_emotion: bool


TEMPLATES = {
    "ME5": PromptTemplate("ME5", requires_emotion=False),
    "BGEV1": PromptTemplate("BGEV1", requires_emotion=False),
    "BGEV2": PromptTemplate("BGEV2", requires_emotion=True),
}

_ME5_BODY = (
    "Instruct: Classify the emotions expressed in the given text snippet "
    "by identifying whether each of the following emotions is present: "
    "{}.\n\nQuery: "
)
_BGEV1_BODY = (
    "<instruct> Represent this text for identifying the presence of "
    "emotions: {}\n<query> "
)
_BGEV2_BODY = (
    "<instruct> Represent this text for identifying the presence of the "
    "emotion {}\n<query> "
)


def get_template(template_id: str) -> PromptTemplate:
    try:
        return TEMPLATES[template_id]
    except KeyError:
        raise ConfigError(
            f"unknown template {template_id!r}; expected one of {sorted(TEMPLATES)}"
        ) from None


def enumerate_emotions(names: Sequence[str]) -> str:
    """Render an ordered name list as prose: "a", "a and b", "a, b, and c"."""
    names = list(names)
    if not names:
        raise ConfigError("emotion list must be non-empty")
    if len(names) == 1:
        return names[0]
    if len(names) == 2:
        return f"{names[0]} and {names[1]}"
    return ", ".join(names[:-1]) + f", and {names[-1]}"


def render_prompt(
    template: PromptTemplate,
    text: str,
    emotion: str | None = None,
    emotion_list: Sequence[str] = (),
) -> str:
    """Render the full prompt string for one record.

    ``emotion`` must be given exactly when the template asks per-emotion
    questions (BGEV2); the other templates enumerate ``emotion_list`` inline.
    The input text is always the final segment, so
    ``render_prompt(t, text) == render_prompt(t, "") + text``.
    """
    emotions = list(emotion_list)
    if not emotions:
        raise ConfigError("emotion_list must be non-empty")
    if template.requires_emotion:
        if emotion is None:
            raise ConfigError(f"template {template.template_id} requires an emotion")
        if emotion not in emotions:
            raise ConfigError(f"emotion {emotion!r} not in emotion list {emotions}")
    elif emotion is not None:
        raise ConfigError(
            f"template {template.template_id} does not take a per-prompt emotion"
        )

    if template.template_id == "ME5":
        return _ME5_BODY.format(enumerate_emotions(emotions)) + text
    if template.template_id == "BGEV1":
        return _BGEV1_BODY.format(enumerate_emotions(emotions)) + text
    if template.template_id == "BGEV2":
        return _BGEV2_BODY.format(emotion) + text
    raise ConfigError(f"unknown template {template.template_id!r}")


# ---------------------------------------------------------------------------
# Embedding sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EmbeddingMeta:
    """Provenance carried alongside the vectors."""

    encoder: str = "unknown"
    template_id: str = "NONE"
    emotions: tuple[str, ...] = ()
    created: str = ""
    extra: dict = field(default_factory=dict)


class EmbeddingSet:
    """Dense float32 vectors for a dataset, one row per record or per
    (record, emotion) pair depending on ``variant``.

    PER_EMOTION rows are record-major, emotion-minor: row ``i * k + j`` holds
    record ``i`` embedded for emotion ``j`` in schema order.
    """

    def __init__(
        self,
        variant: str,
        ids: Sequence[str],
        vectors: np.ndarray,
        meta: EmbeddingMeta,
    ):
        if variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {variant!r}")
        vectors = np.ascontiguousarray(vectors, dtype=np.float32)
        if vectors.ndim != 2:
            raise DataError(f"vectors must be a 2-d matrix, got shape {vectors.shape}")
        if not np.isfinite(vectors).all():
            raise DataError("vectors contain non-finite entries")
        ids = tuple(str(i) for i in ids)
        n = len(ids)
        k = len(meta.emotions)
        expected_rows = n if variant == SHARED else n * k
        if variant == PER_EMOTION and k == 0:
            raise DataError("PER_EMOTION sets need a non-empty emotion order")
        if vectors.shape[0] != expected_rows:
            raise DataError(
                f"{variant} set with n={n}, k={k} needs {expected_rows} rows, "
                f"got {vectors.shape[0]}"
            )
        self.variant = variant
        self.ids = ids
        self.vectors = vectors
        self.vectors.setflags(write=False)
        self.meta = meta

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def d(self) -> int:
        return int(self.vectors.shape[1])

    @property
    def k(self) -> int:
        return len(self.meta.emotions)

    def rows_for(self, record_index: int) -> np.ndarray:
        """Vectors belonging to one record: (d,) for SHARED, (k, d) otherwise."""
        if self.variant == SHARED:
            return self.vectors[record_index]
        start = record_index * self.k
        return self.vectors[start : start + self.k]

    def subset(self, indices: Sequence[int]) -> "EmbeddingSet":
        """New set restricted to the given record indices, in that order."""
        indices = list(indices)
        if self.variant == SHARED:
            rows = self.vectors[indices]
        else:
            k = self.k
            row_idx = [i * k + j for i in indices for j in range(k)]
            rows = self.vectors[row_idx]
        return EmbeddingSet(
            self.variant, [self.ids[i] for i in indices], rows, self.meta
        )


# ---------------------------------------------------------------------------
# Binary I/O
# ---------------------------------------------------------------------------

def write_embeddings(emb: EmbeddingSet, path: str | Path) -> None:
    meta = {
        "created": emb.meta.created,
        "d": emb.d,
        "dtype": "f32le",
        "emotions": list(emb.meta.emotions),
        "encoder": emb.meta.encoder,
        "extra": emb.meta.extra,
        "k": emb.k,
        "n": emb.n,
        "template_id": emb.meta.template_id,
        "variant": emb.variant,
    }
    blob = json.dumps(meta, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(emb.vectors, dtype="<f4").tobytes())
        for rid in emb.ids:
            raw = rid.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise DataError(f"record id too long to store: {rid[:40]!r}...")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)


def read_embeddings(path: str | Path) -> EmbeddingSet:
    try:
        data = Path(path).read_bytes()
    except FileNotFoundError:
        raise DataError(f"missing embedding file {path}") from None
    if len(data) < 12:
        raise DataError(f"{path}: truncated embedding file ({len(data)} bytes)")
    if data[:4] != MAGIC:
        raise DataError(f"{path}: bad magic {data[:4]!r}, expected {MAGIC!r}")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != VERSION:
        raise DataError(f"{path}: unsupported format version {version}")
    (meta_len,) = struct.unpack_from("<I", data, 8)
    offset = 12
    if offset + meta_len > len(data):
        raise DataError(f"{path}: truncated metadata block")
    try:
        meta = json.loads(data[offset : offset + meta_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataError(f"{path}: unreadable metadata: {exc}") from exc
    offset += meta_len

    for key in ("n", "d", "k", "variant", "dtype", "emotions"):
        if key not in meta:
            raise DataError(f"{path}: metadata missing key {key!r}")
    if meta["dtype"] != "f32le":
        raise DataError(f"{path}: unsupported payload dtype {meta['dtype']!r}")
    n, d, k = int(meta["n"]), int(meta["d"]), int(meta["k"])
    variant = meta["variant"]
    if variant not in VARIANTS:
        raise DataError(f"{path}: unknown variant {variant!r}")
    rows = n if variant == SHARED else n * k
    payload_len = rows * d * 4
    if offset + payload_len > len(data):
        raise DataError(
            f"{path}: payload needs {payload_len} bytes, file has "
            f"{len(data) - offset} after the header"
        )
    vectors = np.frombuffer(
        data, dtype="<f4", count=rows * d, offset=offset
    ).reshape(rows, d)
    offset += payload_len

    ids = []
    for _ in range(n):
        if offset + 2 > len(data):
            raise DataError(f"{path}: truncated id table")
        (length,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if offset + length > len(data):
            raise DataError(f"{path}: truncated id table")
        ids.append(data[offset : offset + length].decode("utf-8"))
        offset += length
    if offset != len(data):
        raise DataError(
            f"{path}: {len(data) - offset} trailing bytes disagree with metadata"
        )

    emb_meta = EmbeddingMeta(
        encoder=str(meta.get("encoder", "unknown")),
        template_id=str(meta.get("template_id", "NONE")),
        emotions=tuple(meta["emotions"]),
        created=str(meta.get("created", "")),
        extra=dict(meta.get("extra", {})),
    )
    return EmbeddingSet(variant, ids, vectors, emb_meta)


# ---------------------------------------------------------------------------
# Synthetic embeddings
# ---------------------------------------------------------------------------

def synth_embeddings(
    ds: LabeledDataset,
    d: int,
    seed: int,
    variant: str = SHARED,
    noise: float = 0.0,
) -> EmbeddingSet:
    """Deterministic stand-in for a frozen encoder, for desk-scale tests.

    Each record sits at the sum of the orthogonal basis directions of its
    positive labels plus isotropic Gaussian noise of scale ``noise``; the
    PER_EMOTION variant additionally offsets each row by the queried
    emotion's direction.  Pure function of (ds, d, seed, variant, noise).
    """
    if variant not in VARIANTS:
        raise ConfigError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if noise < 0:
        raise ConfigError(f"noise must be non-negative, got {noise}")
    k = ds.schema.k
    if d < k:
        raise ConfigError(f"dimension d={d} must be at least the emotion count k={k}")
    rng = np.random.default_rng(seed)
    basis = np.eye(d, dtype=np.float64)[:k]
    base = ds.labels.astype(np.float64) @ basis
    if variant == SHARED:
        rows = base
    else:
        rows = np.repeat(base, k, axis=0) + np.tile(basis, (ds.n, 1))
    if noise > 0:
        rows = rows + noise * rng.standard_normal(rows.shape)
    meta = EmbeddingMeta(
        encoder="synth",
        template_id="NONE",
        emotions=ds.schema.emotions,
        created=f"synth seed={seed} noise={noise}",
    )
    return EmbeddingSet(variant, ds.ids, rows.astype(np.float32), meta)
