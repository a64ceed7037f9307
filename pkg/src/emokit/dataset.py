"""Loading, validation, and indexing of multilabel emotion datasets and score tables.

Dataset CSVs have the header ``id,text,<emotion_1>,...,<emotion_k>`` with one
row per record and binary label cells. Score tables have the header
``model,<lang_1>,...`` with one row per model; ``-`` or an empty cell marks a
missing score. Both are UTF-8, comma separated, RFC-4180 quoted.

The emotion inventory is always read from the data header, never hard-coded:
different languages may carry different emotion sets.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import DataError

__all__ = [
    "EmotionSchema",
    "LabeledDataset",
    "ScoreTable",
    "load_dataset",
    "save_dataset",
    "load_predictions",
    "save_predictions",
    "load_score_table",
    "save_score_table",
    "label_counts",
    "random_dataset",
]


@dataclass(frozen=True)
class EmotionSchema:
    """Ordered emotion inventory of a dataset."""

    emotions: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.emotions:
            raise DataError("emotion list must be non-empty")
        if len(set(self.emotions)) != len(self.emotions):
            raise DataError(f"duplicate emotion names: {self.emotions}")
        for name in self.emotions:
            if not name or name != name.lower():
                raise DataError(f"emotion names must be non-empty lowercase, got {name!r}")

    @property
    def k(self) -> int:
        return len(self.emotions)

    def index(self, emotion: str) -> int:
        try:
            return self.emotions.index(emotion)
        except ValueError:
            raise DataError(f"unknown emotion {emotion!r}; schema has {self.emotions}") from None


@dataclass(frozen=True)
class LabeledDataset:
    """Texts with binary emotion-label vectors for one language.

    ``labels`` is an (n, k) {0,1} int matrix aligned with ``ids``/``texts``.
    Instances are immutable after construction and safe to share.
    """

    language: str
    schema: EmotionSchema
    ids: tuple[str, ...]
    texts: tuple[str, ...]
    labels: np.ndarray

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 2 or labels.shape != (len(self.ids), self.schema.k):
            raise DataError(
                f"label matrix shape {labels.shape} does not match "
                f"{len(self.ids)} records x {self.schema.k} emotions"
            )
        if labels.size and not np.isin(labels, (0, 1)).all():
            raise DataError("labels must be 0 or 1")
        if len(self.texts) != len(self.ids):
            raise DataError("ids and texts lengths differ")
        if len(set(self.ids)) != len(self.ids):
            raise DataError("duplicate record ids")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.ids)

    def records(self) -> Iterator[tuple[str, str, tuple[int, ...]]]:
        for i in range(self.n):
            yield self.ids[i], self.texts[i], tuple(int(v) for v in self.labels[i])

    def subset(self, indices: Sequence[int]) -> "LabeledDataset":
        idx = list(indices)
        return LabeledDataset(
            language=self.language,
            schema=self.schema,
            ids=tuple(self.ids[i] for i in idx),
            texts=tuple(self.texts[i] for i in idx),
            labels=self.labels[idx] if idx else np.zeros((0, self.schema.k), dtype=np.int64),
        )


@dataclass(frozen=True)
class ScoreTable:
    """Model x language grid of macro-F1 percentages; NaN marks missing."""

    models: tuple[str, ...]
    languages: tuple[str, ...]
    scores: np.ndarray

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.shape != (len(self.models), len(self.languages)):
            raise DataError(
                f"score grid {scores.shape} does not match "
                f"{len(self.models)} models x {len(self.languages)} languages"
            )
        if len(set(self.models)) != len(self.models):
            raise DataError("duplicate model names")
        if len(set(self.languages)) != len(self.languages):
            raise DataError("duplicate language codes")
        present = scores[~np.isnan(scores)]
        if present.size and (present.min() < 0.0 or present.max() > 100.0):
            raise DataError("scores must lie in [0, 100]")
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

    def model_index(self, model: str) -> int:
        try:
            return self.models.index(model)
        except ValueError:
            raise DataError(f"unknown model {model!r}") from None

    def score(self, model: str, language: str) -> float:
        """Score for (model, language); NaN if missing."""
        try:
            j = self.languages.index(language)
        except ValueError:
            raise DataError(f"unknown language {language!r}") from None
        return float(self.scores[self.model_index(model), j])

    def row(self, model: str) -> np.ndarray:
        return self.scores[self.model_index(model)]

    def concat(self, other: "ScoreTable") -> "ScoreTable":
        """Stack two tables with identical language columns."""
        if other.languages != self.languages:
            raise DataError("cannot concat tables with different language columns")
        return ScoreTable(
            models=self.models + other.models,
            languages=self.languages,
            scores=np.vstack([self.scores, other.scores]),
        )


def _read_rows(path: Path) -> list[list[str]]:
    try:
        with path.open("r", encoding="utf-8", newline="") as fh:
            return list(csv.reader(fh))
    except FileNotFoundError:
        raise DataError(f"file not found: {path}") from None
    except UnicodeDecodeError as exc:
        raise DataError(f"{path} is not valid UTF-8: {exc}") from None


def load_dataset(path: str | Path, language: str) -> LabeledDataset:
    """Load a dataset CSV (header ``id,text,<emotions...>``), preserving row order."""
    path = Path(path)
    rows = _read_rows(path)
    if not rows:
        raise DataError(f"{path}: empty file, expected a header row")
    header = rows[0]
    if len(header) < 2 or header[0] != "id" or header[1] != "text":
        raise DataError(f"{path}: header must start with 'id,text', got {header[:2]}")
    emotions = header[2:]
    if not emotions:
        raise DataError(f"{path}: no emotion columns in header")
    schema = EmotionSchema(tuple(emotions))

    ids: list[str] = []
    texts: list[str] = []
    labels = np.zeros((len(rows) - 1, schema.k), dtype=np.int64)
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"{path}:{r}: expected {len(header)} cells, got {len(row)}")
        ids.append(row[0])
        texts.append(row[1])
        for j, cell in enumerate(row[2:]):
            if cell not in ("0", "1"):
                raise DataError(
                    f"{path}:{r}: label cell for {emotions[j]!r} must be 0 or 1, got {cell!r}"
                )
            labels[r - 2, j] = int(cell)
    if len(set(ids)) != len(ids):
        seen: set[str] = set()
        dup = next(i for i in ids if i in seen or seen.add(i))
        raise DataError(f"{path}: duplicate record id {dup!r}")
    return LabeledDataset(language, schema, tuple(ids), tuple(texts), labels)


def save_dataset(ds: LabeledDataset, path: str | Path) -> None:
    """Write a dataset back to CSV; ``load_dataset`` round-trips it exactly."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "text", *ds.schema.emotions])
        for rid, text, labels in ds.records():
            writer.writerow([rid, text, *labels])


def load_predictions(path: str | Path, schema: EmotionSchema) -> tuple[tuple[str, ...], np.ndarray]:
    """Load a prediction CSV (header ``id,<emotions...>``) against a known schema.

    Returns (ids, binary matrix). Column order must match the schema.
    """
    path = Path(path)
    rows = _read_rows(path)
    if not rows:
        raise DataError(f"{path}: empty prediction file")
    header = rows[0]
    if header[:1] != ["id"] or tuple(header[1:]) != schema.emotions:
        raise DataError(
            f"{path}: prediction header must be id,{','.join(schema.emotions)}, got {header}"
        )
    ids: list[str] = []
    mat = np.zeros((len(rows) - 1, schema.k), dtype=np.int64)
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"{path}:{r}: expected {len(header)} cells, got {len(row)}")
        ids.append(row[0])
        for j, cell in enumerate(row[1:]):
            if cell not in ("0", "1"):
                raise DataError(f"{path}:{r}: prediction cell must be 0 or 1, got {cell!r}")
            mat[r - 2, j] = int(cell)
    return tuple(ids), mat


def save_predictions(
    ids: Sequence[str], pred: np.ndarray, schema: EmotionSchema, path: str | Path
) -> None:
    """Write binary predictions in the dataset-mirroring layout ``id,<emotions...>``."""
    pred = np.asarray(pred)
    if pred.shape != (len(ids), schema.k):
        raise DataError(f"prediction shape {pred.shape} does not match ids/schema")
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", *schema.emotions])
        for i, rid in enumerate(ids):
            writer.writerow([rid, *(int(v) for v in pred[i])])


def load_score_table(path: str | Path) -> ScoreTable:
    """Load a score-table CSV in either orientation.

    A ``model,<lang_1>,...`` header gives one row per model; a
    ``language,<model_1>,...`` header (the report layout) gives one row per
    language and is transposed on read. ``-`` and empty cells both denote a
    missing score.
    """
    path = Path(path)
    rows = _read_rows(path)
    if not rows:
        raise DataError(f"{path}: empty file, expected a header row")
    header = rows[0]
    if not header or header[0] not in ("model", "language") or len(header) < 2:
        raise DataError(
            f"{path}: header must be 'model,<langs>' or 'language,<models>', got {header}"
        )
    transposed = header[0] == "language"
    columns = tuple(header[1:])
    row_names: list[str] = []
    grid = np.full((len(rows) - 1, len(columns)), np.nan)
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"{path}:{r}: expected {len(header)} cells, got {len(row)}")
        row_names.append(row[0])
        for j, cell in enumerate(row[1:]):
            cell = cell.strip()
            if cell in ("", "-"):
                continue
            try:
                grid[r - 2, j] = float(cell)
            except ValueError:
                raise DataError(f"{path}:{r}: non-numeric score {cell!r}") from None
    if len(set(row_names)) != len(row_names):
        raise DataError(f"{path}: duplicate {header[0]} name")
    if transposed:
        return ScoreTable(columns, tuple(row_names), grid.T)
    return ScoreTable(tuple(row_names), columns, grid)


def save_score_table(table: ScoreTable, path: str | Path, decimals: int = 2) -> None:
    """Write a score table in the loadable ``model,<langs>`` layout, missing as ``-``."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", *table.languages])
        for i, model in enumerate(table.models):
            cells = [
                "-" if math.isnan(v) else f"{v:.{decimals}f}" for v in table.scores[i]
            ]
            writer.writerow([model, *cells])


def label_counts(ds: LabeledDataset) -> dict[str, tuple[int, int]]:
    """Per-emotion (positives, negatives); the two always sum to the record count."""
    pos = ds.labels.sum(axis=0) if ds.n else np.zeros(ds.schema.k, dtype=np.int64)
    return {
        name: (int(pos[j]), int(ds.n - pos[j])) for j, name in enumerate(ds.schema.emotions)
    }


def random_dataset(
    n: int,
    emotions: Sequence[str],
    seed: int,
    language: str = "syn",
    positive_rates: Sequence[float] | None = None,
    ensure_positive: bool = False,
) -> LabeledDataset:
    """Deterministic random multilabel dataset for desk-scale testing.

    Each emotion is an independent Bernoulli with its own positive rate
    (drawn from U[0.15, 0.5] when not given). ``ensure_positive`` flips one
    random label on for any all-zero record.
    """
    schema = EmotionSchema(tuple(emotions))
    rng = np.random.default_rng(seed)
    if positive_rates is None:
        rates = rng.uniform(0.15, 0.5, size=schema.k)
    else:
        rates = np.asarray(positive_rates, dtype=np.float64)
        if rates.shape != (schema.k,):
            raise DataError("positive_rates length must match emotion count")
    labels = (rng.random((n, schema.k)) < rates).astype(np.int64)
    if ensure_positive:
        for i in np.flatnonzero(labels.sum(axis=1) == 0):
            labels[i, rng.integers(schema.k)] = 1
    ids = tuple(f"{language}-{i:04d}" for i in range(n))
    texts = tuple(f"sample text {i}" for i in range(n))
    return LabeledDataset(language, schema, ids, texts, labels)
