"""Weighted-voting combination of binary prediction matrices.

Each member casts +1 for a predicted 1 and -1 for a predicted 0, so absent
emotions count against the ensemble rather than abstaining.  A cell becomes 1
exactly when the weighted vote sum is strictly positive.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import ScoreTable
from .errors import DataError
from .metrics import language_average


@dataclass(frozen=True)
class EnsembleSpec:
    """Members as (prediction matrix, weight) pairs plus a note recording
    where the weights came from (e.g. which dev table)."""

    predictions: tuple[np.ndarray, ...]
    weights: tuple[float, ...]
    weight_source: str = ""

    def __post_init__(self):
        if not self.predictions:
            raise DataError("ensemble needs at least one member")
        if len(self.predictions) != len(self.weights):
            raise DataError(
                f"{len(self.predictions)} members but {len(self.weights)} weights"
            )
        shape = self.predictions[0].shape
        for i, mat in enumerate(self.predictions):
            if mat.shape != shape:
                raise DataError(
                    f"member {i} shape {mat.shape} differs from {shape}"
                )
            if not np.isin(mat, (0, 1)).all():
                raise DataError(f"member {i} predictions must be binary")
        for w in self.weights:
            if w < 0:
                raise DataError(f"weights must be non-negative, got {w}")


def weighted_vote(spec: EnsembleSpec) -> np.ndarray:
    """Per cell: s = sum_i w_i * (+1 if member i says 1 else -1); output
    1 iff s > 0.  All-zero weights fall back to uniform 1.0."""
    weights = np.asarray(spec.weights, dtype=np.float64)
    if not weights.any():
        weights = np.ones_like(weights)
    stacked = np.stack([np.asarray(p, dtype=np.float64) for p in spec.predictions])
    votes = 2.0 * stacked - 1.0
    score = np.tensordot(weights, votes, axes=1)
    return (score > 0.0).astype(np.int64)


def dev_weights(
    table: ScoreTable, models: tuple[str, ...] | list[str], language: str | None = None
) -> tuple[float, ...]:
    """One weight per model: its dev score for ``language`` when given, else
    its cross-language average.  Missing per-language scores weigh 0."""
    weights = []
    for model in models:
        if language is None:
            weights.append(language_average(table, model))
        else:
            value = table.score(model, language)
            weights.append(0.0 if np.isnan(value) else float(value))
    return tuple(weights)
