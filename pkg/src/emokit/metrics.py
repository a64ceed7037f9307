"""Per-emotion F1, macro-F1, and score-table aggregation."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dataset import ScoreTable
from .errors import DataError


@dataclass(frozen=True)
class EvalReport:
    """Evaluation of one prediction matrix against gold labels.

    ``macro_f1`` is the unweighted mean of the per-emotion F1 scores.
    """

    language: str
    emotions: tuple[str, ...]
    precision: tuple[float, ...]
    recall: tuple[float, ...]
    f1: tuple[float, ...]
    macro_f1: float
    n: int

    def __post_init__(self):
        k = len(self.emotions)
        if not (len(self.precision) == len(self.recall) == len(self.f1) == k):
            raise DataError("per-emotion score lengths disagree with emotion list")
        if abs(self.macro_f1 - float(np.mean(self.f1))) > 1e-12:
            raise DataError("macro_f1 is not the mean of the per-emotion F1 scores")
        for series in (self.precision, self.recall, self.f1):
            for v in series:
                if not 0.0 <= v <= 1.0:
                    raise DataError(f"score {v} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "language": self.language,
            "n": self.n,
            "emotions": list(self.emotions),
            "precision": list(self.precision),
            "recall": list(self.recall),
            "f1": list(self.f1),
            "macro_f1": self.macro_f1,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _safe_ratio(num: int, den: int) -> float:
    """num/den with the 0/0 case defined as 0."""
    return float(num) / float(den) if den else 0.0


def f1_scores(
    pred: np.ndarray,
    gold: np.ndarray,
    emotions: tuple[str, ...],
    language: str = "",
) -> EvalReport:
    """Per-emotion F1 = 2TP / (2TP + FP + FN); an emotion with no gold and no
    predicted positives scores 0 rather than 1 (conservative convention —
    relevant for very rare emotions)."""
    pred = np.asarray(pred)
    gold = np.asarray(gold)
    if pred.shape != gold.shape:
        raise DataError(f"shape mismatch: pred {pred.shape} vs gold {gold.shape}")
    if pred.ndim != 2 or pred.shape[1] != len(emotions):
        raise DataError(
            f"expected n×{len(emotions)} matrices, got shape {pred.shape}"
        )
    for name, mat in (("pred", pred), ("gold", gold)):
        if not np.isin(mat, (0, 1)).all():
            raise DataError(f"{name} matrix must be binary")

    precision, recall, f1 = [], [], []
    for j in range(len(emotions)):
        p, g = pred[:, j], gold[:, j]
        tp = int(np.sum((p == 1) & (g == 1)))
        fp = int(np.sum((p == 1) & (g == 0)))
        fn = int(np.sum((p == 0) & (g == 1)))
        precision.append(_safe_ratio(tp, tp + fp))
        recall.append(_safe_ratio(tp, tp + fn))
        f1.append(_safe_ratio(2 * tp, 2 * tp + fp + fn))
    return EvalReport(
        language=language,
        emotions=tuple(emotions),
        precision=tuple(precision),
        recall=tuple(recall),
        f1=tuple(f1),
        macro_f1=float(np.mean(f1)),
        n=int(pred.shape[0]),
    )


def language_average(table: ScoreTable, model: str) -> float:
    """Unweighted mean of a model's non-missing language scores."""
    row = table.row(model)
    present = row[~np.isnan(row)]
    if present.size == 0:
        raise DataError(f"model {model!r} has no scores to average")
    return float(present.mean())


def win_count(table: ScoreTable, a: str, b: str) -> tuple[int, int, int]:
    """(wins, losses, ties) for model ``a`` against ``b``, counted over the
    languages where both have a score."""
    row_a = table.row(a)
    row_b = table.row(b)
    shared = ~np.isnan(row_a) & ~np.isnan(row_b)
    wins = int(np.sum(row_a[shared] > row_b[shared]))
    losses = int(np.sum(row_a[shared] < row_b[shared]))
    ties = int(np.sum(row_a[shared] == row_b[shared]))
    return wins, losses, ties
