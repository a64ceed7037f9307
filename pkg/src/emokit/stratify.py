"""Iterative stratified train/validation splitting for multilabel data.

Greedy label-wise assignment in the Sechidis style: repeatedly take the
emotion with the fewest unassigned positive records and deal those records to
whichever side still wants them most.  Desired counts are kept as real-valued
demands and decremented per assignment rather than pre-rounded, which is what
makes the procedure behave sensibly on small datasets.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import LabeledDataset
from .errors import ConfigError, DataError

TRAIN, VAL = 0, 1


@dataclass(frozen=True)
class SplitResult:
    train_indices: tuple[int, ...]
    val_indices: tuple[int, ...]
    ratio: float
    seed: int

    def __post_init__(self):
        train = set(self.train_indices)
        val = set(self.val_indices)
        if train & val:
            raise DataError("train and validation indices overlap")
        n = len(self.train_indices) + len(self.val_indices)
        if train | val != set(range(n)):
            raise DataError("split indices do not partition 0..n-1")


def _pick_side(
    demand_train: float,
    demand_val: float,
    capacity: list[float],
    rng: np.random.Generator,
) -> int:
    """Side with the greater demand; ties go to the side with more remaining
    capacity, and exact capacity ties to a seeded coin flip."""
    if demand_train > demand_val:
        return TRAIN
    if demand_val > demand_train:
        return VAL
    if capacity[TRAIN] > capacity[VAL]:
        return TRAIN
    if capacity[VAL] > capacity[TRAIN]:
        return VAL
    return int(rng.integers(2))


def iterative_stratified_split(
    ds: LabeledDataset, train_fraction: float, seed: int
) -> SplitResult:
    if ds.n < 2:
        raise DataError(f"need at least 2 records to split, got {ds.n}")
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError(
            f"train_fraction must lie strictly in (0, 1), got {train_fraction}"
        )
    rng = np.random.default_rng(seed)
    k = ds.schema.k
    labels = ds.labels
    fractions = (train_fraction, 1.0 - train_fraction)
    capacity = [f * ds.n for f in fractions]
    totals = labels.sum(axis=0)
    demand = [[f * int(totals[j]) for j in range(k)] for f in fractions]
    assigned = np.full(ds.n, -1, dtype=np.int64)

    while True:
        unassigned = assigned == -1
        if not unassigned.any():
            break
        counts = labels[unassigned].sum(axis=0)
        live = [j for j in range(k) if counts[j] > 0]
        if not live:
            break
        # Rarest emotion first; ties broken by lexicographic emotion name.
        j_star = min(live, key=lambda j: (int(counts[j]), ds.schema.emotions[j]))
        for i in np.nonzero(unassigned & (labels[:, j_star] == 1))[0]:
            side = _pick_side(
                demand[TRAIN][j_star], demand[VAL][j_star], capacity, rng
            )
            assigned[i] = side
            for j in range(k):
                if labels[i, j]:
                    demand[side][j] -= 1.0
            capacity[side] -= 1.0

    # Records with no positive labels carry no stratification signal; deal
    # them to whichever side still has the most room.
    for i in np.nonzero(assigned == -1)[0]:
        if capacity[TRAIN] > capacity[VAL]:
            side = TRAIN
        elif capacity[VAL] > capacity[TRAIN]:
            side = VAL
        else:
            side = int(rng.integers(2))
        assigned[i] = side
        capacity[side] -= 1.0

    return SplitResult(
        train_indices=tuple(int(i) for i in np.nonzero(assigned == TRAIN)[0]),
        val_indices=tuple(int(i) for i in np.nonzero(assigned == VAL)[0]),
        ratio=train_fraction,
        seed=seed,
    )


def language_seed(seed: int, language: str) -> int:
    """Per-language seed: base seed plus a stable hash of the language code."""
    return seed + zlib.crc32(language.encode("utf-8"))


def split_by_language(
    datasets: Sequence[LabeledDataset], fraction: float, seed: int
) -> dict[str, SplitResult]:
    """Split each language independently with a seed derived from its code,
    so results do not depend on the order datasets are supplied in."""
    languages = [ds.language for ds in datasets]
    if len(set(languages)) != len(languages):
        raise DataError(f"duplicate language codes in {languages}")
    return {
        ds.language: iterative_stratified_split(
            ds, fraction, language_seed(seed, ds.language)
        )
        for ds in datasets
    }
