"""Class weighting and imbalance-aware losses with analytic logit gradients.

All losses operate elementwise on scalars or numpy arrays and return
``(loss, dloss_dlogit)`` where the logit z satisfies p = sigmoid(z). Losses are
non-negative; probabilities are clamped to [EPS, 1 - EPS] before any log.

Per-emotion class weights use the binary reading N / (class_count * 2), so an
evenly split emotion gets weight exactly 1.0 on both sides. A zero-count class
has its weight clamped to N instead of dividing by zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError

__all__ = [
    "EPS",
    "ClassWeights",
    "FocalParams",
    "AsymmetricParams",
    "class_weights",
    "weighted_bce",
    "focal_loss",
    "asymmetric_loss",
]

EPS = 1e-7


@dataclass(frozen=True)
class ClassWeights:
    """Per-emotion positive/negative loss weights."""

    emotions: tuple[str, ...]
    w_pos: np.ndarray
    w_neg: np.ndarray

    def __post_init__(self) -> None:
        w_pos = np.asarray(self.w_pos, dtype=np.float64)
        w_neg = np.asarray(self.w_neg, dtype=np.float64)
        k = len(self.emotions)
        if w_pos.shape != (k,) or w_neg.shape != (k,):
            raise DataError("weight vectors must match the emotion count")
        if (w_pos <= 0).any() or (w_neg <= 0).any():
            raise DataError("class weights must be positive")
        w_pos.setflags(write=False)
        w_neg.setflags(write=False)
        object.__setattr__(self, "w_pos", w_pos)
        object.__setattr__(self, "w_neg", w_neg)

    def entry(self, emotion: str) -> tuple[float, float]:
        j = self.emotions.index(emotion)
        return float(self.w_pos[j]), float(self.w_neg[j])

    @staticmethod
    def uniform(emotions: Sequence[str]) -> "ClassWeights":
        k = len(emotions)
        return ClassWeights(tuple(emotions), np.ones(k), np.ones(k))


def class_weights(counts: Mapping[str, tuple[int, int]], n_total: int) -> ClassWeights:
    """Weights N / (count * 2) per side of each emotion; zero counts clamp to N."""
    if n_total <= 0:
        raise DataError("n_total must be positive")
    emotions = tuple(counts)
    w_pos = np.empty(len(emotions))
    w_neg = np.empty(len(emotions))
    for j, name in enumerate(emotions):
        pos, neg = counts[name]
        if pos + neg != n_total:
            raise DataError(f"{name}: counts {pos}+{neg} do not sum to {n_total}")
        w_pos[j] = n_total / (pos * 2) if pos else float(n_total)
        w_neg[j] = n_total / (neg * 2) if neg else float(n_total)
    return ClassWeights(emotions, w_pos, w_neg)


@dataclass(frozen=True)
class FocalParams:
    gamma: float = 2.0

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise DataError("gamma must be non-negative")


@dataclass(frozen=True)
class AsymmetricParams:
    gamma_pos: float = 0.0
    gamma_neg: float = 4.0
    margin: float = 0.05

    def __post_init__(self) -> None:
        if self.gamma_pos < 0 or self.gamma_neg < 0:
            raise DataError("focusing exponents must be non-negative")
        if not 0.0 <= self.margin < 1.0:
            raise DataError("margin must lie in [0, 1)")


def _clamp(p):
    return np.clip(np.asarray(p, dtype=np.float64), EPS, 1.0 - EPS)


def weighted_bce(p, y, w_pos=1.0, w_neg=1.0):
    """Class-weighted binary cross entropy; gradient w.r.t. the logit is w*(p - y)."""
    p = _clamp(p)
    y = np.asarray(y, dtype=np.float64)
    w = np.where(y == 1.0, w_pos, w_neg)
    loss = -w * (y * np.log(p) + (1.0 - y) * np.log1p(-p))
    grad = w * (p - y)
    return loss, grad


def focal_loss(p, y, params: FocalParams = FocalParams(), w_pos=1.0, w_neg=1.0):
    """Focal modulation (1 - p_t)^gamma of weighted cross entropy.

    The class-weight entry of the true side plays the alpha role.
    """
    p = _clamp(p)
    y = np.asarray(y, dtype=np.float64)
    g = params.gamma
    alpha = np.where(y == 1.0, w_pos, w_neg)
    pt = np.where(y == 1.0, p, 1.0 - p)
    one_minus = 1.0 - pt
    loss = -alpha * one_minus**g * np.log(pt)
    # d loss / d pt, with the g=0 power term vanishing explicitly
    dl_dpt = -alpha * one_minus**g / pt
    if g > 0:
        dl_dpt = dl_dpt + alpha * g * one_minus ** (g - 1.0) * np.log(pt)
    dpt_dz = np.where(y == 1.0, 1.0, -1.0) * p * (1.0 - p)
    return loss, dl_dpt * dpt_dz


def asymmetric_loss(p, y, params: AsymmetricParams = AsymmetricParams()):
    """Separate focusing for positives and negatives plus a probability margin.

    Negatives use p_m = max(p - margin, 0); at or below the margin both the
    loss and the gradient are zero (the hinge contributes no gradient).
    """
    p = _clamp(p)
    y = np.asarray(y, dtype=np.float64)
    gp, gn, m = params.gamma_pos, params.gamma_neg, params.margin

    one_minus_p = 1.0 - p
    loss_pos = -(one_minus_p**gp) * np.log(p)
    dl_dp_pos = -(one_minus_p**gp) / p
    if gp > 0:
        dl_dp_pos = dl_dp_pos + gp * one_minus_p ** (gp - 1.0) * np.log(p)

    pm = np.maximum(p - m, 0.0)
    log_term = np.log1p(-pm)
    loss_neg = -(pm**gn) * log_term
    dl_dp_neg = pm**gn / (1.0 - pm)
    if gn > 0:
        # pm == 0 entries are masked out below; keep the power finite there
        pm_safe = np.where(pm > 0.0, pm, 1.0)
        dl_dp_neg = dl_dp_neg - gn * pm_safe ** (gn - 1.0) * log_term
    dl_dp_neg = np.where(p > m, dl_dp_neg, 0.0)

    loss = np.where(y == 1.0, loss_pos, loss_neg)
    grad = np.where(y == 1.0, dl_dp_pos, dl_dp_neg) * p * (1.0 - p)
    return loss, grad
