"""Linear sigmoid heads over frozen embeddings.

Three training strategies share one parameterization (a weight vector and
bias per emotion: p_ij = sigmoid(W_j . x_i + b_j)):

  MO              one joint pass updates every emotion from shared rows;
  BR              each emotion trained independently on shared rows;
  PER_EMOTION_EMB each emotion trained on its own prompt-specific rows.

Plain minibatch gradient descent from zero initialization, with linear
warmup over the first ``warmup_fraction`` of steps and linear decay to zero
afterwards.  Everything is deterministic given the config seed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import LabeledDataset
from .embeddings import PER_EMOTION, SHARED, EmbeddingSet
from .errors import ConfigError, DataError, NumericError
from .losses import (
    AsymmetricParams,
    ClassWeights,
    FocalParams,
    asymmetric_loss,
    focal_loss,
    weighted_bce,
)

MO = "MO"
BR = "BR"
PER_EMOTION_EMB = "PER_EMOTION_EMB"
STRATEGIES = (MO, BR, PER_EMOTION_EMB)

WEIGHTED_BCE = "WEIGHTED_BCE"
FOCAL = "FOCAL"
ASYMMETRIC = "ASYMMETRIC"
LOSSES = (WEIGHTED_BCE, FOCAL, ASYMMETRIC)


@dataclass(frozen=True)
class HeadConfig:
    strategy: str = MO
    loss: str = WEIGHTED_BCE
    learning_rate: float = 0.05
    epochs: int = 100
    batch_size: int = 32
    warmup_fraction: float = 0.1
    seed: int = 42
    threshold: float = 0.5
    focal: FocalParams = FocalParams()
    asymmetric: AsymmetricParams = AsymmetricParams()

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"strategy must be one of {STRATEGIES}")
        if self.loss not in LOSSES:
            raise ConfigError(f"loss must be one of {LOSSES}")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.epochs < 0:
            raise ConfigError("epochs must be non-negative")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be at least 1")
        if not 0.0 <= self.warmup_fraction <= 0.5:
            raise ConfigError("warmup_fraction must lie in [0, 0.5]")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError("threshold must lie strictly in (0, 1)")

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "loss": self.loss,
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "warmup_fraction": self.warmup_fraction,
            "seed": self.seed,
            "threshold": self.threshold,
            "focal": {"gamma": self.focal.gamma},
            "asymmetric": {
                "gamma_pos": self.asymmetric.gamma_pos,
                "gamma_neg": self.asymmetric.gamma_neg,
                "margin": self.asymmetric.margin,
            },
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "HeadConfig":
        raw = dict(raw)
        focal = FocalParams(**raw.pop("focal", {}))
        asymmetric = AsymmetricParams(**raw.pop("asymmetric", {}))
        return cls(focal=focal, asymmetric=asymmetric, **raw)


@dataclass(frozen=True)
class TrainedHead:
    """One (W_j, b_j) pair per emotion regardless of strategy."""

    strategy: str
    emotions: tuple[str, ...]
    weights: np.ndarray  # (k, d)
    biases: np.ndarray  # (k,)
    training_log: tuple[float, ...]
    config: HeadConfig

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        biases = np.asarray(self.biases, dtype=np.float64)
        k = len(self.emotions)
        if weights.ndim != 2 or weights.shape[0] != k or biases.shape != (k,):
            raise DataError(
                f"need one weight vector and bias per emotion, got "
                f"{weights.shape} / {biases.shape} for k={k}"
            )
        weights.setflags(write=False)
        biases.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)

    @property
    def d(self) -> int:
        return int(self.weights.shape[1])

    def to_json(self) -> str:
        return json.dumps(
            {
                "strategy": self.strategy,
                "emotions": list(self.emotions),
                "weights": self.weights.tolist(),
                "biases": self.biases.tolist(),
                "training_log": list(self.training_log),
                "config": self.config.to_dict(),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "TrainedHead":
        raw = json.loads(text)
        return cls(
            strategy=raw["strategy"],
            emotions=tuple(raw["emotions"]),
            weights=np.array(raw["weights"], dtype=np.float64),
            biases=np.array(raw["biases"], dtype=np.float64),
            training_log=tuple(raw["training_log"]),
            config=HeadConfig.from_dict(raw["config"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TrainedHead":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _loss_and_grad(cfg: HeadConfig, p, y, w_pos, w_neg):
    """Per-cell loss and d(loss)/d(logit) for the configured loss."""
    if cfg.loss == WEIGHTED_BCE:
        return weighted_bce(p, y, w_pos, w_neg)
    if cfg.loss == FOCAL:
        return focal_loss(p, y, cfg.focal, w_pos, w_neg)
    return asymmetric_loss(p, y, cfg.asymmetric)


def _schedule(total_steps: int, warmup_fraction: float) -> np.ndarray:
    """Multiplier per step: linear ramp to 1 over the warmup, then linear
    decay reaching 0 one step past the end."""
    if total_steps == 0:
        return np.zeros(0)
    warmup = int(round(warmup_fraction * total_steps))
    steps = np.arange(total_steps, dtype=np.float64)
    factors = np.empty(total_steps)
    if warmup > 0:
        factors[:warmup] = (steps[:warmup] + 1.0) / warmup
    decay = total_steps - steps[warmup:]
    factors[warmup:] = decay / max(1, total_steps - warmup)
    return factors


def _check_alignment(embs: EmbeddingSet, ds: LabeledDataset, strategy: str):
    expected = PER_EMOTION if strategy == PER_EMOTION_EMB else SHARED
    if embs.variant != expected:
        raise DataError(
            f"strategy {strategy} needs {expected} embeddings, got {embs.variant}"
        )
    if embs.ids != ds.ids:
        raise DataError("embedding ids are not aligned with the dataset ids")
    if embs.variant == PER_EMOTION and embs.meta.emotions != ds.schema.emotions:
        raise DataError("embedding emotion order disagrees with the dataset schema")


def _train_single(
    x: np.ndarray,
    y: np.ndarray,
    cfg: HeadConfig,
    w_pos: np.ndarray,
    w_neg: np.ndarray,
    rng: np.random.Generator,
):
    """Minibatch GD for one weight matrix over targets y (n, m).

    Returns (weights (m, d), biases (m,), per-epoch mean loss).  MO passes
    the full label matrix (m = k); the per-emotion strategies pass a single
    column (m = 1).
    """
    n, d = x.shape
    m = y.shape[1]
    weights = np.zeros((m, d))
    biases = np.zeros(m)
    steps_per_epoch = -(-n // cfg.batch_size)
    factors = _schedule(cfg.epochs * steps_per_epoch, cfg.warmup_fraction)
    log = []
    step = 0
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            xb, yb = x[batch], y[batch]
            z = xb @ weights.T + biases
            p = _sigmoid(z)
            loss, grad = _loss_and_grad(cfg, p, yb, w_pos, w_neg)
            lr = cfg.learning_rate * factors[step]
            weights -= lr * (grad.T @ xb) / len(batch)
            biases -= lr * grad.mean(axis=0)
            epoch_loss += float(loss.sum())
            step += 1
        log.append(epoch_loss / (n * m))
    if not (np.isfinite(weights).all() and np.isfinite(biases).all()):
        raise NumericError("training diverged to non-finite parameters")
    return weights, biases, log


def train_head(
    embs: EmbeddingSet,
    ds: LabeledDataset,
    cfg: HeadConfig,
    weights: ClassWeights,
) -> TrainedHead:
    _check_alignment(embs, ds, cfg.strategy)
    if weights.emotions != ds.schema.emotions:
        raise DataError("class-weight emotion order disagrees with the dataset")
    x = embs.vectors.astype(np.float64)
    y = ds.labels.astype(np.float64)
    k = ds.schema.k

    if cfg.strategy == MO:
        rng = np.random.default_rng(cfg.seed)
        w, b, log = _train_single(x, y, cfg, weights.w_pos, weights.w_neg, rng)
        return TrainedHead(MO, ds.schema.emotions, w, b, tuple(log), cfg)

    per_emotion_w = np.zeros((k, x.shape[1]))
    per_emotion_b = np.zeros(k)
    logs = []
    for j in range(k):
        rng = np.random.default_rng([cfg.seed, j])
        if cfg.strategy == BR:
            xj = x
        else:  # PER_EMOTION_EMB: rows i*k + j belong to emotion j
            xj = x[j::k]
        wj, bj, log_j = _train_single(
            xj,
            y[:, j : j + 1],
            cfg,
            weights.w_pos[j : j + 1],
            weights.w_neg[j : j + 1],
            rng,
        )
        per_emotion_w[j] = wj[0]
        per_emotion_b[j] = bj[0]
        logs.append(log_j)
    # Combined per-epoch log: mean over emotions, matching MO's per-cell mean.
    combined = tuple(float(np.mean(col)) for col in zip(*logs)) if logs else ()
    return TrainedHead(
        cfg.strategy, ds.schema.emotions, per_emotion_w, per_emotion_b, combined, cfg
    )


def predict_proba(head: TrainedHead, embs: EmbeddingSet) -> np.ndarray:
    """Probability matrix (n, k) with entries sigmoid(W_j . x + b_j)."""
    expected = PER_EMOTION if head.strategy == PER_EMOTION_EMB else SHARED
    if embs.variant != expected:
        raise DataError(
            f"{head.strategy} head needs {expected} embeddings, got {embs.variant}"
        )
    if embs.d != head.d:
        raise DataError(f"dimension mismatch: head d={head.d}, embeddings d={embs.d}")
    x = embs.vectors.astype(np.float64)
    k = len(head.emotions)
    if embs.variant == SHARED:
        z = x @ head.weights.T + head.biases
    else:
        if embs.meta.emotions != head.emotions:
            raise DataError("embedding emotion order disagrees with the head")
        n = embs.n
        z = np.empty((n, k))
        for j in range(k):
            z[:, j] = x[j::k] @ head.weights[j] + head.biases[j]
    return _sigmoid(z)


def predict(head: TrainedHead, embs: EmbeddingSet, threshold: float | None = None) -> np.ndarray:
    """Binary predictions: 1 iff probability >= threshold (boundary counts)."""
    if threshold is None:
        threshold = head.config.threshold
    if not 0.0 < threshold < 1.0:
        raise ConfigError(f"threshold must lie strictly in (0, 1), got {threshold}")
    return (predict_proba(head, embs) >= threshold).astype(np.int64)
