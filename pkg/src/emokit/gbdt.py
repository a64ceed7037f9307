"""From-scratch gradient-boosted regression trees, one-vs-rest per emotion.

Boosted logistic regression: each emotion starts at the log-odds of its
weighted positive rate and then adds ``learning_rate`` times the output of
regression trees fit to the residuals y - p.  Splits are exact greedy scans
(no histograms, no subsampling), so training is fully deterministic; leaf
values are weighted Newton steps clamped to +/-4.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import LabeledDataset
from .embeddings import SHARED, EmbeddingSet
from .errors import ConfigError, DataError
from .losses import ClassWeights

PROB_CLAMP = 1e-7
LEAF_CLAMP = 4.0


@dataclass(frozen=True)
class GbdtConfig:
    n_trees: int = 100
    max_depth: int = 4
    learning_rate: float = 0.1
    min_samples_leaf: int = 2
    seed: int = 42
    use_class_weights: bool = True

    def __post_init__(self):
        if self.n_trees < 0:
            raise ConfigError("n_trees must be non-negative")
        if self.max_depth < 1:
            raise ConfigError("max_depth must be at least 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.min_samples_leaf < 1:
            raise ConfigError("min_samples_leaf must be at least 1")

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "learning_rate": self.learning_rate,
            "min_samples_leaf": self.min_samples_leaf,
            "seed": self.seed,
            "use_class_weights": self.use_class_weights,
        }


@dataclass(frozen=True)
class TreeNode:
    """Either an internal axis-aligned split (feature >= 0) or a leaf."""

    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())

    def predict(self, x: np.ndarray) -> np.ndarray:
        out = np.empty(x.shape[0])
        self._fill(x, np.arange(x.shape[0]), out)
        return out

    def _fill(self, x, idx, out):
        if self.is_leaf:
            out[idx] = self.value
            return
        goes_left = x[idx, self.feature] <= self.threshold
        self.left._fill(x, idx[goes_left], out)
        self.right._fill(x, idx[~goes_left], out)

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"value": self.value}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "TreeNode":
        if "value" in raw:
            return cls(value=float(raw["value"]))
        return cls(
            feature=int(raw["feature"]),
            threshold=float(raw["threshold"]),
            left=cls.from_dict(raw["left"]),
            right=cls.from_dict(raw["right"]),
        )


@dataclass(frozen=True)
class TreeEnsembleModel:
    emotions: tuple[str, ...]
    d: int
    config: GbdtConfig
    base_scores: tuple[float, ...]
    trees: tuple[tuple[TreeNode, ...], ...]  # per emotion

    def __post_init__(self):
        k = len(self.emotions)
        if len(self.base_scores) != k or len(self.trees) != k:
            raise DataError("need one boosting chain per emotion")
        for chain in self.trees:
            for tree in chain:
                if tree.depth() > self.config.max_depth:
                    raise DataError("tree exceeds the configured max depth")

    def to_json(self) -> str:
        return json.dumps(
            {
                "emotions": list(self.emotions),
                "d": self.d,
                "config": self.config.to_dict(),
                "base_scores": list(self.base_scores),
                "trees": [[t.to_dict() for t in chain] for chain in self.trees],
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "TreeEnsembleModel":
        raw = json.loads(text)
        return cls(
            emotions=tuple(raw["emotions"]),
            d=int(raw["d"]),
            config=GbdtConfig(**raw["config"]),
            base_scores=tuple(float(v) for v in raw["base_scores"]),
            trees=tuple(
                tuple(TreeNode.from_dict(t) for t in chain)
                for chain in raw["trees"]
            ),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TreeEnsembleModel":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def _best_split(x, residuals, sample_w, min_leaf):
    """Exact greedy scan: the (feature, midpoint threshold) maximizing the
    weighted variance reduction S_L^2/W_L + S_R^2/W_R - S^2/W.  Ties resolve
    to the lowest feature index, then the lowest threshold."""
    n, d = x.shape
    total_s = float((sample_w * residuals).sum())
    total_w = float(sample_w.sum())
    base = total_s * total_s / total_w
    best = None  # (gain, feature, threshold)
    for f in range(d):
        order = np.argsort(x[:, f], kind="stable")
        xs = x[order, f]
        ws = sample_w[order]
        ss = ws * residuals[order]
        w_prefix = np.cumsum(ws)
        s_prefix = np.cumsum(ss)
        # candidate boundaries after position i (1-based count i+1 on the left)
        for i in range(min_leaf - 1, n - min_leaf):
            if xs[i] == xs[i + 1]:
                continue
            threshold = 0.5 * (xs[i] + xs[i + 1])
            if not xs[i] < threshold < xs[i + 1]:
                continue  # adjacent floats; midpoint collapsed onto a side
            w_l, s_l = w_prefix[i], s_prefix[i]
            w_r, s_r = total_w - w_l, total_s - s_l
            if w_l <= 0.0 or w_r <= 0.0:
                continue
            gain = s_l * s_l / w_l + s_r * s_r / w_r - base
            if gain > 1e-12 and (best is None or gain > best[0]):
                best = (gain, f, threshold)
    return best


def _leaf_value(residuals, p, sample_w):
    num = float((sample_w * residuals).sum())
    den = float((sample_w * p * (1.0 - p)).sum())
    if den <= 0.0:
        return 0.0
    return float(np.clip(num / den, -LEAF_CLAMP, LEAF_CLAMP))


def _build_tree(x, residuals, p, sample_w, depth_left, min_leaf) -> TreeNode:
    if depth_left == 0 or x.shape[0] < 2 * min_leaf:
        return TreeNode(value=_leaf_value(residuals, p, sample_w))
    found = _best_split(x, residuals, sample_w, min_leaf)
    if found is None:
        return TreeNode(value=_leaf_value(residuals, p, sample_w))
    _, feature, threshold = found
    goes_left = x[:, feature] <= threshold
    return TreeNode(
        feature=feature,
        threshold=threshold,
        left=_build_tree(
            x[goes_left], residuals[goes_left], p[goes_left],
            sample_w[goes_left], depth_left - 1, min_leaf,
        ),
        right=_build_tree(
            x[~goes_left], residuals[~goes_left], p[~goes_left],
            sample_w[~goes_left], depth_left - 1, min_leaf,
        ),
    )


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def train_gbdt(
    embs: EmbeddingSet,
    ds: LabeledDataset,
    cfg: GbdtConfig,
    weights: ClassWeights,
) -> TreeEnsembleModel:
    if embs.variant != SHARED:
        raise DataError(f"gbdt needs SHARED embeddings, got {embs.variant}")
    if embs.ids != ds.ids:
        raise DataError("embedding ids are not aligned with the dataset ids")
    if weights.emotions != ds.schema.emotions:
        raise DataError("class-weight emotion order disagrees with the dataset")
    if ds.n == 0:
        raise DataError("cannot train on an empty dataset")
    x = embs.vectors.astype(np.float64)
    if x.shape[1] == 0:
        raise DataError("cannot train on zero-dimensional embeddings")

    base_scores = []
    chains = []
    for j, emotion in enumerate(ds.schema.emotions):
        y = ds.labels[:, j].astype(np.float64)
        if cfg.use_class_weights:
            sample_w = np.where(y == 1.0, weights.w_pos[j], weights.w_neg[j])
        else:
            sample_w = np.ones_like(y)
        prior = float((sample_w * y).sum() / sample_w.sum())
        prior = min(max(prior, PROB_CLAMP), 1.0 - PROB_CLAMP)
        base = math.log(prior / (1.0 - prior))
        scores = np.full(ds.n, base)
        chain = []
        for _ in range(cfg.n_trees):
            p = _sigmoid(scores)
            residuals = y - p
            tree = _build_tree(
                x, residuals, p, sample_w, cfg.max_depth, cfg.min_samples_leaf
            )
            chain.append(tree)
            scores = scores + cfg.learning_rate * tree.predict(x)
        base_scores.append(base)
        chains.append(tuple(chain))
    return TreeEnsembleModel(
        emotions=ds.schema.emotions,
        d=int(x.shape[1]),
        config=cfg,
        base_scores=tuple(base_scores),
        trees=tuple(chains),
    )


def predict_gbdt(
    model: TreeEnsembleModel, embs: EmbeddingSet, threshold: float = 0.5
) -> tuple[np.ndarray, np.ndarray]:
    """(probability matrix, binary matrix); label 1 iff p >= threshold."""
    if embs.variant != SHARED:
        raise DataError(f"gbdt predicts from SHARED embeddings, got {embs.variant}")
    if embs.d != model.d:
        raise DataError(f"dimension mismatch: model d={model.d}, embeddings d={embs.d}")
    if not 0.0 < threshold < 1.0:
        raise ConfigError(f"threshold must lie strictly in (0, 1), got {threshold}")
    x = embs.vectors.astype(np.float64)
    k = len(model.emotions)
    z = np.empty((embs.n, k))
    for j in range(k):
        acc = np.full(embs.n, model.base_scores[j])
        for tree in model.trees[j]:
            acc += model.config.learning_rate * tree.predict(x)
        z[:, j] = acc
    probs = _sigmoid(z)
    return probs, (probs >= threshold).astype(np.int64)
