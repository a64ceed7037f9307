"""Multilabel emotion classification over frozen text embeddings.

The toolkit covers the full small-data pipeline: labelled CSV datasets,
prompt templates and binary embedding files, iterative stratified splits,
imbalance-aware losses, linear heads and boosted trees, weighted-vote
ensembles, macro-F1 evaluation, and exact rank-based significance tests.
"""

from .dataset import (
    EmotionSchema,
    LabeledDataset,
    ScoreTable,
    load_dataset,
    load_predictions,
    load_score_table,
    save_dataset,
    save_predictions,
    save_score_table,
)
from .embeddings import (
    EmbeddingMeta,
    EmbeddingSet,
    read_embeddings,
    render_prompt,
    synth_embeddings,
    write_embeddings,
)
from .ensemble import EnsembleSpec, dev_weights, weighted_vote
from .errors import ConfigError, DataError, EmokitError, NumericError
from .experiment import ExperimentConfig, ExperimentResult, render_report, run_experiment
from .gbdt import GbdtConfig, TreeEnsembleModel, predict_gbdt, train_gbdt
from .losses import ClassWeights, class_weights
from .metrics import EvalReport, f1_scores, language_average, win_count
from .stats import ComparisonSpec, TestResult, compare_models, mann_whitney_u, wilcoxon_signed_rank
from .stratify import SplitResult, iterative_stratified_split, split_by_language
from .trainer import HeadConfig, TrainedHead, predict, predict_proba, train_head

__version__ = "0.1.0"

__all__ = [
    "ClassWeights",
    "ComparisonSpec",
    "ConfigError",
    "DataError",
    "EmbeddingMeta",
    "EmbeddingSet",
    "EmokitError",
    "EmotionSchema",
    "EnsembleSpec",
    "EvalReport",
    "ExperimentConfig",
    "ExperimentResult",
    "GbdtConfig",
    "HeadConfig",
    "LabeledDataset",
    "NumericError",
    "ScoreTable",
    "SplitResult",
    "TestResult",
    "TrainedHead",
    "TreeEnsembleModel",
    "class_weights",
    "compare_models",
    "dev_weights",
    "f1_scores",
    "iterative_stratified_split",
    "language_average",
    "load_dataset",
    "load_predictions",
    "load_score_table",
    "mann_whitney_u",
    "predict",
    "predict_gbdt",
    "predict_proba",
    "read_embeddings",
    "render_prompt",
    "render_report",
    "run_experiment",
    "save_dataset",
    "save_predictions",
    "save_score_table",
    "split_by_language",
    "synth_embeddings",
    "train_gbdt",
    "train_head",
    "weighted_vote",
    "wilcoxon_signed_rank",
    "win_count",
]
