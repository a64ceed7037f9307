"""End-to-end experiment runner: split, weight, train, predict, evaluate.

An experiment is described by a single JSON document::

    {
      "name": "head-mo",                      # report column, optional
      "mode": "LANG",                         # LANG (per-language) or ALL (pooled)
      "model": "head",                        # "head" or "gbdt"
      "datasets": {"eng": "data/eng.csv"},    # language code -> labelled CSV
      "embeddings": {"eng": "eng.embs"},      # language code -> embedding file
      "synth": {"d": 16, "seed": 7,           # ...or synthetic embeddings
                "noise": 0.05, "variant": "SHARED"},
      "split": {"fraction": 0.8, "seed": 42},
      "loss": "FOCAL",                        # shorthand for head.loss
      "head": {"strategy": "MO", "epochs": 100},
      "gbdt": {"n_trees": 100, "max_depth": 4},
      "output_dir": "runs/exp1"
    }

Exactly one of ``embeddings``/``synth`` supplies vectors.  ``LANG`` mode
requires a single dataset; ``ALL`` pools every language's train split into
one model and still evaluates each language on its own validation split.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .dataset import (
    EmotionSchema,
    LabeledDataset,
    ScoreTable,
    label_counts,
    load_dataset,
    save_predictions,
)
from .embeddings import (
    SHARED,
    VARIANTS,
    EmbeddingSet,
    read_embeddings,
    synth_embeddings,
)
from .errors import ConfigError, DataError, NumericError
from .gbdt import GbdtConfig, TreeEnsembleModel, predict_gbdt, train_gbdt
from .losses import class_weights
from .metrics import EvalReport, f1_scores
from .stratify import language_seed, split_by_language
from .trainer import HeadConfig, TrainedHead, predict, train_head

ALL = "ALL"
LANG = "LANG"
MODES = (ALL, LANG)

HEAD = "head"
GBDT = "gbdt"
MODEL_KINDS = (HEAD, GBDT)

_TOP_KEYS = {
    "name",
    "mode",
    "model",
    "datasets",
    "embeddings",
    "synth",
    "split",
    "loss",
    "head",
    "gbdt",
    "output_dir",
}


@dataclass(frozen=True)
class SynthSource:
    """Parameters for generating embeddings instead of reading them."""

    d: int
    seed: int = 42
    noise: float = 0.0
    variant: str = SHARED

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ConfigError(f"synth.variant must be one of {VARIANTS}")
        if self.d < 1:
            raise ConfigError("synth.d must be at least 1")
        if self.noise < 0:
            raise ConfigError("synth.noise must be non-negative")

    def to_dict(self) -> dict:
        return {"d": self.d, "seed": self.seed, "noise": self.noise, "variant": self.variant}


def _pairs(raw: object, key: str) -> tuple[tuple[str, str], ...]:
    if not isinstance(raw, Mapping) or not raw:
        raise ConfigError(f"{key}: expected a non-empty mapping of language -> path")
    out = []
    for lang, path in raw.items():
        if not isinstance(lang, str) or not lang:
            raise ConfigError(f"{key}: language codes must be non-empty strings")
        if not isinstance(path, str) or not path:
            raise ConfigError(f"{key}.{lang}: expected a file path string")
        out.append((lang, path))
    return tuple(out)


@dataclass(frozen=True)
class ExperimentConfig:
    """Frozen, validated description of one training/evaluation run."""

    datasets: tuple[tuple[str, str], ...]
    mode: str = LANG
    model: str = HEAD
    embeddings: tuple[tuple[str, str], ...] = ()
    synth: SynthSource | None = None
    split_fraction: float = 0.8
    split_seed: int = 42
    head: HeadConfig = field(default_factory=HeadConfig)
    gbdt: GbdtConfig = field(default_factory=GbdtConfig)
    output_dir: str = "runs/exp"
    name: str = ""

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.model not in MODEL_KINDS:
            raise ConfigError(f"model must be one of {MODEL_KINDS}, got {self.model!r}")
        langs = [lang for lang, _ in self.datasets]
        if not langs:
            raise ConfigError("datasets: at least one language is required")
        if len(set(langs)) != len(langs):
            raise ConfigError(f"datasets: duplicate language codes in {langs}")
        if self.mode == LANG and len(langs) != 1:
            raise ConfigError(
                f"mode LANG takes exactly one dataset, got {len(langs)}"
            )
        if (self.synth is None) == (not self.embeddings):
            raise ConfigError(
                "exactly one embedding source is required: "
                "set either 'embeddings' or 'synth'"
            )
        if self.embeddings:
            missing = sorted(set(langs) - {lang for lang, _ in self.embeddings})
            if missing:
                raise ConfigError(
                    f"embeddings.{missing[0]}: no embedding file configured"
                )
        if not isinstance(self.output_dir, str) or not self.output_dir:
            raise ConfigError("output_dir must be a non-empty path")
        if not isinstance(self.name, str):
            raise ConfigError("name must be a string")

    @property
    def label(self) -> str:
        """Column name for this run in score tables and reports."""
        return self.name or f"{self.model}-{self.mode}"

    @classmethod
    def from_dict(cls, raw: Mapping) -> "ExperimentConfig":
        if not isinstance(raw, Mapping):
            raise ConfigError("experiment config must be a JSON object")
        unknown = sorted(set(raw) - _TOP_KEYS)
        if unknown:
            raise ConfigError(f"unknown config key {unknown[0]!r}")
        datasets = _pairs(raw.get("datasets"), "datasets")
        embeddings = (
            _pairs(raw["embeddings"], "embeddings") if "embeddings" in raw else ()
        )
        synth = None
        if "synth" in raw:
            synth = _section(SynthSource, raw["synth"], "synth")
        split = raw.get("split", {})
        if not isinstance(split, Mapping):
            raise ConfigError("split: expected an object with fraction/seed")
        extra = sorted(set(split) - {"fraction", "seed"})
        if extra:
            raise ConfigError(f"split.{extra[0]}: unknown key")
        head_raw = dict(raw.get("head", {}))
        if "loss" in raw:
            if raw.get("model", HEAD) != HEAD:
                raise ConfigError("loss: only applies to the linear head model")
            head_raw.setdefault("loss", raw["loss"])
        try:
            fraction = float(split.get("fraction", 0.8))
            seed = int(split.get("seed", 42))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"split: {exc}") from None
        return cls(
            datasets=datasets,
            mode=raw.get("mode", LANG),
            model=raw.get("model", HEAD),
            embeddings=embeddings,
            synth=synth,
            split_fraction=fraction,
            split_seed=seed,
            head=_section(HeadConfig.from_dict, head_raw, "head"),
            gbdt=_section(GbdtConfig, raw.get("gbdt", {}), "gbdt"),
            output_dir=raw.get("output_dir", "runs/exp"),
            name=raw.get("name", ""),
        )

    def to_dict(self) -> dict:
        out: dict = {
            "name": self.label,
            "mode": self.mode,
            "model": self.model,
            "datasets": dict(self.datasets),
            "split": {"fraction": self.split_fraction, "seed": self.split_seed},
            "head": self.head.to_dict(),
            "gbdt": self.gbdt.to_dict(),
            "output_dir": self.output_dir,
        }
        if self.embeddings:
            out["embeddings"] = dict(self.embeddings)
        if self.synth is not None:
            out["synth"] = self.synth.to_dict()
        return out


def _section(factory, raw: object, key: str):
    """Build a config section, rewrapping constructor failures with the
    config key so CLI errors point at the offending part of the file."""
    if not isinstance(raw, Mapping):
        raise ConfigError(f"{key}: expected a JSON object")
    try:
        return factory(**raw) if factory in (SynthSource, GbdtConfig) else factory(raw)
    except TypeError as exc:
        raise ConfigError(f"{key}: {exc}") from None
    except ConfigError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def load_config(path: str | Path) -> dict:
    """Read an experiment config JSON document (not yet validated)."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return raw


def apply_overrides(raw: dict, assignments: Sequence[str]) -> dict:
    """Apply ``dotted.key=value`` overrides on top of a config dict.

    Values parse as JSON when possible (numbers, booleans, quoted strings)
    and fall back to the literal string otherwise.
    """
    out = json.loads(json.dumps(raw))
    for item in assignments:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        try:
            parsed = json.loads(value)
        except json.JSONDecodeError:
            parsed = value
        node = out
        parts = key.split(".")
        for part in parts[:-1]:
            nxt = node.setdefault(part, {})
            if not isinstance(nxt, dict):
                raise ConfigError(f"override {key!r} descends into non-object {part!r}")
            node = nxt
        node[parts[-1]] = parsed
    return out


@dataclass(frozen=True)
class ExperimentResult:
    """Everything a finished run produced, plus where it was written."""

    label: str
    table: ScoreTable
    reports: dict[str, EvalReport]
    output_dir: Path


def _load_datasets(cfg: ExperimentConfig) -> dict[str, LabeledDataset]:
    datasets: dict[str, LabeledDataset] = {}
    for lang, path in cfg.datasets:
        p = Path(path)
        if not p.exists():
            raise DataError(f"datasets.{lang}: missing dataset file {path}")
        datasets[lang] = load_dataset(p, lang)
    schemas = {ds.schema.emotions for ds in datasets.values()}
    if len(schemas) != 1:
        raise DataError(f"datasets disagree on the emotion schema: {sorted(schemas)}")
    return datasets


def _load_embeddings(
    cfg: ExperimentConfig, datasets: dict[str, LabeledDataset]
) -> dict[str, EmbeddingSet]:
    embs: dict[str, EmbeddingSet] = {}
    if cfg.synth is not None:
        for lang, ds in datasets.items():
            embs[lang] = synth_embeddings(
                ds,
                d=cfg.synth.d,
                seed=cfg.synth.seed,
                variant=cfg.synth.variant,
                noise=cfg.synth.noise,
            )
        return embs
    paths = dict(cfg.embeddings)
    for lang, ds in datasets.items():
        p = Path(paths[lang])
        if not p.exists():
            raise DataError(f"embeddings.{lang}: missing embedding file {paths[lang]}")
        emb = read_embeddings(p)
        if emb.ids != ds.ids:
            raise DataError(
                f"embeddings.{lang}: embedding ids do not match the dataset ids"
            )
        embs[lang] = emb
    variants = {e.variant for e in embs.values()}
    if len(variants) > 1:
        raise DataError(f"embedding variants disagree across languages: {sorted(variants)}")
    dims = {e.d for e in embs.values()}
    if len(dims) > 1:
        raise DataError(f"embedding dimensions disagree across languages: {sorted(dims)}")
    return embs


def _pool_train_split(
    datasets: dict[str, LabeledDataset],
    embs: dict[str, EmbeddingSet],
    splits,
    schema: EmotionSchema,
) -> tuple[LabeledDataset, EmbeddingSet]:
    """Union of per-language train splits, ids prefixed ``lang:`` so records
    from different languages can never collide."""
    langs = sorted(datasets)
    ids: list[str] = []
    texts: list[str] = []
    label_blocks = []
    vector_blocks = []
    for lang in langs:
        idx = list(splits[lang].train_indices)
        sub_ds = datasets[lang].subset(idx)
        sub_emb = embs[lang].subset(idx)
        ids.extend(f"{lang}:{rid}" for rid in sub_ds.ids)
        texts.extend(sub_ds.texts)
        label_blocks.append(sub_ds.labels)
        vector_blocks.append(sub_emb.vectors)
    pool_ds = LabeledDataset(
        language="+".join(langs),
        schema=schema,
        ids=tuple(ids),
        texts=tuple(texts),
        labels=np.vstack(label_blocks),
    )
    first = embs[langs[0]]
    pool_emb = EmbeddingSet(first.variant, tuple(ids), np.vstack(vector_blocks), first.meta)
    return pool_ds, pool_emb


def _fit(cfg: ExperimentConfig, pool_emb: EmbeddingSet, pool_ds: LabeledDataset):
    weights = class_weights(label_counts(pool_ds), pool_ds.n)
    if cfg.model == HEAD:
        model: TrainedHead | TreeEnsembleModel = train_head(
            pool_emb, pool_ds, cfg.head, weights
        )
        params = np.concatenate([model.weights.ravel(), model.biases])
    else:
        model = train_gbdt(pool_emb, pool_ds, cfg.gbdt, weights)
        params = np.asarray(model.base_scores, dtype=np.float64)
    if params.size and not np.isfinite(params).all():
        raise NumericError("training produced non-finite model parameters")
    return model


def _predict(cfg: ExperimentConfig, model, emb: EmbeddingSet) -> np.ndarray:
    if cfg.model == HEAD:
        return predict(model, emb)
    _, binary = predict_gbdt(model, emb, threshold=cfg.head.threshold)
    return binary


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Execute split -> weights -> train -> predict -> evaluate and write all
    artifacts under ``cfg.output_dir``.

    ALL mode trains one model on the union of per-language train splits;
    LANG mode trains on the single language's train split.  Either way,
    every language is evaluated on its own validation split, with its
    predictions, per-language report, and split record written to a
    subdirectory named after the language code.
    """
    datasets = _load_datasets(cfg)
    schema = next(iter(datasets.values())).schema
    embs = _load_embeddings(cfg, datasets)
    splits = split_by_language(list(datasets.values()), cfg.split_fraction, cfg.split_seed)

    if cfg.mode == LANG:
        lang = next(iter(datasets))
        idx = list(splits[lang].train_indices)
        pool_ds = datasets[lang].subset(idx)
        pool_emb = embs[lang].subset(idx)
    else:
        pool_ds, pool_emb = _pool_train_split(datasets, embs, splits, schema)
    model = _fit(cfg, pool_emb, pool_ds)

    out_root = Path(cfg.output_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    (out_root / "config.json").write_text(
        json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (out_root / "model.json").write_text(model.to_json() + "\n", encoding="utf-8")

    reports: dict[str, EvalReport] = {}
    for lang in sorted(datasets):
        sr = splits[lang]
        val_idx = list(sr.val_indices)
        ds_va = datasets[lang].subset(val_idx)
        emb_va = embs[lang].subset(val_idx)
        pred = _predict(cfg, model, emb_va)
        report = f1_scores(pred, ds_va.labels, schema.emotions, language=lang)
        reports[lang] = report

        lang_dir = out_root / lang
        lang_dir.mkdir(parents=True, exist_ok=True)
        save_predictions(ds_va.ids, pred, schema, lang_dir / "predictions.csv")
        (lang_dir / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
        split_record = {
            "language": lang,
            "seed": language_seed(cfg.split_seed, lang),
            "train_ids": [datasets[lang].ids[i] for i in sr.train_indices],
            "val_ids": [datasets[lang].ids[i] for i in sr.val_indices],
        }
        (lang_dir / "split.json").write_text(
            json.dumps(split_record, indent=2) + "\n", encoding="utf-8"
        )

    languages = tuple(sorted(datasets))
    scores = np.array([[reports[lang].macro_f1 * 100.0 for lang in languages]])
    table = ScoreTable((cfg.label,), languages, scores)
    markdown, csv_text = render_report(table)
    (out_root / "report.md").write_text(markdown, encoding="utf-8")
    (out_root / "report.csv").write_text(csv_text, encoding="utf-8")
    return ExperimentResult(cfg.label, table, reports, out_root)


def render_report(table: ScoreTable) -> tuple[str, str]:
    """Render a score table as (markdown, csv), languages as rows and models
    as columns, scores to two decimals, missing cells as ``-``.

    The markdown ends with an ``average`` row (per-model mean over present
    scores); the CSV carries only the per-language rows so that loading it
    back recovers exactly the scores that were present.
    """
    import csv as _csv
    import io

    def fmt(value: float) -> str:
        return "-" if np.isnan(value) else f"{value:.2f}"

    header = ["language", *table.models]
    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    for j, lang in enumerate(table.languages):
        cells = [fmt(float(table.scores[i, j])) for i in range(len(table.models))]
        lines.append("| " + " | ".join([lang, *cells]) + " |")
    averages = []
    for i in range(len(table.models)):
        row = table.scores[i]
        present = row[~np.isnan(row)]
        averages.append(fmt(float(present.mean())) if present.size else "-")
    lines.append("| " + " | ".join(["average", *averages]) + " |")
    markdown = "\n".join(lines) + "\n"

    buf = io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for j, lang in enumerate(table.languages):
        writer.writerow(
            [lang, *(fmt(float(table.scores[i, j])) for i in range(len(table.models)))]
        )
    return markdown, buf.getvalue()
