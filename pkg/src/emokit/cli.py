"""Command-line entry points for the emotion-classification toolkit.

Every subcommand maps onto one library operation; ``train`` runs the whole
experiment pipeline from a JSON config.  Exit codes: 0 success, 2 config
error (bad flags, bad config file), 3 data error (missing or malformed
files), 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .dataset import (
    EmotionSchema,
    label_counts,
    load_dataset,
    load_predictions,
    load_score_table,
    save_predictions,
)
from .embeddings import (
    SHARED,
    TEMPLATES,
    VARIANTS,
    get_template,
    read_embeddings,
    render_prompt,
    synth_embeddings,
    write_embeddings,
)
from .ensemble import EnsembleSpec, dev_weights, weighted_vote
from .errors import ConfigError, DataError, EmokitError, NumericError
from .experiment import (
    ExperimentConfig,
    apply_overrides,
    load_config,
    render_report,
    run_experiment,
)
from .gbdt import TreeEnsembleModel, predict_gbdt
from .losses import class_weights
from .metrics import f1_scores
from .stats import ComparisonSpec, compare_models
from .stratify import iterative_stratified_split, language_seed
from .trainer import TrainedHead
from .trainer import predict as head_predict


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_split(args: argparse.Namespace) -> int:
    ds = load_dataset(args.data, args.language)
    seed = language_seed(args.seed, args.language)
    sr = iterative_stratified_split(ds, args.fraction, seed)
    record = {
        "language": args.language,
        "seed": seed,
        "train_ids": [ds.ids[i] for i in sr.train_indices],
        "val_ids": [ds.ids[i] for i in sr.val_indices],
    }
    _emit(json.dumps(record, indent=2) + "\n", args.out)
    return 0


def cmd_weights(args: argparse.Namespace) -> int:
    ds = load_dataset(args.data, args.language)
    counts = label_counts(ds)
    cw = class_weights(counts, ds.n)
    record = {
        "language": args.language,
        "n": ds.n,
        "weights": {
            emotion: {
                "positive": float(cw.w_pos[j]),
                "negative": float(cw.w_neg[j]),
                "count_pos": counts[emotion][0],
            }
            for j, emotion in enumerate(cw.emotions)
        },
    }
    _emit(json.dumps(record, indent=2) + "\n", args.out)
    return 0


def cmd_prompt(args: argparse.Namespace) -> int:
    emotions = [e.strip() for e in args.emotions.split(",") if e.strip()]
    prompt = render_prompt(
        get_template(args.template),
        args.text,
        emotion=args.emotion,
        emotion_list=emotions,
    )
    if args.out:
        Path(args.out).write_text(prompt, encoding="utf-8")
    else:
        print(prompt)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    ds = load_dataset(args.data, args.language)
    emb = synth_embeddings(ds, d=args.d, seed=args.seed, variant=args.variant, noise=args.noise)
    write_embeddings(emb, args.out)
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    raw = load_config(args.config)
    raw = apply_overrides(raw, args.overrides or [])
    try:
        cfg = ExperimentConfig.from_dict(raw)
        result = run_experiment(cfg)
    except EmokitError as exc:
        raise type(exc)(f"{args.config}: {exc}") from None
    averages = [r.macro_f1 for r in result.reports.values()]
    for lang in result.table.languages:
        print(f"{result.label} {lang} macro-F1 {result.table.score(result.label, lang):.2f}")
    print(f"{result.label} average macro-F1 {100.0 * float(np.mean(averages)):.2f}")
    print(f"artifacts written to {result.output_dir}")
    return 0


def _load_model(path: str) -> TrainedHead | TreeEnsembleModel:
    p = Path(path)
    if not p.exists():
        raise DataError(f"missing model file {path}")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid model JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise DataError(f"{path}: model JSON must be an object")
    if "trees" in doc:
        return TreeEnsembleModel.from_json(json.dumps(doc))
    return TrainedHead.from_json(json.dumps(doc))


def cmd_predict(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    emb = read_embeddings(args.embeddings)
    if isinstance(model, TreeEnsembleModel):
        threshold = 0.5 if args.threshold is None else args.threshold
        _, pred = predict_gbdt(model, emb, threshold=threshold)
    else:
        pred = head_predict(model, emb, threshold=args.threshold)
    schema = EmotionSchema(tuple(model.emotions))
    save_predictions(emb.ids, pred, schema, args.out)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    ds = load_dataset(args.gold, args.language)
    ids, pred = load_predictions(args.pred, ds.schema)
    index = {rid: i for i, rid in enumerate(ds.ids)}
    rows = []
    for rid in ids:
        if rid not in index:
            raise DataError(f"{args.pred}: id {rid!r} not present in {args.gold}")
        rows.append(index[rid])
    gold = ds.labels[rows]
    report = f1_scores(pred, gold, ds.schema.emotions, language=args.language)
    _emit(report.to_json() + "\n", args.out)
    return 0


def _prediction_schema(path: str) -> EmotionSchema:
    p = Path(path)
    if not p.exists():
        raise DataError(f"missing prediction file {path}")
    with p.open(encoding="utf-8", newline="") as fh:
        header = next(csv.reader(fh), None)
    if not header or header[0] != "id" or len(header) < 2:
        raise DataError(f"{path}: prediction header must be id,<emotions...>, got {header}")
    return EmotionSchema(tuple(header[1:]))


def cmd_ensemble(args: argparse.Namespace) -> int:
    if (args.weights is None) == (args.table is None):
        raise ConfigError("pass exactly one of --weights or --table/--models")
    schema = _prediction_schema(args.pred[0])
    members = []
    member_ids: tuple[str, ...] | None = None
    for path in args.pred:
        ids, mat = load_predictions(path, schema)
        if member_ids is None:
            member_ids = ids
        elif ids != member_ids:
            raise DataError(f"{path}: prediction ids disagree with {args.pred[0]}")
        members.append(mat)
    if args.weights is not None:
        try:
            weights = tuple(float(w) for w in args.weights.split(","))
        except ValueError:
            raise ConfigError(f"--weights must be comma-separated numbers, got {args.weights!r}")
        source = "explicit"
    else:
        if not args.models:
            raise ConfigError("--table requires --models naming one model per prediction file")
        if len(args.models) != len(args.pred):
            raise ConfigError(
                f"--models names {len(args.models)} models for {len(args.pred)} prediction files"
            )
        table = load_score_table(args.table)
        weights = dev_weights(table, tuple(args.models), language=args.language)
        source = f"dev scores from {args.table}"
    spec = EnsembleSpec(tuple(members), weights, weight_source=source)
    out = weighted_vote(spec)
    save_predictions(member_ids, out, schema, args.out)
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    table = load_score_table(args.table)
    spec_path = Path(args.spec)
    if not spec_path.exists():
        raise ConfigError(f"comparison spec file not found: {args.spec}")
    try:
        doc = json.loads(spec_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.spec}: invalid JSON ({exc})") from None
    specs = doc if isinstance(doc, list) else [doc]
    results = []
    for raw in specs:
        if not isinstance(raw, dict):
            raise ConfigError(f"{args.spec}: each comparison must be a JSON object")
        spec = ComparisonSpec.from_dict(raw)
        result, narrative = compare_models(table, spec)
        print(narrative)
        results.append(
            {
                "label": spec.label,
                "statistic": result.statistic,
                "p_value": result.p_value,
                "n_effective": result.n_effective,
                "method": result.method,
                "degenerate": result.degenerate,
                "narrative": narrative,
            }
        )
    if args.json:
        Path(args.json).write_text(json.dumps(results, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    table = load_score_table(args.table)
    markdown, csv_text = render_report(table)
    if args.out_md:
        Path(args.out_md).write_text(markdown, encoding="utf-8")
    if args.out_csv:
        Path(args.out_csv).write_text(csv_text, encoding="utf-8")
    if not args.out_md and not args.out_csv:
        sys.stdout.write(markdown)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emokit",
        description="Multilabel emotion classification over frozen text embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="stratified train/validation split for one language")
    p.add_argument("--data", required=True, help="labelled dataset CSV")
    p.add_argument("--language", required=True, help="language code for the dataset")
    p.add_argument("--fraction", type=float, default=0.8, help="train fraction (default 0.8)")
    p.add_argument("--seed", type=int, default=42, help="base seed, combined with the language code")
    p.add_argument("--out", help="write the split JSON here instead of stdout")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("weights", help="inverse-frequency class weights for one dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--language", required=True)
    p.add_argument("--out", help="write the weights JSON here instead of stdout")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("prompt", help="render an instruction prompt for one text")
    p.add_argument("--template", required=True, choices=sorted(TEMPLATES))
    p.add_argument("--text", required=True, help="the text snippet to embed")
    p.add_argument("--emotions", required=True, help="comma-separated emotion inventory")
    p.add_argument("--emotion", help="queried emotion (per-emotion templates only)")
    p.add_argument("--out", help="write the exact prompt bytes here instead of stdout")
    p.set_defaults(func=cmd_prompt)

    p = sub.add_parser("synth", help="write synthetic embeddings for a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--language", required=True)
    p.add_argument("--d", type=int, required=True, help="embedding dimension")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--variant", default=SHARED, choices=list(VARIANTS))
    p.add_argument("--out", required=True, help="output embedding file")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="run a full experiment from a JSON config")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument(
        "--set",
        dest="overrides",
        action="append",
        metavar="KEY=VALUE",
        help="override a config key (dotted path), e.g. --set split.seed=7",
    )
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="apply a saved model to an embedding file")
    p.add_argument("--model", required=True, help="model JSON from a training run")
    p.add_argument("--embeddings", required=True, help="embedding file to score")
    p.add_argument("--threshold", type=float, help="decision threshold (default: model's)")
    p.add_argument("--out", required=True, help="output prediction CSV")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="macro-F1 of a prediction file against gold labels")
    p.add_argument("--pred", required=True, help="prediction CSV")
    p.add_argument("--gold", required=True, help="gold labelled dataset CSV")
    p.add_argument("--language", required=True)
    p.add_argument("--out", help="write the report JSON here instead of stdout")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ensemble", help="weighted-vote combination of prediction files")
    p.add_argument("--pred", nargs="+", required=True, help="member prediction CSVs")
    p.add_argument("--weights", help="comma-separated member weights")
    p.add_argument("--table", help="dev score table CSV for score-derived weights")
    p.add_argument("--models", nargs="+", help="table row per prediction file (with --table)")
    p.add_argument("--language", help="weight by this language's dev score instead of the average")
    p.add_argument("--out", required=True, help="output prediction CSV")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("stats", help="rank-based significance tests over a score table")
    p.add_argument("--table", required=True, help="score table CSV")
    p.add_argument("--spec", required=True, help="comparison spec JSON (object or list)")
    p.add_argument("--json", help="also write machine-readable results here")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("report", help="render a score table as markdown and CSV")
    p.add_argument("--table", required=True, help="score table CSV")
    p.add_argument("--out-md", help="write the markdown report here")
    p.add_argument("--out-csv", help="write the CSV report here")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
