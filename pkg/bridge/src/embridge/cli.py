"""Command-line interface.

    embridge extract --dataset corpus.csv --out corpus.embs \
        [--encoder stub] [--template ME5] [--batch-size 16] \
        [--device cpu] [--golden golden_prompts.json]
    embridge verify-prompts --golden golden_prompts.json

Exit codes: 0 success, 2 configuration error, 3 data error,
4 prompt-contract drift.
"""
from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, ContractError, DataError
from .extract import BridgeConfig, extract
from .prompts import TEMPLATE_IDS, verify_against_golden


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embridge",
        description="Extract prompt-conditioned text embeddings into EMBS files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("extract", help="embed one corpus and write an EMBS file")
    ex.add_argument("--dataset", required=True, help="corpus CSV (id,text,<emotions...>)")
    ex.add_argument("--out", required=True, help="output EMBS path")
    ex.add_argument("--encoder", default="stub", help="encoder id (stub or stub-<dim>)")
    ex.add_argument("--template", default="ME5", choices=TEMPLATE_IDS)
    ex.add_argument("--batch-size", type=int, default=16)
    ex.add_argument("--device", default="cpu", help="device hint (ignored by the stub)")
    ex.add_argument(
        "--golden", default=None,
        help="shared golden prompt file; abort on any rendering drift",
    )

    vp = sub.add_parser(
        "verify-prompts", help="check renderings against the shared golden file"
    )
    vp.add_argument("--golden", required=True)
    return parser


def cmd_extract(args: argparse.Namespace) -> int:
    cfg = BridgeConfig(
        dataset=args.dataset,
        output=args.out,
        encoder=args.encoder,
        template_id=args.template,
        batch_size=args.batch_size,
        device=args.device,
        golden=args.golden,
    )
    out = extract(cfg)
    print(f"wrote {out}")
    return 0


def cmd_verify_prompts(args: argparse.Namespace) -> int:
    n = verify_against_golden(args.golden)
    print(f"{n} golden prompt cases match")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "extract":
            return cmd_extract(args)
        if args.command == "verify-prompts":
            return cmd_verify_prompts(args)
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
