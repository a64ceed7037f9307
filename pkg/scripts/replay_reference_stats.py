#!/usr/bin/env python3
"""Replay the headline significance tests on the bundled reference tables.

Prints, for each comparison, the statistic, the two-sided p-value, and the
method used (exact enumeration vs normal approximation).  The group
comparisons at the bottom depend on judgement calls about membership, so
they are reported for inspection rather than pinned by the test suite.

Usage:
    python3 scripts/replay_reference_stats.py
"""
from __future__ import annotations

import numpy as np

from emokit.fixtures import reference_scores
from emokit.metrics import win_count
from emokit.stats import (
    GROUPS,
    PAIRED_FACTOR,
    PAIRED_MODELS,
    ComparisonSpec,
    compare_models,
    wilcoxon_signed_rank,
)


def main() -> int:
    submission = reference_scores("submission_scores")
    part1 = reference_scores("dev_part1")
    classifier = reference_scores("classifier_averages")
    finetuned = reference_scores("finetuned_averages")
    combined = classifier.concat(finetuned)

    print("== submission-set comparisons ==")
    _, narrative = compare_models(
        submission,
        ComparisonSpec(kind=PAIRED_MODELS, model_a="Model V2", model_b="Qwen2.5"),
    )
    print(narrative)
    wins, losses, ties = win_count(submission, "Model V2", "Model V1")
    print(
        f"Model V2 vs Model V1: wins={wins} losses={losses} ties={ties} "
        f"of {len(submission.languages)} languages"
    )

    print("\n== dev-set comparisons ==")
    _, narrative = compare_models(
        part1,
        ComparisonSpec(
            kind=PAIRED_MODELS, model_a="BGEV2-CB-ALL", model_b="BGEV1-CB-ALL",
            label="per-emotion vs shared prompts (CB-ALL)",
        ),
    )
    print(narrative)

    fl = [finetuned.score(m, "average")
          for m in ("mBERT-MO-ALL-FL", "mBERT-MO-LANG-FL",
                    "XLMR-MO-ALL-FL", "XLMR-MO-LANG-FL")]
    al = [finetuned.score(m, "average")
          for m in ("mBERT-MO-ALL-AL", "mBERT-MO-LANG-AL",
                    "XLMR-MO-ALL-AL", "XLMR-MO-LANG-AL")]
    res = wilcoxon_signed_rank(fl, al)
    print(
        f"focal vs asymmetric loss (4 fine-tuned pairs): W={res.statistic:g} "
        f"p={res.p_value:.4g} ({res.method})"
    )

    _, narrative = compare_models(
        combined,
        ComparisonSpec(
            kind=PAIRED_FACTOR, factor_a="ALL", factor_b="LANG",
            label="pooled vs per-language training",
        ),
    )
    print(narrative)

    print("\n== group comparisons (membership is a judgement call) ==")
    bge = tuple(m for m in classifier.models if m.startswith("BGE"))
    rest = tuple(m for m in classifier.models if not m.startswith("BGE"))
    _, narrative = compare_models(
        classifier,
        ComparisonSpec(
            kind=GROUPS, group_a=bge, group_b=rest,
            label=f"BGE-based ({len(bge)}) vs others ({len(rest)})",
        ),
    )
    print(narrative)

    prompted = tuple(
        m for m in combined.models
        if m.startswith(("BGE", "mE5"))
    )
    unprompted = tuple(m for m in combined.models if m not in prompted)
    _, narrative = compare_models(
        combined,
        ComparisonSpec(
            kind=GROUPS, group_a=prompted, group_b=unprompted,
            label=(
                f"instruction-prompted encoders ({len(prompted)}) vs "
                f"others ({len(unprompted)})"
            ),
        ),
    )
    print(narrative)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
