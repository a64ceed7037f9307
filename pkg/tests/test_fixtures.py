"""Integrity checks for the bundled reference score tables.

The dev-set tables (``dev_part1`` .. ``dev_part8``) ship without their
summary rows, so each test here recomputes the per-model language average
and pins it against the summary figure recorded for that column.  The two
averages-only tables (``classifier_averages``, ``finetuned_averages``)
describe the same runs under slightly different model names; the alias
tests make sure both views agree.

Tolerance is half a least-significant digit (0.005 on two-decimal scores)
plus float slack: several true means sit exactly on a rounding midpoint
(e.g. 42.395 appears as 42.40 in one table and 42.39 in the other).
"""
from __future__ import annotations

import math

import numpy as np
import pytest

from emokit.fixtures import reference_scores
from emokit.metrics import language_average

TOL = 0.005 + 1e-9

DEV_PARTS = tuple(f"dev_part{i}" for i in range(1, 9))

# Recorded column averages for each dev-set table.
PRINTED_AVERAGES = {
    "dev_part1": {
        "BGEV1-CB-ALL": 53.52,
        "BGEV2-CB-ALL": 55.40,
        "BGEV1-CB-LANG": 54.19,
        "BGEV2-CB-LANG": 55.39,
        "BGEV1-LR-ALL": 52.31,
        "BGEV1-LR-LANG": 54.00,
    },
    "dev_part2": {
        "BGE-SVM-ALL": 18.13,
        "BGE-SVM-LANG": 22.38,
        "BGE-XGB-ALL": 48.41,
        "BGE-XGB-LANG": 48.32,
        "mE5-CB-ALL": 52.20,
        "mE5-CB-LANG": 52.49,
    },
    "dev_part3": {
        "mE5-LR-ALL": 49.71,
        "mE5-LR-LANG": 49.63,
        "mE5-SGB-LANG": 47.46,
        "mE5-SVM-ALL": 41.05,
        "mE5-SVM-LANG": 42.42,
        "mE5-XGB-ALL": 47.97,
    },
    "dev_part4": {
        "JINA-CB-ALL": 44.78,
        "JINA-CB-LANG": 46.32,
        "JINA-LR-ALL": 43.16,
        "JINA-LR-LANG": 49.05,
        "JINA-SVM-ALL": 35.40,
        "JINA-SVM-LANG": 40.08,
    },
    "dev_part5": {
        "JINA-XGB-ALL": 36.38,
        "JINA-XGB-LANG": 38.54,
        "MBERT-BR-LANG": 46.71,
        "MBERT-MO-ALL-AL": 47.10,
        "MBERT-MULTIOUT-ALL-FL": 39.95,
        "MBERT-MO-LANG-AL": 42.40,
    },
    "dev_part6": {
        "MBERT-MO-LANG-FL": 40.13,
        "MBERT-SEP-LANG": 39.54,
        "XLMR-BR-LANG": 45.61,
        "XLMR-MO-ALL-AL": 21.74,
        "XLMR-MO-ALL-FL": 42.38,
        "XLMR-MO-LANG-AL": 27.85,
    },
    "dev_part7": {
        "XLMR-MO-LANG-FL": 25.61,
        "XLMR-SEP-LANG": 21.25,
        "XLMR-CB-ALL": 38.48,
        "XLMR-CB-LANG": 38.38,
        "XLMR-LOGREG-ALL": 40.52,
        "XLMR-LR-LANG": 46.99,
    },
    "dev_part8": {
        "XLMR-SVM-ALL": 25.47,
        "XLMR-SVM-LANG": 33.96,
        "XLMR-XGB-ALL": 30.88,
        "XLMR-XGB-LANG": 29.30,
    },
}

# classifier_averages model name -> (dev table, column name there).
CLASSIFIER_ALIASES = {
    "BGEV1-CB-ALL": ("dev_part1", "BGEV1-CB-ALL"),
    "BGEV2-CB-ALL": ("dev_part1", "BGEV2-CB-ALL"),
    "BGEV1-CB-LANG": ("dev_part1", "BGEV1-CB-LANG"),
    "BGEV2-CB-LANG": ("dev_part1", "BGEV2-CB-LANG"),
    "BGEV1-LR-ALL": ("dev_part1", "BGEV1-LR-ALL"),
    "BGEV1-LR-LANG": ("dev_part1", "BGEV1-LR-LANG"),
    "BGEV1-SVC-ALL": ("dev_part2", "BGE-SVM-ALL"),
    "BGEV1-SVC-LANG": ("dev_part2", "BGE-SVM-LANG"),
    "BGEV1-XGB-ALL": ("dev_part2", "BGE-XGB-ALL"),
    "BGEV1-XGB-LANG": ("dev_part2", "BGE-XGB-LANG"),
    "mE5-CB-ALL": ("dev_part2", "mE5-CB-ALL"),
    "mE5-CB-LANG": ("dev_part2", "mE5-CB-LANG"),
    "mE5-LR-ALL": ("dev_part3", "mE5-LR-ALL"),
    "mE5-LR-LANG": ("dev_part3", "mE5-LR-LANG"),
    "mE5-SGB-LANG": ("dev_part3", "mE5-SGB-LANG"),
    "mE5-SVC-ALL": ("dev_part3", "mE5-SVM-ALL"),
    "mE5-SVC-LANG": ("dev_part3", "mE5-SVM-LANG"),
    "mE5-XGB-ALL": ("dev_part3", "mE5-XGB-ALL"),
    "JINA-CB-ALL": ("dev_part4", "JINA-CB-ALL"),
    "JINA-CB-LANG": ("dev_part4", "JINA-CB-LANG"),
    "JINA-LR-ALL": ("dev_part4", "JINA-LR-ALL"),
    "JINA-LR-LANG": ("dev_part4", "JINA-LR-LANG"),
    "JINA-SVC-ALL": ("dev_part4", "JINA-SVM-ALL"),
    "JINA-SVC-LANG": ("dev_part4", "JINA-SVM-LANG"),
    "JINA-XGB-ALL": ("dev_part5", "JINA-XGB-ALL"),
    "JINA-XGB-LANG": ("dev_part5", "JINA-XGB-LANG"),
    "XLMR-CB-ALL": ("dev_part7", "XLMR-CB-ALL"),
    "XLMR-CB-LANG": ("dev_part7", "XLMR-CB-LANG"),
    "XLMR-LR-ALL": ("dev_part7", "XLMR-LOGREG-ALL"),
    "XLMR-LR-LANG": ("dev_part7", "XLMR-LR-LANG"),
    "XLMR-SVC-ALL": ("dev_part8", "XLMR-SVM-ALL"),
    "XLMR-SVC-LANG": ("dev_part8", "XLMR-SVM-LANG"),
    "XLMR-XGB-ALL": ("dev_part8", "XLMR-XGB-ALL"),
    "XLMR-XGB-LANG": ("dev_part8", "XLMR-XGB-LANG"),
}

# finetuned_averages model name -> (dev table, column name there).
FINETUNED_ALIASES = {
    "mBERT-BR-LANG-FL": ("dev_part5", "MBERT-BR-LANG"),
    "mBERT-MO-ALL-AL": ("dev_part5", "MBERT-MO-ALL-AL"),
    "mBERT-MO-ALL-FL": ("dev_part5", "MBERT-MULTIOUT-ALL-FL"),
    "mBERT-MO-LANG-AL": ("dev_part5", "MBERT-MO-LANG-AL"),
    "mBERT-MO-LANG-FL": ("dev_part6", "MBERT-MO-LANG-FL"),
    "mBERT-SEP-LANG": ("dev_part6", "MBERT-SEP-LANG"),
    "XLMR-BR-LANG-FL": ("dev_part6", "XLMR-BR-LANG"),
    "XLMR-MO-ALL-AL": ("dev_part6", "XLMR-MO-ALL-AL"),
    "XLMR-MO-ALL-FL": ("dev_part6", "XLMR-MO-ALL-FL"),
    "XLMR-MO-LANG-AL": ("dev_part6", "XLMR-MO-LANG-AL"),
    "XLMR-MO-LANG-FL": ("dev_part7", "XLMR-MO-LANG-FL"),
    "XLMR-SEP-LANG-FL": ("dev_part7", "XLMR-SEP-LANG"),
}

LANGUAGES = (
    "afr", "amh", "arq", "ary", "chn", "deu", "eng", "esp", "hau", "hin",
    "ibo", "kin", "mar", "orm", "pcm", "ptbr", "ptmz", "ron", "rus", "som",
    "sun", "swa", "swe", "tat", "tir", "ukr", "vmw", "yor",
)


class TestDevTables:
    @pytest.mark.parametrize("name", DEV_PARTS)
    def test_language_set(self, name):
        table = reference_scores(name)
        assert table.languages == LANGUAGES

    @pytest.mark.parametrize("name", DEV_PARTS)
    def test_columns_match_recorded_averages(self, name):
        table = reference_scores(name)
        printed = PRINTED_AVERAGES[name]
        assert set(table.models) == set(printed)
        for model, expected in printed.items():
            got = language_average(table, model)
            assert got == pytest.approx(expected, abs=TOL), model

    @pytest.mark.parametrize("name", DEV_PARTS)
    def test_no_missing_scores(self, name):
        table = reference_scores(name)
        assert np.isfinite(table.scores).all()


class TestAveragesTables:
    def test_classifier_rows_match_dev_columns(self):
        avgs = reference_scores("classifier_averages")
        assert set(avgs.models) == set(CLASSIFIER_ALIASES)
        for model, (part, column) in CLASSIFIER_ALIASES.items():
            recomputed = language_average(reference_scores(part), column)
            assert avgs.score(model, "average") == pytest.approx(
                recomputed, abs=TOL
            ), model

    def test_finetuned_rows_match_dev_columns(self):
        avgs = reference_scores("finetuned_averages")
        assert set(avgs.models) == set(FINETUNED_ALIASES)
        for model, (part, column) in FINETUNED_ALIASES.items():
            recomputed = language_average(reference_scores(part), column)
            assert avgs.score(model, "average") == pytest.approx(
                recomputed, abs=TOL
            ), model

    def test_spot_values(self):
        avgs = reference_scores("classifier_averages")
        assert avgs.score("BGEV2-CB-ALL", "average") == 55.40
        assert avgs.score("BGEV1-CB-ALL", "average") == 53.52
        ft = reference_scores("finetuned_averages")
        assert ft.score("XLMR-MO-ALL-AL", "average") == 21.74
        assert ft.score("mBERT-MO-ALL-AL", "average") == 47.10


class TestSubmissionTable:
    def test_shape_and_gaps(self):
        table = reference_scores("submission_scores")
        assert table.models == ("Model V1", "Model V2", "Qwen2.5")
        assert set(table.languages) == set(LANGUAGES)
        qwen = table.row("Qwen2.5")
        missing = {
            lang
            for lang, v in zip(table.languages, qwen.tolist())
            if math.isnan(v)
        }
        assert missing == {"amh", "orm", "som", "tir"}
        assert np.isfinite(table.row("Model V1")).all()
        assert np.isfinite(table.row("Model V2")).all()

    def test_spot_values(self):
        table = reference_scores("submission_scores")
        assert table.score("Model V1", "eng") == 72.47
        assert table.score("Model V2", "eng") == 74.94
        assert table.score("Qwen2.5", "eng") == 55.72
        assert table.score("Model V2", "vmw") == 13.55
        assert table.score("Model V1", "ron") == 74.78

    def test_second_system_beats_first_in_most_languages(self):
        table = reference_scores("submission_scores")
        v1 = table.row("Model V1")
        v2 = table.row("Model V2")
        assert int((v2 > v1).sum()) == 25
        assert int((v1 > v2).sum()) == 3
