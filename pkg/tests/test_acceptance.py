"""Acceptance gate: the externally checkable contract of the toolkit.

One test group per shipped guarantee:

* reference statistics recomputed from the bundled score tables,
* numerical contracts of the loss functions and the exact rank tests,
* end-to-end learning quality on a separable synthetic corpus,
* stratified-split balance, including an exhaustive small-n oracle,
* ensemble vote semantics,
* bit-identical reruns of a full experiment.

Every oracle here is independent of the code under test: score-table
figures are pinned as literals, rank-test p-values are recomputed by
enumeration, and gradients by central finite differences.
"""
from __future__ import annotations

import itertools
import time

import numpy as np
import pytest

from emokit.dataset import label_counts, random_dataset
from emokit.ensemble import EnsembleSpec, weighted_vote
from emokit.embeddings import synth_embeddings
from emokit.experiment import ExperimentConfig, SynthSource, run_experiment
from emokit.fixtures import reference_scores
from emokit.gbdt import GbdtConfig, predict_gbdt, train_gbdt
from emokit.losses import (
    AsymmetricParams,
    FocalParams,
    asymmetric_loss,
    class_weights,
    focal_loss,
    weighted_bce,
)
from emokit.metrics import f1_scores, language_average, win_count
from emokit.stats import (
    EXACT,
    PAIRED_FACTOR,
    ComparisonSpec,
    compare_models,
    mann_whitney_u,
    wilcoxon_signed_rank,
)
from emokit.stratify import iterative_stratified_split
from emokit.trainer import HeadConfig, predict, train_head

EMOTIONS = ("anger", "disgust", "fear", "joy", "sadness")


# ---------------------------------------------------------------------------
# Reference statistics recomputed from the bundled score tables
# ---------------------------------------------------------------------------

class TestReferenceStatistics:
    def test_four_pair_signed_rank_from_finetuned_averages(self):
        """Focal-loss vs asymmetric-loss multi-output variants: the four
        paired averages give W = 4 with an exact two-sided p of 0.875."""
        table = reference_scores("finetuned_averages")
        fl = [
            table.score(m, "average")
            for m in (
                "mBERT-MO-ALL-FL",
                "mBERT-MO-LANG-FL",
                "XLMR-MO-ALL-FL",
                "XLMR-MO-LANG-FL",
            )
        ]
        al = [
            table.score(m, "average")
            for m in (
                "mBERT-MO-ALL-AL",
                "mBERT-MO-LANG-AL",
                "XLMR-MO-ALL-AL",
                "XLMR-MO-LANG-AL",
            )
        ]
        start = time.perf_counter()
        res = wilcoxon_signed_rank(fl, al)
        elapsed = time.perf_counter() - start
        assert res.statistic == 4.0
        assert res.p_value == 0.875
        assert res.method == EXACT
        assert res.n_effective == 4
        assert elapsed < 1.0

    def test_submission_signed_rank_vs_generative_baseline(self):
        """Final system vs the generative baseline over the 24 languages
        both cover: W = 285.0 with exact p below 0.001."""
        table = reference_scores("submission_scores")
        ours = table.row("Model V2")
        baseline = table.row("Qwen2.5")
        shared = ~np.isnan(ours) & ~np.isnan(baseline)
        assert int(shared.sum()) == 24
        start = time.perf_counter()
        res = wilcoxon_signed_rank(ours[shared], baseline[shared])
        elapsed = time.perf_counter() - start
        assert res.statistic == 285.0
        assert res.p_value < 0.001
        assert res.method == EXACT
        assert elapsed < 1.0

    def test_submission_win_count(self):
        table = reference_scores("submission_scores")
        wins, losses, ties = win_count(table, "Model V2", "Model V1")
        assert (wins, losses, ties) == (25, 3, 0)
        assert len(table.languages) == 28

    def test_language_average_reproduces_recorded_means(self):
        table = reference_scores("dev_part1")
        assert language_average(table, "BGEV2-CB-ALL") == pytest.approx(
            55.40, abs=0.005
        )
        assert language_average(table, "BGEV1-CB-ALL") == pytest.approx(
            53.52, abs=0.005
        )

    def test_pooled_vs_per_language_paired_factor(self):
        """Pairing every model that exists in both a pooled-training (ALL)
        and a per-language (LANG) variant across the two averages tables
        gives a signed-rank p in [0.05, 0.07].  The pair list is printed
        because the exact pairing convention is a judgement call."""
        combined = reference_scores("classifier_averages").concat(
            reference_scores("finetuned_averages")
        )
        spec = ComparisonSpec(
            kind=PAIRED_FACTOR, factor_a="ALL", factor_b="LANG",
            label="pooled vs per-language",
        )
        res, narrative = compare_models(combined, spec)
        print(narrative)
        from emokit.stats import _stems_with_factor

        in_all = _stems_with_factor(combined.models, "ALL")
        in_lang = _stems_with_factor(combined.models, "LANG")
        stems = sorted(set(in_all) & set(in_lang))
        for stem in stems:
            print(f"  {in_all[stem]} <-> {in_lang[stem]}")
        assert len(stems) == 20
        assert "stems=20" in narrative
        assert 0.05 <= res.p_value <= 0.07


# ---------------------------------------------------------------------------
# Loss functions: finite-difference gradients and special-case equivalences
# ---------------------------------------------------------------------------

def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.asarray(z, dtype=np.float64)))


Z_GRID = np.arange(-6.0, 6.0 + 1e-9, 0.5)


class TestLossGradients:
    @pytest.mark.parametrize(
        "loss_fn",
        [
            lambda p, y: weighted_bce(p, y, w_pos=2.5, w_neg=0.625),
            lambda p, y: focal_loss(p, y),
            lambda p, y: asymmetric_loss(p, y),
        ],
        ids=["weighted_bce", "focal", "asymmetric"],
    )
    def test_gradient_matches_central_differences(self, loss_fn):
        h = 1e-5
        for y in (0.0, 1.0):
            _, grad = loss_fn(_sigmoid(Z_GRID), y)
            lo, _ = loss_fn(_sigmoid(Z_GRID - h), y)
            hi, _ = loss_fn(_sigmoid(Z_GRID + h), y)
            approx = (hi - lo) / (2 * h)
            np.testing.assert_allclose(grad, approx, rtol=1e-4, atol=1e-7)

    def test_focal_without_modulation_is_cross_entropy(self):
        p = _sigmoid(Z_GRID)
        for y in (0.0, 1.0):
            loss_f, grad_f = focal_loss(p, y, FocalParams(gamma=0.0))
            loss_ce, grad_ce = weighted_bce(p, y)
            np.testing.assert_allclose(loss_f, loss_ce, atol=1e-12)
            np.testing.assert_allclose(grad_f, grad_ce, atol=1e-12)

    def test_asymmetric_without_focus_or_margin_is_cross_entropy(self):
        p = _sigmoid(Z_GRID)
        params = AsymmetricParams(gamma_pos=0.0, gamma_neg=0.0, margin=0.0)
        for y in (0.0, 1.0):
            loss_a, grad_a = asymmetric_loss(p, y, params)
            loss_ce, grad_ce = weighted_bce(p, y)
            np.testing.assert_allclose(loss_a, loss_ce, atol=1e-12)
            np.testing.assert_allclose(grad_a, grad_ce, atol=1e-12)


# ---------------------------------------------------------------------------
# Exact rank tests against enumeration oracles
# ---------------------------------------------------------------------------

def _rank_abs(values):
    absvals = [abs(v) for v in values]
    return [
        sum(1 for o in absvals if o < v) + (sum(1 for o in absvals if o == v) + 1) / 2.0
        for v in absvals
    ]


def _brute_wilcoxon(a, b):
    diffs = [x - y for x, y in zip(a, b) if x != y]
    ranks = _rank_abs(diffs)
    w = sum(r for r, d in zip(ranks, diffs) if d > 0)
    count_le = count_ge = 0
    for signs in itertools.product((0, 1), repeat=len(diffs)):
        w_null = sum(r for r, s in zip(ranks, signs) if s)
        count_le += w_null <= w + 1e-9
        count_ge += w_null >= w - 1e-9
    return w, min(1.0, 2 * min(count_le, count_ge) / 2 ** len(diffs))


def _brute_mwu(xs, ys):
    def u_stat(x_vals, y_vals):
        return sum(
            (1.0 if x > y else 0.0) + (0.5 if x == y else 0.0)
            for x in x_vals
            for y in y_vals
        )

    pooled = list(xs) + list(ys)
    n1 = len(xs)
    u_obs = u_stat(xs, ys)
    count_le = count_ge = total = 0
    for combo in itertools.combinations(range(len(pooled)), n1):
        chosen = set(combo)
        u = u_stat(
            [pooled[i] for i in combo],
            [pooled[i] for i in range(len(pooled)) if i not in chosen],
        )
        total += 1
        count_le += u <= u_obs + 1e-9
        count_ge += u >= u_obs - 1e-9
    return u_obs, min(1.0, 2 * min(count_le, count_ge) / total)


class TestExactOracles:
    @pytest.mark.parametrize("seed", range(100))
    def test_wilcoxon_matches_sign_flip_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 11))
        if seed % 2:
            a = rng.normal(size=n)
            b = rng.normal(size=n)
        else:
            a = rng.integers(0, 5, size=n).astype(float)
            b = rng.integers(0, 5, size=n).astype(float)
        w_expect, p_expect = _brute_wilcoxon(a, b)
        res = wilcoxon_signed_rank(a, b)
        if res.n_effective == 0:
            assert res.degenerate and res.p_value == 1.0
        else:
            assert res.statistic == pytest.approx(w_expect, abs=1e-12)
            assert res.p_value == pytest.approx(p_expect, abs=1e-12)
            assert res.method == EXACT

    @pytest.mark.parametrize("seed", range(100))
    def test_mann_whitney_matches_arrangement_enumeration(self, seed):
        rng = np.random.default_rng(10_000 + seed)
        n1 = int(rng.integers(1, 10))
        n2 = int(rng.integers(1, 11 - n1))
        if seed % 2:
            xs = rng.normal(size=n1)
            ys = rng.normal(size=n2)
        else:
            xs = rng.integers(0, 4, size=n1).astype(float)
            ys = rng.integers(0, 4, size=n2).astype(float)
        u_expect, p_expect = _brute_mwu(list(xs), list(ys))
        res = mann_whitney_u(xs, ys)
        assert res.statistic == pytest.approx(u_expect, abs=1e-12)
        assert res.p_value == pytest.approx(p_expect, abs=1e-12)
        assert res.method == EXACT


# ---------------------------------------------------------------------------
# End-to-end learning on a separable synthetic corpus
# ---------------------------------------------------------------------------

class TestPipelineLearning:
    def test_head_and_gbdt_reach_95_percent_macro_f1(self):
        start = time.perf_counter()
        ds = random_dataset(200, EMOTIONS, seed=42)
        embs = synth_embeddings(ds, d=16, seed=42, noise=0.05)
        split = iterative_stratified_split(ds, 0.8, seed=42)
        train_idx = list(split.train_indices)
        val_idx = list(split.val_indices)
        ds_train = ds.subset(train_idx)
        weights = class_weights(label_counts(ds_train), ds_train.n)

        head = train_head(embs.subset(train_idx), ds_train, HeadConfig(), weights)
        head_pred = predict(head, embs.subset(val_idx))
        head_report = f1_scores(head_pred, ds.labels[val_idx], EMOTIONS)
        assert head_report.macro_f1 >= 0.95

        booster = train_gbdt(
            embs.subset(train_idx), ds_train, GbdtConfig(), weights
        )
        _, gbdt_pred = predict_gbdt(booster, embs.subset(val_idx))
        gbdt_report = f1_scores(gbdt_pred, ds.labels[val_idx], EMOTIONS)
        assert gbdt_report.macro_f1 >= 0.95

        assert time.perf_counter() - start < 60.0


# ---------------------------------------------------------------------------
# Stratified splitting
# ---------------------------------------------------------------------------

def _max_deviation(labels, train_indices, fraction):
    chosen = np.zeros(len(labels), dtype=bool)
    chosen[list(train_indices)] = True
    worst = 0.0
    for j in range(labels.shape[1]):
        total = int(labels[:, j].sum())
        if total == 0:
            continue
        got = int(labels[chosen, j].sum())
        worst = max(worst, abs(got / total - fraction))
    return worst


class TestStratification:
    @pytest.mark.parametrize("fixture_seed", range(5))
    def test_common_emotions_within_point_one_of_split_fraction(
        self, fixture_seed
    ):
        ds = random_dataset(200, EMOTIONS, seed=fixture_seed)
        res = iterative_stratified_split(ds, 0.8, seed=fixture_seed + 7)
        totals = ds.labels.sum(axis=0)
        train_pos = ds.labels[list(res.train_indices)].sum(axis=0)
        for j in range(ds.schema.k):
            if totals[j] >= 5:
                assert abs(train_pos[j] / totals[j] - 0.8) <= 0.1

    @pytest.mark.parametrize("fixture_seed", range(4))
    def test_matches_exhaustive_optimum_on_twelve_records(self, fixture_seed):
        ds = random_dataset(12, ("anger", "fear", "joy"), seed=fixture_seed)
        res = iterative_stratified_split(ds, 0.8, seed=42)
        t = len(res.train_indices)
        greedy = _max_deviation(ds.labels, res.train_indices, 0.8)
        best = min(
            _max_deviation(ds.labels, combo, 0.8)
            for combo in itertools.combinations(range(12), t)
        )
        assert greedy <= best + 1e-12


# ---------------------------------------------------------------------------
# Ensemble vote semantics
# ---------------------------------------------------------------------------

class TestEnsembleVotes:
    def test_equal_weights_reduce_to_majority_for_up_to_five_members(self):
        for n_members in range(1, 6):
            for pattern in itertools.product((0, 1), repeat=n_members):
                spec = EnsembleSpec(
                    predictions=tuple(
                        np.array([[v]], dtype=np.int64) for v in pattern
                    ),
                    weights=(1.0,) * n_members,
                )
                got = int(weighted_vote(spec)[0, 0])
                ones = sum(pattern)
                majority = 1 if ones > n_members - ones else 0
                assert got == majority, (n_members, pattern)

    def test_exact_weight_cancellation_returns_negative(self):
        spec = EnsembleSpec(
            predictions=(
                np.array([[0]]),
                np.array([[1]]),
                np.array([[1]]),
            ),
            weights=(2.0, 1.0, 1.0),
        )
        assert int(weighted_vote(spec)[0, 0]) == 0


# ---------------------------------------------------------------------------
# Determinism of full experiment runs
# ---------------------------------------------------------------------------

class TestDeterminism:
    def test_identical_configs_produce_byte_identical_predictions(self, tmp_path):
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        from emokit.dataset import save_dataset

        paths = {}
        for i, lang in enumerate(("aa", "bb")):
            ds = random_dataset(60, EMOTIONS, seed=11 + i, language=lang)
            path = corpus / f"{lang}.csv"
            save_dataset(ds, path)
            paths[lang] = str(path)

        def build(out):
            return ExperimentConfig(
                datasets=tuple(sorted(paths.items())),
                mode="ALL",
                model="head",
                synth=SynthSource(d=8, seed=5, noise=0.3),
                head=HeadConfig(epochs=30),
                output_dir=str(out),
                name="determinism-check",
            )

        first = run_experiment(build(tmp_path / "run1"))
        second = run_experiment(build(tmp_path / "run2"))
        for lang in ("aa", "bb"):
            a = (tmp_path / "run1" / lang / "predictions.csv").read_bytes()
            b = (tmp_path / "run2" / lang / "predictions.csv").read_bytes()
            assert a == b
            assert a  # non-empty
        assert first.table.scores.shape == second.table.scores.shape
        assert np.array_equal(first.table.scores, second.table.scores)
