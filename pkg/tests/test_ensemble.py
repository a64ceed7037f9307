import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emokit.dataset import ScoreTable
from emokit.ensemble import EnsembleSpec, dev_weights, weighted_vote
from emokit.errors import DataError


def spec_of(vote_rows, weights):
    """Members each predicting a single cell, from per-member scalar votes."""
    preds = tuple(np.array([[v]]) for v in vote_rows)
    return EnsembleSpec(preds, tuple(weights))


class TestWeightedVote:
    def test_unanimous_one(self):
        out = weighted_vote(spec_of([1, 1, 1], [0.2, 0.5, 0.3]))
        assert out[0, 0] == 1

    def test_equal_weight_tie_goes_to_zero(self):
        out = weighted_vote(spec_of([1, 0], [1.0, 1.0]))
        assert out[0, 0] == 0

    def test_dev_score_weighted_example(self):
        # s = 55.40 - 54.19 - 55.39 + 53.52 = -0.66 -> 0
        out = weighted_vote(spec_of([1, 0, 0, 1], [55.40, 54.19, 55.39, 53.52]))
        assert out[0, 0] == 0

    def test_flipping_the_votes_flips_that_example(self):
        out = weighted_vote(spec_of([0, 1, 1, 0], [55.40, 54.19, 55.39, 53.52]))
        assert out[0, 0] == 1

    def test_single_member_identity(self):
        rng = np.random.default_rng(0)
        pred = rng.integers(0, 2, size=(10, 3))
        out = weighted_vote(EnsembleSpec((pred,), (0.7,)))
        assert np.array_equal(out, pred)

    def test_all_zero_weights_fall_back_to_uniform(self):
        pred_a = np.array([[1, 1], [0, 0]])
        pred_b = np.array([[1, 0], [0, 1]])
        pred_c = np.array([[1, 0], [1, 1]])
        out = weighted_vote(EnsembleSpec((pred_a, pred_b, pred_c), (0.0, 0.0, 0.0)))
        majority = np.array([[1, 0], [0, 1]])
        assert np.array_equal(out, majority)

    @settings(max_examples=40, deadline=None)
    @given(
        seed=st.integers(0, 10_000),
        scale=st.floats(min_value=0.01, max_value=1000.0),
    )
    def test_weight_scaling_invariance(self, seed, scale):
        rng = np.random.default_rng(seed)
        preds = tuple(rng.integers(0, 2, size=(6, 4)) for _ in range(3))
        weights = tuple(float(w) for w in rng.uniform(0.1, 5.0, size=3))
        base = weighted_vote(EnsembleSpec(preds, weights))
        scaled = weighted_vote(
            EnsembleSpec(preds, tuple(scale * w for w in weights))
        )
        assert np.array_equal(base, scaled)

    @pytest.mark.parametrize("members", [1, 3, 5])
    def test_equal_weights_majority_over_all_patterns(self, members):
        for pattern in itertools.product((0, 1), repeat=members):
            out = weighted_vote(spec_of(pattern, [1.0] * members))
            majority = 1 if sum(pattern) > members / 2 else 0
            assert out[0, 0] == majority, pattern

    def test_even_members_all_tie_patterns_zero(self):
        for pattern in itertools.product((0, 1), repeat=4):
            if sum(pattern) * 2 != 4:
                continue
            out = weighted_vote(spec_of(pattern, [1.0] * 4))
            assert out[0, 0] == 0

    def test_zero_weight_member_contributes_nothing(self):
        with_zero = weighted_vote(spec_of([1, 0, 1], [2.0, 0.0, 1.5]))
        without = weighted_vote(spec_of([1, 1], [2.0, 1.5]))
        assert with_zero[0, 0] == without[0, 0] == 1


class TestEnsembleSpecValidation:
    def test_empty_members_rejected(self):
        with pytest.raises(DataError):
            EnsembleSpec((), ())

    def test_shape_mismatch_rejected(self):
        with pytest.raises(DataError, match="shape"):
            EnsembleSpec(
                (np.zeros((2, 2), dtype=int), np.zeros((3, 2), dtype=int)),
                (1.0, 1.0),
            )

    def test_non_binary_rejected(self):
        with pytest.raises(DataError, match="binary"):
            EnsembleSpec((np.full((1, 1), 2),), (1.0,))

    def test_negative_weight_rejected(self):
        with pytest.raises(DataError, match="non-negative"):
            EnsembleSpec((np.zeros((1, 1), dtype=int),), (-1.0,))

    def test_weight_count_mismatch_rejected(self):
        with pytest.raises(DataError):
            EnsembleSpec((np.zeros((1, 1), dtype=int),), (1.0, 2.0))


class TestDevWeights:
    def table(self):
        return ScoreTable(
            ("m1", "m2", "m3"),
            ("aa", "bb"),
            np.array([[50.0, 60.0], [40.0, np.nan], [0.0, 0.0]]),
        )

    def test_average_weights(self):
        w = dev_weights(self.table(), ["m1", "m2"])
        assert w == pytest.approx((55.0, 40.0))

    def test_per_language_weights(self):
        w = dev_weights(self.table(), ["m1", "m2"], language="aa")
        assert w == pytest.approx((50.0, 40.0))

    def test_missing_language_score_becomes_zero(self):
        w = dev_weights(self.table(), ["m1", "m2"], language="bb")
        assert w == pytest.approx((60.0, 0.0))

    def test_unknown_model_rejected(self):
        with pytest.raises(DataError):
            dev_weights(self.table(), ["m1", "nope"])

    def test_all_zero_weights_then_uniform_vote(self):
        w = dev_weights(self.table(), ["m3"], language="aa")
        assert w == (0.0,)
        pred = np.array([[1, 0]])
        out = weighted_vote(EnsembleSpec((pred,), w))
        assert np.array_equal(out, pred)
