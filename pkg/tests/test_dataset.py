import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emokit.dataset import (
    EmotionSchema,
    LabeledDataset,
    ScoreTable,
    label_counts,
    load_dataset,
    load_score_table,
    random_dataset,
    save_dataset,
    save_score_table,
)
from emokit.errors import DataError

FIVE = ["joy", "sadness", "anger", "surprise", "disgust"]


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadDataset:
    def test_schema_comes_from_header_in_order(self, tmp_path):
        p = write(
            tmp_path / "d.csv",
            "id,text,joy,sadness,anger,surprise,disgust\nr1,hello,1,0,0,1,0\n",
        )
        ds = load_dataset(p, "eng")
        assert ds.schema.emotions == tuple(FIVE)
        assert ds.schema.k == 5
        assert list(ds.labels[0]) == [1, 0, 0, 1, 0]

    def test_header_only_file_is_valid_and_empty(self, tmp_path):
        p = write(tmp_path / "d.csv", "id,text,joy\n")
        ds = load_dataset(p, "eng")
        assert ds.n == 0

    def test_quoted_text_with_commas_and_newlines(self, tmp_path):
        p = tmp_path / "d.csv"
        ds = LabeledDataset(
            "eng",
            EmotionSchema(("joy",)),
            ("a", "b"),
            ('she said, "go"', "two\nlines"),
            np.array([[1], [0]]),
        )
        save_dataset(ds, p)
        again = load_dataset(p, "eng")
        assert again.texts == ds.texts

    def test_missing_text_column_rejected(self, tmp_path):
        p = write(tmp_path / "d.csv", "id,joy\nr1,1\n")
        with pytest.raises(DataError, match="id,text"):
            load_dataset(p, "eng")

    def test_bad_label_cell_rejected(self, tmp_path):
        p = write(tmp_path / "d.csv", "id,text,joy\nr1,hi,2\n")
        with pytest.raises(DataError, match="0 or 1"):
            load_dataset(p, "eng")

    def test_duplicate_id_rejected(self, tmp_path):
        p = write(tmp_path / "d.csv", "id,text,joy\nr1,a,0\nr1,b,1\n")
        with pytest.raises(DataError, match="duplicate"):
            load_dataset(p, "eng")

    def test_empty_emotion_list_rejected(self, tmp_path):
        p = write(tmp_path / "d.csv", "id,text\nr1,a\n")
        with pytest.raises(DataError, match="emotion"):
            load_dataset(p, "eng")

    def test_roundtrip_identity(self, tmp_path):
        ds = random_dataset(25, FIVE, seed=3, language="deu")
        p = tmp_path / "rt.csv"
        save_dataset(ds, p)
        again = load_dataset(p, "deu")
        assert again.ids == ds.ids
        assert again.texts == ds.texts
        assert np.array_equal(again.labels, ds.labels)
        assert again.schema == ds.schema


class TestSchemaValidation:
    def test_uppercase_rejected(self):
        with pytest.raises(DataError):
            EmotionSchema(("Joy",))

    def test_duplicates_rejected(self):
        with pytest.raises(DataError):
            EmotionSchema(("joy", "joy"))


class TestScoreTable:
    def test_dash_and_empty_are_missing(self, tmp_path):
        p = write(
            tmp_path / "s.csv",
            "model,eng,deu,afr\nQwen,55.72,-,\nOther,1.0,2.0,3.0\n",
        )
        t = load_score_table(p)
        assert np.isnan(t.score("Qwen", "deu"))
        assert np.isnan(t.score("Qwen", "afr"))
        assert t.score("Qwen", "eng") == pytest.approx(55.72)

    def test_single_cell_grid(self, tmp_path):
        p = write(tmp_path / "s.csv", "model,eng\nonly,50.0\n")
        t = load_score_table(p)
        assert t.models == ("only",)
        assert t.languages == ("eng",)

    def test_non_numeric_cell_rejected(self, tmp_path):
        p = write(tmp_path / "s.csv", "model,eng\nm,abc\n")
        with pytest.raises(DataError, match="non-numeric"):
            load_score_table(p)

    def test_duplicate_model_rejected(self, tmp_path):
        p = write(tmp_path / "s.csv", "model,eng\nm,1\nm,2\n")
        with pytest.raises(DataError, match="duplicate"):
            load_score_table(p)

    def test_out_of_range_rejected(self):
        with pytest.raises(DataError):
            ScoreTable(("m",), ("eng",), np.array([[101.0]]))

    def test_save_load_roundtrip_preserves_missing(self, tmp_path):
        t = ScoreTable(("a", "b"), ("x", "y"), np.array([[1.25, np.nan], [3.5, 4.0]]))
        p = tmp_path / "s.csv"
        save_score_table(t, p)
        again = load_score_table(p)
        assert np.isnan(again.score("a", "y"))
        assert again.score("b", "x") == pytest.approx(3.5)

    def test_concat_requires_same_languages(self):
        a = ScoreTable(("m1",), ("x",), np.array([[1.0]]))
        b = ScoreTable(("m2",), ("y",), np.array([[1.0]]))
        with pytest.raises(DataError):
            a.concat(b)
        c = ScoreTable(("m2",), ("x",), np.array([[2.0]]))
        merged = a.concat(c)
        assert merged.models == ("m1", "m2")


class TestLabelCounts:
    def test_all_zero_labels(self):
        ds = LabeledDataset(
            "eng", EmotionSchema(("joy",)), ("a", "b"), ("x", "y"), np.zeros((2, 1))
        )
        assert label_counts(ds) == {"joy": (0, 2)}

    def test_hand_counted_fixture(self):
        labels = np.zeros((10, 2), dtype=int)
        labels[:3, 0] = 1
        ds = LabeledDataset(
            "eng",
            EmotionSchema(("joy", "anger")),
            tuple(f"r{i}" for i in range(10)),
            tuple("t" * 10),
            labels,
        )
        counts = label_counts(ds)
        assert counts["joy"] == (3, 7)
        assert counts["anger"] == (0, 10)

    def test_empty_dataset(self):
        ds = LabeledDataset(
            "eng", EmotionSchema(("joy",)), (), (), np.zeros((0, 1))
        )
        assert label_counts(ds) == {"joy": (0, 0)}


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), perm_seed=st.integers(0, 10_000))
def test_label_counts_invariant_under_reordering(seed, perm_seed):
    ds = random_dataset(30, ["joy", "anger", "fear"], seed=seed)
    perm = np.random.default_rng(perm_seed).permutation(30)
    shuffled = ds.subset(perm.tolist())
    assert label_counts(shuffled) == label_counts(ds)
