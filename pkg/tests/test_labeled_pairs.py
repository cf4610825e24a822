from __future__ import annotations

import numpy as np
import pytest

from duplication.errors import MissingEmbeddingsError, RecordError, UnknownLabelError
from duplication.evaluation.labeled_pairs import (
    Truth,
    calibrate_semantic,
    compare_grapheme_algorithms,
    load_inline_embeddings,
    load_labeled_pairs,
    pair_distances,
    write_labeled_pairs,
)
from duplication.evaluation.processing import youden_optimal
from duplication.evaluation.synthetic import threshold_fixture
from duplication.modalities.grapheme.processing import GraphemeAlgorithm, parse_algorithms
from duplication.modalities.semantic.processing import EmbeddingStore
from duplication.services.classifier import Label
from tests.helpers import write_lines

LONG_ES = "Mañana salimos todos a las calles para defender nuestra democracia"
LONG_EN = "Tomorrow we all take to the streets to defend our democracy"


def test_load_normalizes_both_sides(tmp_path):
    path = write_lines(
        tmp_path / "pairs.jsonl",
        [
            {"text_a": LONG_ES, "text_b": LONG_EN + " https://t.co/x", "lang_a": "ES", "lang_b": "en-GB", "truth": "translation"},
            "",
            {"id_a": "x", "id_b": "y", "text_a": "hola", "text_b": "hola!", "lang_a": "es", "lang_b": "es", "truth": "control"},
        ],
    )
    pairs = load_labeled_pairs(path)
    assert [p.key for p in pairs][0].first_id == "1a"
    first = pairs[0]
    assert (first.first.language, first.second.language) == ("es", "en")
    assert "https" not in first.second.semantic_text
    assert pairs[1].truth is Truth.CONTROL and pairs[1].truth.label is Label.NO_MATCH
    assert [p.first.id for p in load_labeled_pairs(path, length_filter=True)] == ["1a"]


def test_unknown_truth_and_broken_lines(tmp_path):
    parody = write_lines(tmp_path / "p.jsonl", [{"text_a": "a", "text_b": "b", "truth": "parody"}])
    with pytest.raises(UnknownLabelError, match="parody"):
        load_labeled_pairs(parody)
    broken = write_lines(tmp_path / "b.jsonl", [{"text_a": "a", "truth": "control"}])
    with pytest.raises(RecordError):
        load_labeled_pairs(broken)


def test_empty_file_warns(tmp_path, caplog):
    path = tmp_path / "empty.jsonl"
    path.write_text("", encoding="utf-8")
    with caplog.at_level("WARNING"):
        assert load_labeled_pairs(path) == []
    assert "no labeled pairs" in caplog.text


def test_write_then_load_keeps_ids_and_inline_vectors(tmp_path, small_fixture):
    path = tmp_path / "pairs.jsonl"
    assert write_labeled_pairs(small_fixture.pairs, path, small_fixture.store) == len(small_fixture.pairs)
    loaded = load_labeled_pairs(path)
    assert [p.key for p in loaded] == [p.key for p in small_fixture.pairs]
    assert [p.truth for p in loaded] == [p.truth for p in small_fixture.pairs]
    store = load_inline_embeddings(path)
    assert len(store) == len(small_fixture.store)


def test_distance_table_marks_undefined_bigrams(tmp_path):
    path = write_lines(
        tmp_path / "pairs.jsonl",
        [{"id_a": "a", "id_b": "b", "text_a": "palabra", "text_b": "otra palabra", "lang_a": "es", "lang_b": "es", "truth": "rewording"}],
    )
    table = pair_distances(load_labeled_pairs(path), None, parse_algorithms("lv,bg_w"))
    assert list(table.columns) == ["a", "b", "truth", "lv", "bg_w", "d_semantic", "d_language"]
    assert np.isnan(table.loc[0, "bg_w"]) and np.isnan(table.loc[0, "d_semantic"])
    assert table.loc[0, "d_language"] == 0.0


def test_distance_table_requires_embeddings(small_fixture):
    partial = small_fixture.pairs[:2]
    with pytest.raises(MissingEmbeddingsError):
        pair_distances(partial, EmbeddingStore.from_vectors({}, "empty"), [GraphemeAlgorithm.LEVENSHTEIN])


def test_youden_recovers_the_copy_pasta_threshold():
    pairs = threshold_fixture(n_per_class=500, seed=3)
    table = pair_distances(pairs, None, [GraphemeAlgorithm.LEVENSHTEIN])
    cp = table.loc[table["truth"] == "copy_pasta", "lv"]
    assert cp.min() >= 0.05 - 0.01 and cp.max() <= 0.25 + 0.01
    summary, curves = compare_grapheme_algorithms(table, [GraphemeAlgorithm.LEVENSHTEIN], n_resamples=200, seed=3)
    threshold, j = youden_optimal(curves["lv"])
    assert 0.25 <= threshold <= 0.40
    assert j >= 0.98
    row = summary.iloc[0]
    assert row["algorithm"] == "lv" and row["auc_lo"] <= row["auc"] <= row["auc_hi"]


def test_algorithm_without_defined_distances_is_skipped_with_a_warning(tmp_path, caplog):
    records = [{"text_a": f"palabra{i}", "text_b": f"palabra{i}x", "truth": "copy_pasta"} for i in range(4)]
    records += [{"text_a": f"palabra{i}", "text_b": f"otra{i}cosa", "truth": "rewording"} for i in range(4)]
    pairs = load_labeled_pairs(write_lines(tmp_path / "pairs.jsonl", records))
    algorithms = parse_algorithms("lv,bg_w")
    table = pair_distances(pairs, None, algorithms)
    summary, curves = compare_grapheme_algorithms(table, algorithms, n_resamples=50, seed=1)
    assert list(curves) == ["lv"]
    rows = summary.set_index("algorithm")
    assert not rows.loc["bg_w", "defined"] and rows.loc["bg_w", "positives"] == 0
    assert np.isnan(rows.loc["bg_w", "auc"])
    assert rows.loc["lv", "defined"]
    assert "bg_w skipped" in caplog.text


def test_semantic_calibration_separates_meaning_from_controls(small_fixture):
    table = pair_distances(small_fixture.pairs, small_fixture.store, [GraphemeAlgorithm.LEVENSHTEIN])
    summary, curve = calibrate_semantic(table, n_resamples=100, seed=1)
    assert curve.auc == pytest.approx(1.0)
    assert 0.0 < summary["threshold"] < 0.45
    assert summary["micro"] == {"precision": 1.0, "recall": 1.0}
    assert set(summary["per_class"]) == {"copy_pasta", "rewording", "translation"}
    assert summary["macro"]["recall"] == 1.0
