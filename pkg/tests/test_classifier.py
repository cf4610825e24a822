from __future__ import annotations

import itertools

import pytest

from duplication.corpus.processing import expected_pair_count
from duplication.errors import ConfigError, MissingEmbeddingsError
from duplication.evaluation.labeled_pairs import LabeledPair, Truth
from duplication.modalities.semantic.processing import EmbeddingVector
from duplication.services.classifier import (
    Label,
    PairVerdict,
    Thresholds,
    boundary_semantics,
    cascade,
    classify_corpus,
    classify_labeled_pairs,
    classify_pair,
    label_counts,
    label_from_distances,
)
from tests.helpers import corpus_of, message, one_hot_store, random_corpus

EPS = 1e-6
DEFAULTS = Thresholds()

SEED_TEXT = "Hoy votamos por el futuro de todos nosotros en esta tierra"


def literal_cascade(d_g: float, d_s: float, d_l: float, t: Thresholds) -> Label:
    if d_g < t.tau_p:
        return Label.COPY_PASTA
    if d_s < t.tau_s:
        if d_l < t.tau_l:
            return Label.REWORDING
        return Label.TRANSLATION
    return Label.NO_MATCH


#################### Cascade ####################

def test_truth_table_over_threshold_boundaries():
    t = Thresholds(tau_p=0.31, tau_s=0.33, tau_l=0.5)
    around = lambda tau: (tau - EPS, tau, tau + EPS)
    for d_g, d_s, d_l in itertools.product(around(t.tau_p), around(t.tau_s), around(t.tau_l)):
        expected = literal_cascade(d_g, d_s, d_l, t)
        label, *_ = cascade(lambda: d_g, lambda: d_s, lambda: d_l, t, t.tau_p)
        assert label is expected, (d_g, d_s, d_l)
        assert label_from_distances(d_g, d_s, d_l, t) is expected


def test_distance_equal_to_threshold_falls_through():
    t = DEFAULTS
    assert label_from_distances(t.tau_p, 0.0, 0.0, t) is Label.REWORDING
    assert label_from_distances(t.tau_p, t.tau_s, 0.0, t) is Label.NO_MATCH
    assert label_from_distances(0.5, 0.1, t.tau_l, t) is Label.TRANSLATION


def test_cascade_skips_what_it_does_not_need():
    calls: list[str] = []

    def spy(name: str, value: float):
        def compute() -> float:
            calls.append(name)
            return value
        return compute

    label, d_g, d_s, d_l = cascade(spy("g", 0.1), spy("s", 0.0), spy("l", 0.0), DEFAULTS, DEFAULTS.tau_p)
    assert (label, d_s, d_l) == (Label.COPY_PASTA, None, None)
    assert calls == ["g"]

    calls.clear()
    label, *_ = cascade(spy("g", 0.9), spy("s", 0.9), spy("l", 0.0), DEFAULTS, DEFAULTS.tau_p)
    assert label is Label.NO_MATCH
    assert calls == ["g", "s"]


def test_require_semantic_for_copypasta():
    t = DEFAULTS
    label, *_ = cascade(lambda: 0.1, lambda: 0.8, lambda: 0.0, t, t.tau_p, require_semantic_for_copypasta=True)
    assert label is Label.NO_MATCH
    label, d_g, d_s, d_l = cascade(lambda: 0.1, lambda: 0.1, lambda: 0.0, t, t.tau_p, require_semantic_for_copypasta=True)
    assert (label, d_s, d_l) == (Label.COPY_PASTA, 0.1, None)


#################### Pairs ####################

def test_classify_pair_examples():
    seed = message("s", "u1", SEED_TEXT)
    copy = message("c", "u2", SEED_TEXT + " 🔥🔥 #YoVoto")
    reword = message("r", "u3", "En esta tierra todos nosotros votamos hoy por un mañana mejor", lang="es")
    translated = message("t", "u4", "Today we vote for the future of all of us in this land", lang="en")
    e = EmbeddingVector([1.0, 0.0])
    far = EmbeddingVector([0.0, 1.0])

    v = classify_pair(seed, e, copy, e, DEFAULTS)
    assert v.label is Label.COPY_PASTA and v.d_semantic is None and v.d_grapheme < DEFAULTS.tau_p
    assert classify_pair(seed, e, reword, e, DEFAULTS).label is Label.REWORDING
    v = classify_pair(seed, e, translated, e, DEFAULTS)
    assert v.label is Label.TRANSLATION and v.d_language == 1.0
    v = classify_pair(seed, e, translated, far, DEFAULTS)
    assert v.label is Label.NO_MATCH and v.d_semantic == pytest.approx(0.5) and v.d_language is None


def test_und_language_never_counts_as_same_language():
    a = message("a", "u1", SEED_TEXT, lang="und")
    b = message("b", "u2", "Completely different wording, same meaning apparently", lang="und")
    e = EmbeddingVector([1.0, 1.0])
    assert classify_pair(a, e, b, e, DEFAULTS).label is Label.TRANSLATION


def test_language_specific_grapheme_threshold():
    a = message("a", "u1", "今日は良い天気ですね散歩に行きましょう", lang="ja")
    b = message("b", "u2", "明日は雨が降るので家で映画を見ます", lang="ja")
    e1, e2 = EmbeddingVector([1.0, 0.0]), EmbeddingVector([0.0, 1.0])
    assert classify_pair(a, e1, b, e2, DEFAULTS).label is Label.NO_MATCH
    strict = Thresholds(tau_p_by_language={"ja": 0.95})
    assert classify_pair(a, e1, b, e2, strict).label is Label.COPY_PASTA
    assert strict.tau_p_for("ja", "es") == DEFAULTS.tau_p


def test_verdict_records_round_trip():
    a, b = message("b", "u1", SEED_TEXT), message("a", "u2", SEED_TEXT + "!")
    e = EmbeddingVector([1.0, 0.0])
    verdict = classify_pair(a, e, b, e, DEFAULTS)
    record = verdict.to_record()
    assert (record["a"], record["b"], record["label"]) == ("a", "b", "copy_pasta")
    assert PairVerdict.from_record(record) == verdict


#################### Thresholds ####################

@pytest.mark.parametrize("field", ["tau_p", "tau_s", "tau_l"])
@pytest.mark.parametrize("value", [0.0, 1.0, -0.2, 1.5])
def test_thresholds_must_be_inside_the_unit_interval(field, value):
    with pytest.raises(ConfigError):
        Thresholds(**{field: value})


def test_threshold_presets_and_unknown_algorithm():
    assert Thresholds.preset("real-data").tau_s == 0.2
    assert Thresholds.preset("synthetic", tau_s=0.25, tau_p=None).tau_p == DEFAULTS.tau_p
    with pytest.raises(ConfigError):
        Thresholds.preset("tuned")
    with pytest.raises(ConfigError):
        Thresholds(grapheme_algorithm="soundex")
    assert Thresholds(grapheme_algorithm="gz").as_dict()["grapheme_algorithm"] == "gz"


def test_boundary_semantics_mentions_strict_comparison():
    rules = boundary_semantics(DEFAULTS)
    assert "strict <" in rules["comparison"]
    assert "0.31" in rules["copy_pasta"]


#################### Corpus ####################

def _tiny_corpus():
    corpus = corpus_of(
        message("m1", "u1", SEED_TEXT),
        message("m2", "u2", SEED_TEXT + " #YoVoto"),
        message("m3", "u1", SEED_TEXT + " !!"),
        message("m4", "u3", "Today we vote for the future of all of us in this land", lang="en"),
        message("m5", "u4", "Receta de arepas con queso para el desayuno del domingo"),
    )
    return corpus, one_hot_store({"m1": 0, "m2": 0, "m3": 0, "m4": 0, "m5": 1})


def test_classify_corpus_skips_same_account_pairs():
    corpus, store = _tiny_corpus()
    verdicts = list(classify_corpus(corpus, store, DEFAULTS))
    keys = [(v.pair.first_id, v.pair.second_id) for v in verdicts]
    assert ("m1", "m3") not in keys
    assert keys == sorted(keys)
    assert label_counts(verdicts) == {"copy_pasta": 2, "rewording": 0, "translation": 3, "no_match": 0}


def test_emit_nomatch_covers_every_cross_account_pair():
    corpus, store = _tiny_corpus()
    verdicts = list(classify_corpus(corpus, store, DEFAULTS, emit_nomatch=True))
    assert len(verdicts) == expected_pair_count(corpus)
    assert label_counts(verdicts)["no_match"] == 4


def test_missing_embeddings_are_reported_before_any_pair():
    corpus, _ = _tiny_corpus()
    store = one_hot_store({"m1": 0, "m2": 0})
    with pytest.raises(MissingEmbeddingsError) as info:
        classify_corpus(corpus, store, DEFAULTS)
    assert info.value.ids == ["m3", "m4", "m5"]


def test_length_pruning_does_not_change_verdicts(rng):
    t = Thresholds(tau_p=0.31, tau_s=0.2)
    for _ in range(20):
        corpus, store = random_corpus(rng, 300)
        pruned = [v.to_record() for v in classify_corpus(corpus, store, t, prune=True)]
        full = [v.to_record() for v in classify_corpus(corpus, store, t, prune=False)]
        assert pruned == full


def test_worker_count_does_not_change_the_stream(rng):
    corpus, store = random_corpus(rng, 150)
    t = Thresholds(tau_s=0.2, tau_p_by_language={"en": 0.4})
    single = list(classify_corpus(corpus, store, t, workers=1, emit_nomatch=True))
    parallel = list(classify_corpus(corpus, store, t, workers=3, emit_nomatch=True))
    assert single == parallel


def test_labeled_pairs_ignore_account_restriction():
    a, b = message("a", "same", SEED_TEXT), message("b", "same", SEED_TEXT + "!")
    pair = LabeledPair(a, b, Truth.COPY_PASTA)
    (verdict,) = classify_labeled_pairs([pair], one_hot_store({"a": 0, "b": 0}), DEFAULTS)
    assert verdict.label is Truth.COPY_PASTA.label
    with pytest.raises(MissingEmbeddingsError):
        classify_labeled_pairs([pair], one_hot_store({"a": 0}), DEFAULTS)


def test_tighter_semantic_threshold_never_adds_matches(rng):
    corpus, store = random_corpus(rng, 120)
    loose = {v.pair for v in classify_corpus(corpus, store, Thresholds(tau_s=0.33)) if v.label is not Label.COPY_PASTA}
    tight = {v.pair for v in classify_corpus(corpus, store, Thresholds(tau_s=0.2)) if v.label is not Label.COPY_PASTA}
    assert tight < loose
