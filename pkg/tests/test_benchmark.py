from __future__ import annotations

import numpy as np
import pytest

from duplication.corpus.models import Corpus
from duplication.evaluation.benchmark import bench_grapheme, bench_report
from duplication.modalities.grapheme.processing import GraphemeAlgorithm, parse_algorithms
from tests.helpers import corpus_of, message

LV, RO, GZ = GraphemeAlgorithm.LEVENSHTEIN, GraphemeAlgorithm.RATCLIFF_OBERSHELP, GraphemeAlgorithm.GZIP


def tweet_corpus(n: int, seed: int = 0) -> Corpus:
    """n messages from n distinct accounts, 40-280 characters of space-separated words."""
    rng = np.random.default_rng(seed)
    letters = list("abcdefghijklmnopqrstuvwxyzñé")
    messages = []
    for i in range(n):
        words = []
        target = int(rng.integers(40, 281))
        while sum(len(w) + 1 for w in words) < target:
            words.append("".join(rng.choice(letters, size=int(rng.integers(2, 9)))))
        messages.append(message(f"m{i:04d}", f"u{i:04d}", " ".join(words)[:target]))
    return Corpus(messages=tuple(messages))


def test_two_messages_make_one_pair():
    table = bench_grapheme(tweet_corpus(2), parse_algorithms("lv,ro,gz,bg_w,bg_l"))
    assert table["algorithm"].tolist() == ["lv", "ro", "gz", "bg_w", "bg_l"]
    assert table["pairs"].tolist() == [1] * 5
    report = bench_report(table)
    assert set(report) == {"lv", "ro", "gz", "bg_w", "bg_l"}
    assert report["lv"]["pairs"] == 1 and report["lv"]["seconds"] >= 0.0


def test_benchmark_needs_two_messages():
    with pytest.raises(ValueError):
        bench_grapheme(tweet_corpus(1), [LV])


def test_undefined_bigram_pairs_are_counted():
    corpus = corpus_of(message("a", "u1", "solitaria"), message("b", "u2", "dos palabras"), message("c", "u3", "tres palabras juntas"))
    (row,) = bench_grapheme(corpus, [GraphemeAlgorithm.BIGRAM_WORD]).to_dict(orient="records")
    assert row["pairs"] == 3
    assert row["undefined"] == 2


def test_time_grows_with_pair_count():
    small = bench_grapheme(tweet_corpus(300, seed=1), [GZ]).iloc[0]
    large = bench_grapheme(tweet_corpus(600, seed=1), [GZ]).iloc[0]
    assert large["pairs"] == 600 * 599 // 2
    assert 2.0 <= large["seconds"] / small["seconds"] <= 8.0


@pytest.mark.slow
def test_levenshtein_is_the_fastest_kernel():
    full = bench_grapheme(tweet_corpus(1_000, seed=2), [LV]).iloc[0]
    assert full["pairs"] == 499_500
    assert full["seconds"] <= 160.0

    table = bench_grapheme(tweet_corpus(200, seed=2), [LV, RO, GZ]).set_index("algorithm")
    assert table.loc["lv", "seconds"] < table.loc["gz", "seconds"]
    assert table.loc["lv", "seconds"] < table.loc["ro", "seconds"]
