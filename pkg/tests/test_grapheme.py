from __future__ import annotations

import string

import numpy as np
import pytest

from duplication.errors import InsufficientBigramsError
from duplication.modalities.grapheme.processing import (
    GraphemeAlgorithm,
    GraphemeDistance,
    dist_bigram,
    dist_gzip,
    dist_levenshtein,
    dist_ratcliff_obershelp,
    grapheme_distance,
    parse_algorithms,
    prune_by_length,
)
from tests.helpers import message

ALPHABET = list("abcdeé ñß中文🙂🔥 xyz")


#################### Oracles ####################

def levenshtein_oracle(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb))
        prev = cur
    return prev[-1]


def _longest_block(a: str, b: str, alo: int, ahi: int, blo: int, bhi: int) -> tuple[int, int, int]:
    best = (0, alo, blo)
    for i in range(alo, ahi):
        for j in range(blo, bhi):
            k = 0
            while i + k < ahi and j + k < bhi and a[i + k] == b[j + k]:
                k += 1
            if k > best[0]:
                best = (k, i, j)
    return best


def ratcliff_matches(a: str, b: str, alo: int = 0, ahi: int | None = None, blo: int = 0, bhi: int | None = None) -> int:
    ahi = len(a) if ahi is None else ahi
    bhi = len(b) if bhi is None else bhi
    k, i, j = _longest_block(a, b, alo, ahi, blo, bhi)
    if k == 0:
        return 0
    return k + ratcliff_matches(a, b, alo, i, blo, j) + ratcliff_matches(a, b, i + k, ahi, j + k, bhi)


def ratcliff_oracle(a: str, b: str) -> float:
    if not a and not b:
        return 0.0
    matched = max(ratcliff_matches(a, b), ratcliff_matches(b, a))
    return 1.0 - 2.0 * matched / (len(a) + len(b))


def bigram_oracle(a: str, b: str, unit: str) -> float:
    def tally(text: str) -> dict:
        tokens = text.split() if unit == "word" else list(text)
        counts: dict = {}
        for pair in zip(tokens, tokens[1:]):
            counts[pair] = counts.get(pair, 0) + 1
        return counts

    ca, cb = tally(a), tally(b)
    diff = sum(abs(ca.get(k, 0) - cb.get(k, 0)) for k in set(ca) | set(cb))
    return diff / (sum(ca.values()) + sum(cb.values()))


def _random_text(rng: np.random.Generator, low: int, high: int) -> str:
    return "".join(rng.choice(ALPHABET, size=int(rng.integers(low, high + 1))))


#################### Oracle equivalence ####################

def test_levenshtein_matches_dp_oracle(rng):
    for _ in range(1000):
        a, b = _random_text(rng, 1, 280), _random_text(rng, 1, 280)
        d = dist_levenshtein(a, b)
        assert d == levenshtein_oracle(a, b) / max(len(a), len(b))
        assert 0.0 <= d <= 1.0


def test_ratcliff_obershelp_matches_recursive_oracle(rng):
    for _ in range(300):
        a, b = _random_text(rng, 1, 60), _random_text(rng, 1, 60)
        d = dist_ratcliff_obershelp(a, b)
        assert d == pytest.approx(ratcliff_oracle(a, b), abs=1e-12)
        assert 0.0 <= d <= 1.0


def test_bigram_distances_match_hand_tally(rng):
    for _ in range(1000):
        a, b = _random_text(rng, 2, 280), _random_text(rng, 2, 280)
        assert dist_bigram(a, b, "letter") == pytest.approx(bigram_oracle(a, b, "letter"), abs=1e-12)
        if len(a.split()) >= 2 and len(b.split()) >= 2:
            d = dist_bigram(a, b, "word")
            assert d == pytest.approx(bigram_oracle(a, b, "word"), abs=1e-12)
            assert 0.0 <= d <= 1.0


#################### Kernel behaviour ####################

def test_levenshtein_textbook_example():
    assert dist_levenshtein("kitten", "sitting") == pytest.approx(3 / 7)
    assert dist_levenshtein("", "") == 0.0
    assert dist_levenshtein("abc", "") == 1.0


def test_levenshtein_grows_one_step_per_substitution(rng):
    for length in (60, 97, 200):
        base = list(rng.choice(list(string.ascii_lowercase), size=length))
        edited = base.copy()
        previous = 0.0
        for k, position in enumerate(rng.permutation(length)[:40], start=1):
            edited[position] = "中"
            d = dist_levenshtein("".join(base), "".join(edited))
            assert d == k / length
            assert d >= previous
            previous = d


def test_ratcliff_obershelp_is_symmetric():
    assert dist_ratcliff_obershelp("abcd", "bcda") == pytest.approx(0.25)
    assert dist_ratcliff_obershelp("bcda", "abcd") == pytest.approx(0.25)


def test_gzip_distance_near_zero_for_identical_text():
    for text in ("ab" * 100, "a" * 50, "buynowfreecrypto" * 4):
        assert dist_gzip(text, text) < 0.2
    assert dist_gzip("", "") == 0.0


def test_gzip_identity_stays_low_on_random_text(rng):
    for _ in range(200):
        text = _random_text(rng, 50, 280)
        assert dist_gzip(text, text) < 0.25


def test_gzip_separates_unrelated_random_text(rng):
    printable = list(string.ascii_letters + string.digits + string.punctuation)
    for _ in range(20):
        a = "".join(rng.choice(printable, size=200))
        b = "".join(rng.choice(printable, size=200))
        assert dist_gzip(a, b) > 0.7


def test_gzip_distance_is_symmetric_and_bounded(rng):
    for _ in range(100):
        a, b = _random_text(rng, 1, 200), _random_text(rng, 1, 200)
        d = dist_gzip(a, b)
        assert d == dist_gzip(b, a)
        assert 0.0 <= d <= 1.0


def test_bigrams_need_two_tokens():
    with pytest.raises(InsufficientBigramsError):
        dist_bigram("palabra", "dos palabras", "word")
    with pytest.raises(InsufficientBigramsError):
        dist_bigram("a", "ab", "letter")
    with pytest.raises(ValueError):
        dist_bigram("ab", "ab", "syllable")


def test_distance_values_carry_their_algorithm():
    d = dist_levenshtein("abc", "abd")
    assert d.algorithm is GraphemeAlgorithm.LEVENSHTEIN
    with pytest.raises(ValueError):
        GraphemeDistance(1.5, GraphemeAlgorithm.GZIP)


def test_word_bigrams_read_semantic_text_and_the_rest_grapheme_text():
    m1 = message("1", "u1", "hola mundo cruel")
    m2 = message("2", "u2", "Hola, mundo cruel!")
    assert grapheme_distance(m1, m2, "bg_w") == pytest.approx(bigram_oracle("hola mundo cruel", "Hola, mundo cruel!", "word"))
    assert grapheme_distance(m1, m2, GraphemeAlgorithm.LEVENSHTEIN) == 0.0


def test_length_pruning_never_skips_a_close_pair(rng):
    for _ in range(2000):
        a, b = _random_text(rng, 1, 120), _random_text(rng, 1, 120)
        tau = float(rng.uniform(0.05, 0.6))
        if prune_by_length(len(a), len(b), tau):
            assert dist_levenshtein(a, b) > tau


def test_parse_algorithms_keeps_order():
    assert parse_algorithms("gz, lv,bg_l") == [GraphemeAlgorithm.GZIP, GraphemeAlgorithm.LEVENSHTEIN, GraphemeAlgorithm.BIGRAM_LETTER]
    with pytest.raises(ValueError):
        parse_algorithms("lv,soundex")
