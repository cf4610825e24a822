from __future__ import annotations

import gzip
from collections import Counter
from difflib import SequenceMatcher
from enum import Enum
from functools import lru_cache
from typing import TYPE_CHECKING, Callable

import Levenshtein

from duplication.config import GZIP_LEVEL
from duplication.errors import InsufficientBigramsError

if TYPE_CHECKING:
    from duplication.corpus.models import Message


class GraphemeAlgorithm(str, Enum):
    LEVENSHTEIN = "lv"
    RATCLIFF_OBERSHELP = "ro"
    GZIP = "gz"
    BIGRAM_WORD = "bg_w"
    BIGRAM_LETTER = "bg_l"


class GraphemeDistance(float):
    """A float in [0, 1] tagged with the algorithm that produced it."""

    algorithm: GraphemeAlgorithm

    def __new__(cls, value: float, algorithm: GraphemeAlgorithm) -> GraphemeDistance:
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"grapheme distance {value} outside [0, 1]")
        obj = super().__new__(cls, value)
        obj.algorithm = algorithm
        return obj

    def __reduce__(self):
        return (GraphemeDistance, (float(self), self.algorithm))


#################### Edit distances ####################

def dist_levenshtein(x1: str, x2: str) -> GraphemeDistance:
    """Levenshtein distance (unit insert/delete/substitute) over the longer length."""
    longest = max(len(x1), len(x2))
    if longest == 0:
        return GraphemeDistance(0.0, GraphemeAlgorithm.LEVENSHTEIN)
    return GraphemeDistance(Levenshtein.distance(x1, x2) / longest, GraphemeAlgorithm.LEVENSHTEIN)


def _matched_characters(a: str, b: str) -> int:
    # autojunk off: the popularity heuristic would drop characters from long strings
    matcher = SequenceMatcher(None, a, b, autojunk=False)
    return sum(block.size for block in matcher.get_matching_blocks())


def dist_ratcliff_obershelp(x1: str, x2: str) -> GraphemeDistance:
    """1 - 2M/(len1+len2), M = matched characters, maximized over both argument orders."""
    total = len(x1) + len(x2)
    if total == 0:
        return GraphemeDistance(0.0, GraphemeAlgorithm.RATCLIFF_OBERSHELP)
    matched = max(_matched_characters(x1, x2), _matched_characters(x2, x1))
    return GraphemeDistance(1.0 - 2.0 * matched / total, GraphemeAlgorithm.RATCLIFF_OBERSHELP)


#################### Compression distance ####################

@lru_cache(maxsize=1 << 16)
def compressed_size(text: str) -> int:
    """gzip length in bytes at GZIP_LEVEL with mtime=0.

    Every length includes the same 18-byte gzip container, so dist_gzip(s, s)
    stays below 0.25 on short repetitive texts whose raw DEFLATE stream is only
    a few bytes long.
    """
    return len(gzip.compress(text.encode("utf-8"), compresslevel=GZIP_LEVEL, mtime=0))


def dist_gzip(x1: str, x2: str) -> GraphemeDistance:
    """Normalized compression distance, concatenated in lexicographic order, clamped to [0, 1]."""
    if x1 == "" and x2 == "":
        return GraphemeDistance(0.0, GraphemeAlgorithm.GZIP)
    first, second = (x1, x2) if x1 <= x2 else (x2, x1)
    c1, c2 = compressed_size(first), compressed_size(second)
    joint = compressed_size(first + second)
    ncd = (joint - min(c1, c2)) / max(c1, c2)
    return GraphemeDistance(min(1.0, max(0.0, ncd)), GraphemeAlgorithm.GZIP)


#################### Bigram distances ####################

def _bigrams(text: str, unit: str) -> Counter:
    if unit == "word":
        tokens: list[str] = text.split()
    elif unit == "letter":
        tokens = list(text)
    else:
        raise ValueError(f"unknown bigram unit {unit!r}; expected 'word' or 'letter'")
    if len(tokens) < 2:
        raise InsufficientBigramsError(f"{unit} bigrams need at least 2 {unit}s, got {len(tokens)} in {text!r}")
    return Counter(zip(tokens, tokens[1:]))


def dist_bigram(x1: str, x2: str, unit: str) -> GraphemeDistance:
    """Sum of absolute tally differences over the summed tallies of the bigram union."""
    bg1, bg2 = _bigrams(x1, unit), _bigrams(x2, unit)
    union = bg1.keys() | bg2.keys()
    diff = sum(abs(bg1[b] - bg2[b]) for b in union)
    total = sum(bg1.values()) + sum(bg2.values())
    algorithm = GraphemeAlgorithm.BIGRAM_WORD if unit == "word" else GraphemeAlgorithm.BIGRAM_LETTER
    return GraphemeDistance(diff / total, algorithm)


#################### Pruning & dispatch ####################

def prune_by_length(len1: int, len2: int, tau_p: float) -> bool:
    """True when the length gap alone puts the normalized Levenshtein distance above tau_p.

    Uses lv(x1, x2) >= |len1 - len2|, so a pair with distance <= tau_p is never skipped.
    """
    longest = max(len1, len2)
    if longest == 0:
        return False
    return abs(len1 - len2) / longest > tau_p


STRING_DISTANCES: dict[GraphemeAlgorithm, Callable[[str, str], GraphemeDistance]] = {
    GraphemeAlgorithm.LEVENSHTEIN: dist_levenshtein,
    GraphemeAlgorithm.RATCLIFF_OBERSHELP: dist_ratcliff_obershelp,
    GraphemeAlgorithm.GZIP: dist_gzip,
    GraphemeAlgorithm.BIGRAM_WORD: lambda a, b: dist_bigram(a, b, "word"),
    GraphemeAlgorithm.BIGRAM_LETTER: lambda a, b: dist_bigram(a, b, "letter"),
}


def grapheme_input(msg: Message, algorithm: GraphemeAlgorithm) -> str:
    """Word bigrams need the spaces of `semantic_text`; everything else uses `grapheme_text`."""
    return msg.semantic_text if algorithm is GraphemeAlgorithm.BIGRAM_WORD else msg.grapheme_text


def grapheme_distance(m1: Message, m2: Message, algorithm: GraphemeAlgorithm | str) -> GraphemeDistance:
    algorithm = GraphemeAlgorithm(algorithm)
    return STRING_DISTANCES[algorithm](grapheme_input(m1, algorithm), grapheme_input(m2, algorithm))


def parse_algorithms(value: str | list[str]) -> list[GraphemeAlgorithm]:
    """Parse "lv,ro,gz" (or a list of tags) into algorithms, keeping order."""
    tags = value.split(",") if isinstance(value, str) else list(value)
    return [GraphemeAlgorithm(tag.strip()) for tag in tags if tag.strip()]


__all__ = [
    "GraphemeAlgorithm",
    "GraphemeDistance",
    "dist_levenshtein",
    "dist_ratcliff_obershelp",
    "compressed_size",
    "dist_gzip",
    "dist_bigram",
    "prune_by_length",
    "STRING_DISTANCES",
    "grapheme_input",
    "grapheme_distance",
    "parse_algorithms",
]
