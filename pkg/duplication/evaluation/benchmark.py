"""Single-worker wall-time benchmark of the grapheme kernels over all cross-account pairs."""
from __future__ import annotations

import logging
import time
from typing import Sequence

import pandas as pd

from duplication.corpus.models import Corpus
from duplication.corpus.processing import canonical_order, iter_pair_indices
from duplication.errors import InsufficientBigramsError
from duplication.modalities.grapheme.processing import (
    STRING_DISTANCES,
    GraphemeAlgorithm,
    compressed_size,
    grapheme_input,
)

logger = logging.getLogger(__name__)


def _time_algorithm(inputs: list[str], pairs: list[tuple[int, int]], algorithm: GraphemeAlgorithm) -> tuple[float, int]:
    kernel = STRING_DISTANCES[algorithm]
    compressed_size.cache_clear()
    undefined = 0
    start = time.perf_counter()
    for i, j in pairs:
        try:
            kernel(inputs[i], inputs[j])
        except InsufficientBigramsError:
            undefined += 1
    return time.perf_counter() - start, undefined


def bench_grapheme(corpus: Corpus, algorithms: Sequence[GraphemeAlgorithm]) -> pd.DataFrame:
    """Time each algorithm on one worker over every cross-account pair.

    Parameters
    ----------
    corpus: Corpus
        Normalized corpus with at least 2 messages.
    algorithms: Sequence[GraphemeAlgorithm]
        Kernels to time, in report order.

    Returns
    -------
    pd.DataFrame
        One row per algorithm: algorithm, pairs, seconds, per_pair_us, undefined
        (pairs a bigram kernel cannot score).
    """
    if len(corpus) < 2:
        raise ValueError("benchmark needs at least 2 messages")
    ordered = canonical_order(corpus)
    pairs = list(iter_pair_indices(ordered))
    rows = []
    for algorithm in algorithms:
        inputs = [grapheme_input(m, algorithm) for m in ordered]
        seconds, undefined = _time_algorithm(inputs, pairs, algorithm)
        per_pair = seconds / len(pairs) * 1e6 if pairs else 0.0
        logger.info("[BENCH] %s: %d pairs in %.2fs (%.2f us/pair)", algorithm.value, len(pairs), seconds, per_pair)
        rows.append(
            {
                "algorithm": algorithm.value,
                "pairs": len(pairs),
                "seconds": seconds,
                "per_pair_us": per_pair,
                "undefined": undefined,
            }
        )
    return pd.DataFrame.from_records(rows, columns=["algorithm", "pairs", "seconds", "per_pair_us", "undefined"])


def bench_report(table: pd.DataFrame) -> dict[str, dict]:
    """Benchmark table as a JSON-ready mapping keyed by algorithm tag."""
    return {row.pop("algorithm"): row for row in table.to_dict(orient="records")}


__all__ = ["bench_grapheme", "bench_report"]
