from __future__ import annotations

import logging
from collections import Counter
from typing import Iterable, Iterator

from duplication.commands.artifacts import require
from duplication.corpus.processing import expected_pair_count
from duplication.data_access.corpus_files import read_corpus
from duplication.data_access.embedding_files import load_embeddings
from duplication.data_access.files import write_json
from duplication.data_access.verdict_files import write_verdicts
from duplication.run_config import RunConfig
from duplication.services.classifier import Label, PairVerdict, boundary_semantics, classify_corpus

logger = logging.getLogger(__name__)


def _counted(verdicts: Iterable[PairVerdict], counts: Counter) -> Iterator[PairVerdict]:
    for verdict in verdicts:
        counts[verdict.label.value] += 1
        yield verdict


def cmd_classify(config: RunConfig) -> dict:
    """Classify all cross-account pairs of a corpus into verdicts.jsonl."""
    require(config, "corpus", "embeddings")
    corpus = read_corpus(config.corpus)
    store = load_embeddings(config.embeddings)
    thresholds = config.thresholds()
    verdicts = classify_corpus(
        corpus,
        store,
        thresholds,
        workers=config.workers,
        emit_nomatch=config.emit_nomatch,
        prune=config.prune,
        require_semantic_for_copypasta=config.require_semantic_for_copypasta,
    )
    counts: Counter = Counter()
    emitted = write_verdicts(_counted(verdicts, counts), config.output("verdicts.jsonl"))
    report = {
        "messages": len(corpus),
        "pairs_evaluated": expected_pair_count(corpus),
        "verdicts_written": emitted,
        "labels": {label.value: counts.get(label.value, 0) for label in Label},
        "thresholds": thresholds.as_dict(),
        "boundary_semantics": boundary_semantics(thresholds),
        "embedding_provider": store.provider.name,
    }
    write_json(report, config.output("classify_report.json"))
    logger.info("[CLI] %d pairs evaluated, %d verdicts written", report["pairs_evaluated"], emitted)
    return report


__all__ = ["cmd_classify"]
