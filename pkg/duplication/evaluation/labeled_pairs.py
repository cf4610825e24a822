"""Labeled message pairs: loading, 3-distance tables and threshold calibration."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import pandas as pd
from sklearn.metrics import precision_score, recall_score

from duplication.config import BOOTSTRAP_RESAMPLES, CI_LEVEL, DEFAULT_SEED, MIN_LETTERS
from duplication.corpus.models import Message, PairKey
from duplication.corpus.processing import normalize
from duplication.data_access.files import iter_jsonl, write_jsonl
from duplication.errors import InsufficientBigramsError, RecordError, UnknownLabelError
from duplication.evaluation.processing import (
    RocCurve,
    binary_counts,
    bootstrap_stratified,
    rank_auc,
    roc,
    youden_optimal,
)
from duplication.modalities.grapheme.processing import GraphemeAlgorithm, grapheme_distance
from duplication.modalities.language.processing import dist_language, normalize_language_tag
from duplication.modalities.semantic.processing import EmbeddingStore, dist_semantic
from duplication.services.classifier import Label

logger = logging.getLogger(__name__)

EPOCH = pd.Timestamp(0, tz="UTC")


class Truth(str, Enum):
    CONTROL = "control"
    COPY_PASTA = "copy_pasta"
    REWORDING = "rewording"
    TRANSLATION = "translation"

    @property
    def label(self) -> Label:
        return Label.NO_MATCH if self is Truth.CONTROL else Label(self.value)


@dataclass(frozen=True)
class LabeledPair:
    first: Message
    second: Message
    truth: Truth

    def __post_init__(self) -> None:
        if self.first.id == self.second.id:
            raise ValueError(f"labeled pair of identical ids {self.first.id!r}")

    @property
    def key(self) -> PairKey:
        return PairKey.of(self.first.id, self.second.id)


def _side(record: dict, suffix: str, line: int) -> Message:
    message_id = str(record.get(f"id_{suffix}") or f"{line}{suffix}")
    return normalize(
        Message(
            id=message_id,
            account_id=str(record.get(f"account_{suffix}") or message_id),
            created_at=EPOCH,
            raw_text=str(record[f"text_{suffix}"]),
            language=normalize_language_tag(record.get(f"lang_{suffix}")),
        )
    )


def load_labeled_pairs(path: str | Path, *, length_filter: bool = False, min_letters: int = MIN_LETTERS) -> list[LabeledPair]:
    """Read labeled pairs from JSONL and normalize both messages.

    Each line holds text_a, text_b, lang_a, lang_b and truth (control,
    copy_pasta, rewording, translation); id_a/id_b and account_a/account_b are
    optional. With `length_filter`, pairs with a side under `min_letters`
    grapheme characters are dropped.
    """
    pairs: list[LabeledPair] = []
    for line_no, line in iter_jsonl(path):
        try:
            record = json.loads(line)
            raw_truth = record["truth"]
            first, second = _side(record, "a", line_no), _side(record, "b", line_no)
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise RecordError(line_no, f"bad labeled pair ({exc})") from exc
        try:
            truth = Truth(raw_truth)
        except ValueError as exc:
            raise UnknownLabelError(f"line {line_no}: unknown truth label {raw_truth!r}") from exc
        if length_filter and min(len(first.grapheme_text), len(second.grapheme_text)) < min_letters:
            continue
        pairs.append(LabeledPair(first, second, truth))

    if not pairs:
        logger.warning("[EVAL] no labeled pairs in %s", path)
    else:
        counts = pd.Series([p.truth.value for p in pairs]).value_counts().sort_index()
        logger.info("[EVAL] %d labeled pairs from %s: %s", len(pairs), path, counts.to_dict())
    return pairs


def load_inline_embeddings(path: str | Path, provider_name: str = "inline") -> EmbeddingStore:
    """Vectors given as embedding_a / embedding_b on labeled-pair lines, keyed by message id."""
    vectors = {}
    for line_no, line in iter_jsonl(path):
        record = json.loads(line)
        for suffix in ("a", "b"):
            values = record.get(f"embedding_{suffix}")
            if values is not None:
                vectors[str(record.get(f"id_{suffix}") or f"{line_no}{suffix}")] = values
    return EmbeddingStore.from_vectors(vectors, provider_name)


def write_labeled_pairs(pairs: Iterable[LabeledPair], path: str | Path, store: EmbeddingStore | None = None) -> int:
    def _record(pair: LabeledPair) -> dict:
        record = {"truth": pair.truth.value}
        for suffix, msg in (("a", pair.first), ("b", pair.second)):
            record.update(
                {
                    f"id_{suffix}": msg.id,
                    f"account_{suffix}": msg.account_id,
                    f"text_{suffix}": msg.raw_text,
                    f"lang_{suffix}": msg.language,
                }
            )
            if store is not None and msg.id in store:
                record[f"embedding_{suffix}"] = store[msg.id].values.tolist()
        return record

    return write_jsonl((_record(p) for p in pairs), path)


#################### Distance tables ####################

def pair_distances(
    pairs: Sequence[LabeledPair],
    store: EmbeddingStore | None,
    algorithms: Sequence[GraphemeAlgorithm],
) -> pd.DataFrame:
    """One row per pair: a, b, truth, one column per grapheme algorithm, d_semantic, d_language.

    Pairs too short for a bigram algorithm get NaN in that column. Without a
    store, d_semantic is NaN.
    """
    if store is not None:
        store.require({m.id for p in pairs for m in (p.first, p.second)})
    records = []
    skipped = {alg.value: 0 for alg in algorithms}
    for pair in pairs:
        row = {"a": pair.key.first_id, "b": pair.key.second_id, "truth": pair.truth.value}
        for alg in algorithms:
            try:
                row[alg.value] = float(grapheme_distance(pair.first, pair.second, alg))
            except InsufficientBigramsError:
                row[alg.value] = np.nan
                skipped[alg.value] += 1
        row["d_semantic"] = (
            dist_semantic(store[pair.first.id], store[pair.second.id]) if store is not None else np.nan
        )
        row["d_language"] = dist_language(pair.first.language, pair.second.language)
        records.append(row)
    for alg, count in skipped.items():
        if count:
            logger.warning("[EVAL] %s undefined for %d pairs (fewer than 2 tokens)", alg, count)
    columns = ["a", "b", "truth", *[alg.value for alg in algorithms], "d_semantic", "d_language"]
    return pd.DataFrame.from_records(records, columns=columns)


def _scores(table: pd.DataFrame, column: str, positive: Iterable[str], negative: Iterable[str]) -> tuple[np.ndarray, np.ndarray]:
    subset = table[table["truth"].isin([*positive, *negative]) & table[column].notna()]
    is_pos = subset["truth"].isin(list(positive)).to_numpy()
    return subset[column].to_numpy(dtype=np.float64), is_pos


def _curve_summary(
    distances: np.ndarray,
    is_pos: np.ndarray,
    n_resamples: int,
    level: float,
    seed: int,
    resolution: int | None = None,
) -> tuple[RocCurve, dict]:
    curve = roc(zip(distances, is_pos), resolution)
    threshold, j = youden_optimal(curve)
    pos, neg = distances[is_pos], distances[~is_pos]

    def _precision(p: np.ndarray, n: np.ndarray) -> float:
        tp, fp = np.sum(p < threshold), np.sum(n < threshold)
        return float(tp / (tp + fp)) if tp + fp else 0.0

    def _recall(p: np.ndarray, n: np.ndarray) -> float:
        return float(np.mean(p < threshold))

    def _j(p: np.ndarray, n: np.ndarray) -> float:
        return float(np.mean(p < threshold) - np.mean(n < threshold))

    counts = binary_counts(distances, is_pos, threshold)
    summary = {"auc": curve.auc, "threshold": threshold, "j": j, "precision": counts.precision, "recall": counts.recall}
    for name, statistic in (("auc", rank_auc), ("j", _j), ("precision", _precision), ("recall", _recall)):
        lo, hi = bootstrap_stratified(pos, neg, statistic, n_resamples, level, seed)
        summary[f"{name}_lo"], summary[f"{name}_hi"] = lo, hi
    summary.update({"positives": int(pos.size), "negatives": int(neg.size)})
    return curve, summary


def compare_grapheme_algorithms(
    table: pd.DataFrame,
    algorithms: Sequence[GraphemeAlgorithm],
    *,
    positive: Sequence[str] = (Truth.COPY_PASTA.value,),
    negative: Sequence[str] = (Truth.REWORDING.value,),
    n_resamples: int = BOOTSTRAP_RESAMPLES,
    level: float = CI_LEVEL,
    seed: int = DEFAULT_SEED,
    resolution: int | None = None,
) -> tuple[pd.DataFrame, dict[str, RocCurve]]:
    """Per algorithm: AUC, Youden threshold, J, precision and recall, each with a bootstrap interval.

    Copy-Pasta pairs are the positives and Rewording pairs the negatives by default.
    An algorithm without defined distances on both sides gets `defined = False`,
    NaN metrics and no curve.
    """
    rows, curves = [], {}
    for alg in algorithms:
        distances, is_pos = _scores(table, alg.value, positive, negative)
        n_pos, n_neg = int(is_pos.sum()), int((~is_pos).sum())
        if n_pos == 0 or n_neg == 0:
            logger.warning("[EVAL] %s skipped: defined for %d positive and %d negative pairs", alg.value, n_pos, n_neg)
            rows.append({"algorithm": alg.value, "defined": False, "positives": n_pos, "negatives": n_neg})
            continue
        curve, summary = _curve_summary(distances, is_pos, n_resamples, level, seed, resolution)
        curves[alg.value] = curve
        rows.append({"algorithm": alg.value, "defined": True, **summary})
        logger.info("[EVAL] %s: AUC %.3f, threshold %.3f, J %.3f", alg.value, curve.auc, summary["threshold"], summary["j"])
    return pd.DataFrame.from_records(rows), curves


def calibrate_semantic(
    table: pd.DataFrame,
    *,
    n_resamples: int = BOOTSTRAP_RESAMPLES,
    level: float = CI_LEVEL,
    seed: int = DEFAULT_SEED,
    resolution: int | None = None,
) -> tuple[dict, RocCurve]:
    """Semantic threshold from same-meaning pairs (positives) against control pairs.

    Micro precision/recall pool every pair; macro averages the scores of each
    same-meaning class taken against the controls.
    """
    matching = [Truth.COPY_PASTA.value, Truth.REWORDING.value, Truth.TRANSLATION.value]
    distances, is_pos = _scores(table, "d_semantic", matching, [Truth.CONTROL.value])
    curve, summary = _curve_summary(distances, is_pos, n_resamples, level, seed, resolution)
    threshold = summary["threshold"]

    micro = {
        "precision": float(precision_score(is_pos, distances < threshold, zero_division=0)),
        "recall": float(recall_score(is_pos, distances < threshold, zero_division=0)),
    }
    per_class = {}
    for cls in matching:
        d, y = _scores(table, "d_semantic", [cls], [Truth.CONTROL.value])
        if y.any():
            per_class[cls] = {
                "precision": float(precision_score(y, d < threshold, zero_division=0)),
                "recall": float(recall_score(y, d < threshold, zero_division=0)),
            }
    macro = {
        metric: float(np.mean([scores[metric] for scores in per_class.values()])) if per_class else 0.0
        for metric in ("precision", "recall")
    }
    summary.update({"micro": micro, "macro": macro, "per_class": per_class})
    logger.info("[EVAL] semantic threshold %.3f (J %.3f, AUC %.3f)", threshold, summary["j"], curve.auc)
    return summary, curve


__all__ = [
    "Truth",
    "LabeledPair",
    "load_labeled_pairs",
    "load_inline_embeddings",
    "write_labeled_pairs",
    "pair_distances",
    "compare_grapheme_algorithms",
    "calibrate_semantic",
]
