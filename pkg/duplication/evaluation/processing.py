from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from sklearn.metrics import auc as trapezoid_auc
from sklearn.metrics import precision_recall_fscore_support

from duplication.config import BOOTSTRAP_CHUNK, BOOTSTRAP_RESAMPLES, CI_LEVEL, DEFAULT_SEED
from duplication.corpus.models import PairKey
from duplication.errors import SingleClassError, UnmatchedPairError

logger = logging.getLogger(__name__)

CLASS_ORDER = ("no_match", "copy_pasta", "rewording", "translation")


#################### ROC ####################

@dataclass(frozen=True)
class RocCurve:
    """Threshold sweep in ascending order; a pair is positive when distance < threshold."""

    thresholds: np.ndarray
    tpr: np.ndarray
    fpr: np.ndarray
    auc: float
    positives: int
    negatives: int

    def points(self) -> pd.DataFrame:
        return pd.DataFrame({"threshold": self.thresholds, "tpr": self.tpr, "fpr": self.fpr})

    def to_record(self) -> dict:
        return {
            "auc": self.auc,
            "positives": self.positives,
            "negatives": self.negatives,
            "points": [
                {"threshold": float(t), "tpr": float(p), "fpr": float(f)}
                for t, p, f in zip(self.thresholds, self.tpr, self.fpr)
            ],
        }


def _split_scores(scores: Iterable[tuple[float, bool]]) -> tuple[np.ndarray, np.ndarray]:
    pairs = list(scores)
    distances = np.array([float(d) for d, _ in pairs], dtype=np.float64)
    positive = np.array([bool(p) for _, p in pairs], dtype=bool)
    if distances.size and not np.all(np.isfinite(distances)):
        raise ValueError("ROC scores must be finite")
    if positive.all() or not positive.any():
        raise SingleClassError(
            f"ROC needs both classes, got {int(positive.sum())} positives and {int((~positive).sum())} negatives"
        )
    return distances, positive


def _sweep_thresholds(distances: np.ndarray, resolution: int | None) -> np.ndarray:
    """Midpoints between unique scores plus both ends, or a uniform grid over the same span."""
    unique = np.unique(distances)
    top = np.nextafter(unique[-1], np.inf)
    if resolution is not None:
        if resolution < 2:
            raise ValueError("ROC resolution needs at least 2 points")
        return np.linspace(unique[0], top, resolution)
    return np.concatenate([[unique[0]], (unique[:-1] + unique[1:]) / 2.0, [top]])


def rates_at(distances: np.ndarray, positive: np.ndarray, thresholds: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """TPR and FPR for each threshold (strict `<`)."""
    pos = np.sort(distances[positive])
    neg = np.sort(distances[~positive])
    tpr = np.searchsorted(pos, thresholds, side="left") / pos.size
    fpr = np.searchsorted(neg, thresholds, side="left") / neg.size
    return tpr, fpr


def roc(scores: Iterable[tuple[float, bool]], resolution: int | None = None) -> RocCurve:
    """ROC curve of distance scores.

    Parameters
    ----------
    scores: Iterable[tuple[float, bool]]
        (distance, is_positive) per pair.
    resolution: int | None
        Uniform grid size; by default the exact sweep over unique scores.

    Returns
    -------
    RocCurve
        AUC by trapezoid rule over (fpr, tpr).
    """
    distances, positive = _split_scores(scores)
    thresholds = _sweep_thresholds(distances, resolution)
    tpr, fpr = rates_at(distances, positive, thresholds)
    area = float(trapezoid_auc(fpr, tpr))
    return RocCurve(thresholds, tpr, fpr, area, int(positive.sum()), int((~positive).sum()))


def rank_auc(pos: np.ndarray, neg: np.ndarray) -> float:
    """AUC as P(pos < neg) + P(tie)/2; equals the trapezoid area of the exact sweep."""
    neg_sorted = np.sort(neg)
    below = np.searchsorted(neg_sorted, pos, side="left")
    at_or_below = np.searchsorted(neg_sorted, pos, side="right")
    greater = neg.size - at_or_below
    ties = at_or_below - below
    return float((greater.sum() + 0.5 * ties.sum()) / (pos.size * neg.size))


def youden_j(tp: int, fn: int, tn: int, fp: int) -> float:
    """TP/(TP+FN) + TN/(TN+FP) - 1."""
    return tp / (tp + fn) + tn / (tn + fp) - 1.0


def youden_optimal(curve: RocCurve) -> tuple[float, float]:
    """(threshold, J) maximizing J = TPR - FPR; the smallest threshold wins ties."""
    j = curve.tpr - curve.fpr
    best = int(np.argmax(j))
    return float(curve.thresholds[best]), float(j[best])


#################### Binary counts ####################

@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def tpr(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def fpr(self) -> float:
        return self.fp / (self.fp + self.tn) if self.fp + self.tn else 0.0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tpr

    @property
    def j(self) -> float:
        return youden_j(self.tp, self.fn, self.tn, self.fp)


def binary_counts(distances: Sequence[float], positive: Sequence[bool], threshold: float) -> ConfusionCounts:
    d = np.asarray(distances, dtype=np.float64)
    y = np.asarray(positive, dtype=bool)
    predicted = d < threshold
    return ConfusionCounts(
        tp=int(np.sum(predicted & y)),
        fp=int(np.sum(predicted & ~y)),
        tn=int(np.sum(~predicted & ~y)),
        fn=int(np.sum(~predicted & y)),
    )


#################### Bootstrap ####################

def _chunk_sizes(n_resamples: int) -> list[int]:
    full, rest = divmod(n_resamples, BOOTSTRAP_CHUNK)
    return [BOOTSTRAP_CHUNK] * full + ([rest] if rest else [])


def _resample_chunk(
    data: np.ndarray,
    size: int,
    seed_seq: np.random.SeedSequence,
    statistic: Callable[[np.ndarray], float | np.ndarray] | None,
) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    idx = rng.integers(0, data.size, size=(size, data.size))
    if statistic is None:
        return data[idx].mean(axis=1)
    return np.concatenate([np.ravel(statistic(data[row])) for row in idx])


def _percentile_interval(stats: np.ndarray, level: float) -> tuple[float, float]:
    tail = (1.0 - level) / 2.0 * 100.0
    lo, hi = np.percentile(stats, [tail, 100.0 - tail])
    return float(lo), float(hi)


def bootstrap_ci(
    samples: Sequence[float],
    n_resamples: int = BOOTSTRAP_RESAMPLES,
    level: float = CI_LEVEL,
    statistic: Callable[[np.ndarray], float | np.ndarray] | None = None,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> tuple[float, float]:
    """Percentile bootstrap interval of `statistic` (mean by default).

    Resamples are drawn in fixed-size chunks, each with its own stream spawned
    from `seed`, so the interval does not depend on `workers`.
    """
    data = np.asarray(samples, dtype=np.float64).ravel()
    if data.size == 0:
        raise ValueError("bootstrap_ci needs at least one sample")
    if n_resamples < 1 or not 0.0 < level < 1.0:
        raise ValueError(f"invalid bootstrap parameters n_resamples={n_resamples}, level={level}")
    sizes = _chunk_sizes(n_resamples)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = (delayed(_resample_chunk)(data, size, stream, statistic) for size, stream in zip(sizes, streams))
    if workers > 1:
        chunks = Parallel(n_jobs=workers, prefer="threads")(jobs)
    else:
        chunks = [fn(*args, **kwargs) for fn, args, kwargs in jobs]
    return _percentile_interval(np.concatenate(chunks), level)


def bootstrap_stratified(
    positives: np.ndarray,
    negatives: np.ndarray,
    statistic: Callable[[np.ndarray, np.ndarray], float],
    n_resamples: int = BOOTSTRAP_RESAMPLES,
    level: float = CI_LEVEL,
    seed: int = DEFAULT_SEED,
) -> tuple[float, float]:
    """Percentile interval of a two-sample statistic, resampling each class separately."""
    positives = np.asarray(positives, dtype=np.float64)
    negatives = np.asarray(negatives, dtype=np.float64)
    if positives.size == 0 or negatives.size == 0:
        raise SingleClassError("stratified bootstrap needs both classes")
    stats = []
    sizes = _chunk_sizes(n_resamples)
    for size, stream in zip(sizes, np.random.SeedSequence(seed).spawn(len(sizes))):
        rng = np.random.default_rng(stream)
        for _ in range(size):
            p = positives[rng.integers(0, positives.size, positives.size)]
            n = negatives[rng.integers(0, negatives.size, negatives.size)]
            stats.append(statistic(p, n))
    return _percentile_interval(np.asarray(stats, dtype=np.float64), level)


def bootstrap_rates(
    scores: Iterable[tuple[float, bool]],
    threshold: float,
    n_resamples: int = BOOTSTRAP_RESAMPLES,
    level: float = CI_LEVEL,
    seed: int = DEFAULT_SEED,
) -> dict[str, dict[str, float]]:
    """TPR and FPR at `threshold` with bootstrap intervals (the ROC error bars)."""
    distances, positive = _split_scores(scores)
    hits_pos = (distances[positive] < threshold).astype(np.float64)
    hits_neg = (distances[~positive] < threshold).astype(np.float64)
    tpr_lo, tpr_hi = bootstrap_ci(hits_pos, n_resamples, level, seed=seed)
    fpr_lo, fpr_hi = bootstrap_ci(hits_neg, n_resamples, level, seed=seed + 1)
    return {
        "tpr": {"value": float(hits_pos.mean()), "lo": tpr_lo, "hi": tpr_hi},
        "fpr": {"value": float(hits_neg.mean()), "lo": fpr_lo, "hi": fpr_hi},
    }


#################### Multiclass confusion ####################

@dataclass(frozen=True)
class MulticlassConfusion:
    """4x4 counts (rows truth, columns prediction) and per-class scores."""

    matrix: pd.DataFrame
    per_class: pd.DataFrame
    micro: dict[str, float]
    macro: dict[str, float]

    @property
    def total(self) -> int:
        return int(self.matrix.to_numpy().sum())

    def to_record(self) -> dict:
        return {
            "classes": list(self.matrix.index),
            "matrix": self.matrix.to_numpy().tolist(),
            "per_class": self.per_class.to_dict(orient="records"),
            "micro": self.micro,
            "macro": self.macro,
        }


def confusion(predicted: Iterable[tuple[PairKey, str]], truth: Iterable[tuple[PairKey, str]]) -> MulticlassConfusion:
    """Compare predicted labels with ground truth per pair.

    Parameters
    ----------
    predicted: Iterable[tuple[PairKey, str]]
        (pair, predicted label value).
    truth: Iterable[tuple[PairKey, str]]
        (pair, true label value) with "control" already mapped to "no_match".

    Returns
    -------
    MulticlassConfusion
        `accuracy` per class is the diagonal share of its truth row.
    """
    truth_by_pair = dict(truth)
    predicted = list(predicted)
    unmatched = [f"{p.first_id}|{p.second_id}" for p, _ in predicted if p not in truth_by_pair]
    if unmatched:
        raise UnmatchedPairError(unmatched, "verdicts without a labeled pair")
    y_true = [truth_by_pair[p] for p, _ in predicted]
    y_pred = [label for _, label in predicted]

    matrix = pd.crosstab(
        pd.Categorical(y_true, categories=CLASS_ORDER),
        pd.Categorical(y_pred, categories=CLASS_ORDER),
        dropna=False,
    ).reindex(index=list(CLASS_ORDER), columns=list(CLASS_ORDER), fill_value=0)
    matrix.index.name, matrix.columns.name = "truth", "predicted"

    precision, recall, _, support = precision_recall_fscore_support(
        y_true, y_pred, labels=list(CLASS_ORDER), zero_division=0
    )
    counts = matrix.to_numpy()
    rows = counts.sum(axis=1)
    accuracy = np.divide(np.diag(counts), rows, out=np.zeros(len(CLASS_ORDER)), where=rows > 0)
    per_class = pd.DataFrame(
        {
            "class": list(CLASS_ORDER),
            "support": support.astype(int),
            "accuracy": accuracy,
            "precision": precision,
            "recall": recall,
        }
    )
    averages = {}
    for average in ("micro", "macro"):
        p, r, _, _ = precision_recall_fscore_support(
            y_true, y_pred, labels=list(CLASS_ORDER), average=average, zero_division=0
        )
        averages[average] = {"precision": float(p), "recall": float(r)}
    logger.info("[EVAL] confusion over %d pairs, micro recall %.3f", len(y_true), averages["micro"]["recall"])
    return MulticlassConfusion(matrix, per_class, averages["micro"], averages["macro"])


__all__ = [
    "CLASS_ORDER",
    "RocCurve",
    "roc",
    "rates_at",
    "rank_auc",
    "youden_j",
    "youden_optimal",
    "ConfusionCounts",
    "binary_counts",
    "bootstrap_ci",
    "bootstrap_stratified",
    "bootstrap_rates",
    "MulticlassConfusion",
    "confusion",
]
