"""Global inference cascade: grapheme, then semantic, then language distance per pair."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Callable, Iterable, Iterator, Mapping, Sequence

from joblib import Parallel, delayed

from duplication.config import (
    DEFAULT_GRAPHEME_ALGORITHM,
    DEFAULT_TAU_L,
    DEFAULT_TAU_P,
    DEFAULT_TAU_S,
    THRESHOLD_PRESETS,
)
from duplication.corpus.models import Corpus, Message, PairKey
from duplication.corpus.processing import canonical_order, iter_pair_indices, row_partitions
from duplication.errors import ConfigError
from duplication.modalities.grapheme.processing import (
    GraphemeAlgorithm,
    STRING_DISTANCES,
    grapheme_input,
    prune_by_length,
)
from duplication.modalities.language.processing import dist_language
from duplication.modalities.semantic.processing import EmbeddingStore, EmbeddingVector, dist_semantic

if TYPE_CHECKING:
    from duplication.evaluation.labeled_pairs import LabeledPair

logger = logging.getLogger(__name__)


class Label(str, Enum):
    COPY_PASTA = "copy_pasta"
    REWORDING = "rewording"
    TRANSLATION = "translation"
    NO_MATCH = "no_match"


MATCH_LABELS = (Label.COPY_PASTA, Label.REWORDING, Label.TRANSLATION)


def _check_open_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise ConfigError(f"{name} must lie strictly inside (0, 1), got {value}")
    return value


@dataclass(frozen=True)
class Thresholds:
    """Cascade thresholds; every value lies strictly inside (0, 1).

    `tau_p_by_language` replaces `tau_p` for pairs whose two messages share
    that language tag (scripts where a character carries more than a letter).
    """

    tau_p: float = DEFAULT_TAU_P
    tau_s: float = DEFAULT_TAU_S
    tau_l: float = DEFAULT_TAU_L
    grapheme_algorithm: GraphemeAlgorithm = GraphemeAlgorithm(DEFAULT_GRAPHEME_ALGORITHM)
    tau_p_by_language: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau_p", _check_open_unit("tau_p", self.tau_p))
        object.__setattr__(self, "tau_s", _check_open_unit("tau_s", self.tau_s))
        object.__setattr__(self, "tau_l", _check_open_unit("tau_l", self.tau_l))
        try:
            object.__setattr__(self, "grapheme_algorithm", GraphemeAlgorithm(self.grapheme_algorithm))
        except ValueError as exc:
            raise ConfigError(f"unknown grapheme algorithm {self.grapheme_algorithm!r}") from exc
        overrides = {
            str(lang): _check_open_unit(f"tau_p_by_language[{lang}]", value)
            for lang, value in dict(self.tau_p_by_language).items()
        }
        object.__setattr__(self, "tau_p_by_language", dict(sorted(overrides.items())))

    @classmethod
    def preset(cls, name: str, **overrides) -> Thresholds:
        if name not in THRESHOLD_PRESETS:
            raise ConfigError(f"unknown threshold preset {name!r}; expected one of {sorted(THRESHOLD_PRESETS)}")
        values = dict(THRESHOLD_PRESETS[name])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def tau_p_for(self, lang1: str, lang2: str) -> float:
        if lang1 == lang2 and lang1 in self.tau_p_by_language:
            return self.tau_p_by_language[lang1]
        return self.tau_p

    def as_dict(self) -> dict:
        values = asdict(self)
        values["grapheme_algorithm"] = self.grapheme_algorithm.value
        values["tau_p_by_language"] = dict(self.tau_p_by_language)
        return values


@dataclass(frozen=True)
class PairVerdict:
    """Label of one pair plus the distances computed on the way (None = not computed)."""

    pair: PairKey
    label: Label
    d_grapheme: float | None = None
    d_semantic: float | None = None
    d_language: float | None = None

    @property
    def is_match(self) -> bool:
        return self.label is not Label.NO_MATCH

    def to_record(self) -> dict:
        def _num(value: float | None) -> float | None:
            return None if value is None else float(value)

        return {
            "a": self.pair.first_id,
            "b": self.pair.second_id,
            "label": self.label.value,
            "d_grapheme": _num(self.d_grapheme),
            "d_semantic": _num(self.d_semantic),
            "d_language": _num(self.d_language),
        }

    @classmethod
    def from_record(cls, record: Mapping) -> PairVerdict:
        def _num(value) -> float | None:
            return None if value is None else float(value)

        return cls(
            pair=PairKey.of(str(record["a"]), str(record["b"])),
            label=Label(record["label"]),
            d_grapheme=_num(record.get("d_grapheme")),
            d_semantic=_num(record.get("d_semantic")),
            d_language=_num(record.get("d_language")),
        )


#################### Cascade ####################

def label_from_distances(d_grapheme: float, d_semantic: float, d_language: float, t: Thresholds, tau_p: float | None = None) -> Label:
    """Label for a fully computed distance triple (eager form of the cascade)."""
    tau_p = t.tau_p if tau_p is None else tau_p
    if d_grapheme < tau_p:
        return Label.COPY_PASTA
    if d_semantic < t.tau_s:
        return Label.REWORDING if d_language < t.tau_l else Label.TRANSLATION
    return Label.NO_MATCH


def cascade(
    grapheme: Callable[[], float] | None,
    semantic: Callable[[], float],
    language: Callable[[], float],
    t: Thresholds,
    tau_p: float,
    *,
    require_semantic_for_copypasta: bool = False,
) -> tuple[Label, float | None, float | None, float | None]:
    """Lazy cascade; a None `grapheme` means the pair is already known to be >= tau_p.

    Returns (label, d_grapheme, d_semantic, d_language) with skipped distances as None.
    """
    d_g = grapheme() if grapheme is not None else None
    if d_g is not None and d_g < tau_p:
        if not require_semantic_for_copypasta:
            return Label.COPY_PASTA, d_g, None, None
        d_s = semantic()
        return (Label.COPY_PASTA if d_s < t.tau_s else Label.NO_MATCH), d_g, d_s, None
    d_s = semantic()
    if d_s >= t.tau_s:
        return Label.NO_MATCH, d_g, d_s, None
    d_l = language()
    return (Label.REWORDING if d_l < t.tau_l else Label.TRANSLATION), d_g, d_s, d_l


def _grapheme_kernel(x1: Message, x2: Message, algorithm: GraphemeAlgorithm) -> Callable[[], float]:
    kernel = STRING_DISTANCES[algorithm]
    return lambda: kernel(grapheme_input(x1, algorithm), grapheme_input(x2, algorithm))


def _verdict(
    x1: Message,
    e1: EmbeddingVector,
    x2: Message,
    e2: EmbeddingVector,
    t: Thresholds,
    *,
    prune: bool,
    require_semantic_for_copypasta: bool,
) -> PairVerdict:
    algorithm = t.grapheme_algorithm
    tau_p = t.tau_p_for(x1.language, x2.language)
    grapheme = _grapheme_kernel(x1, x2, algorithm)
    pruned = (
        prune
        and algorithm is GraphemeAlgorithm.LEVENSHTEIN
        and prune_by_length(len(x1.grapheme_text), len(x2.grapheme_text), tau_p)
    )
    label, d_g, d_s, d_l = cascade(
        None if pruned else grapheme,
        lambda: dist_semantic(e1, e2),
        lambda: dist_language(x1.language, x2.language),
        t,
        tau_p,
        require_semantic_for_copypasta=require_semantic_for_copypasta,
    )
    if d_g is None and label is not Label.NO_MATCH:
        # matches carry the same record with or without pruning
        d_g = grapheme()
    return PairVerdict(PairKey.of(x1.id, x2.id), label, d_g, d_s, d_l)


def classify_pair(
    x1: Message,
    e1: EmbeddingVector,
    x2: Message,
    e2: EmbeddingVector,
    t: Thresholds,
    *,
    require_semantic_for_copypasta: bool = False,
) -> PairVerdict:
    """Classify one pair with the literal cascade (strict `<` at every threshold).

    Parameters
    ----------
    x1, x2: Message
        Normalized messages with language tags.
    e1, e2: EmbeddingVector
        Embeddings of `x1` and `x2`.
    t: Thresholds
        Cascade thresholds and grapheme algorithm.
    require_semantic_for_copypasta: bool
        Also demand d_semantic < tau_s before accepting a Copy-Pasta verdict.

    Returns
    -------
    PairVerdict
        Distances skipped by the short-circuit are None.
    """
    return _verdict(x1, e1, x2, e2, t, prune=False, require_semantic_for_copypasta=require_semantic_for_copypasta)


def boundary_semantics(t: Thresholds) -> dict[str, str]:
    """Human-readable statement of the comparison rules, echoed into run reports."""
    return {
        "comparison": "strict <; a distance equal to a threshold falls to the next branch",
        "copy_pasta": f"d_grapheme < {t.tau_p} ({t.grapheme_algorithm.value})",
        "rewording": f"d_grapheme >= {t.tau_p} and d_semantic < {t.tau_s} and d_language < {t.tau_l}",
        "translation": f"d_grapheme >= {t.tau_p} and d_semantic < {t.tau_s} and d_language >= {t.tau_l}",
        "no_match": f"d_grapheme >= {t.tau_p} and d_semantic >= {t.tau_s}",
    }


#################### Corpus-wide classification ####################

def _classify_rows(
    ordered: list[Message],
    vectors: Sequence[EmbeddingVector],
    rows: range,
    t: Thresholds,
    emit_nomatch: bool,
    prune: bool,
    require_semantic_for_copypasta: bool,
) -> list[PairVerdict]:
    out: list[PairVerdict] = []
    for i, j in iter_pair_indices(ordered, rows):
        verdict = _verdict(
            ordered[i], vectors[i], ordered[j], vectors[j], t,
            prune=prune, require_semantic_for_copypasta=require_semantic_for_copypasta,
        )
        if emit_nomatch or verdict.is_match:
            out.append(verdict)
    return out


def classify_corpus(
    corpus: Corpus,
    store: EmbeddingStore,
    t: Thresholds,
    *,
    workers: int = 1,
    emit_nomatch: bool = False,
    prune: bool = True,
    require_semantic_for_copypasta: bool = False,
) -> Iterator[PairVerdict]:
    """Stream verdicts for every cross-account pair, in PairKey order.

    Missing embeddings are reported before any pair is evaluated. NoMatch
    verdicts are dropped unless `emit_nomatch`. Rows of the pair triangle are
    split into contiguous blocks across `workers`; blocks are yielded in order,
    so the stream is identical for any worker count.
    """
    store.require(corpus.ids)
    ordered = canonical_order(corpus)
    vectors = [store[m.id] for m in ordered]
    blocks = row_partitions(len(ordered), workers * 4 if workers > 1 else 1)
    logger.info(
        "[CLASSIFY] %d messages, %d row blocks, %d workers, algorithm=%s",
        len(ordered), len(blocks), workers, t.grapheme_algorithm.value,
    )
    args = (t, emit_nomatch, prune, require_semantic_for_copypasta)
    return _stream(ordered, vectors, blocks, args, workers)


def _stream(
    ordered: list[Message],
    vectors: list[EmbeddingVector],
    blocks: list[range],
    args: tuple,
    workers: int,
) -> Iterator[PairVerdict]:
    if workers <= 1:
        for rows in blocks:
            yield from _classify_rows(ordered, vectors, rows, *args)
        return

    results = Parallel(n_jobs=workers, return_as="generator")(
        delayed(_classify_rows)(ordered, vectors, rows, *args) for rows in blocks
    )
    for chunk in results:
        yield from chunk


def classify_labeled_pairs(
    pairs: Iterable[LabeledPair],
    store: EmbeddingStore,
    t: Thresholds,
    *,
    require_semantic_for_copypasta: bool = False,
) -> list[PairVerdict]:
    """Run the cascade on fixture pairs (no cross-account restriction)."""
    pairs = list(pairs)
    store.require({m.id for p in pairs for m in (p.first, p.second)})
    return [
        classify_pair(
            p.first, store[p.first.id], p.second, store[p.second.id], t,
            require_semantic_for_copypasta=require_semantic_for_copypasta,
        )
        for p in pairs
    ]


def label_counts(verdicts: Iterable[PairVerdict]) -> dict[str, int]:
    counts = {label.value: 0 for label in Label}
    for verdict in verdicts:
        counts[verdict.label.value] += 1
    return counts


__all__ = [
    "Label",
    "MATCH_LABELS",
    "Thresholds",
    "PairVerdict",
    "label_from_distances",
    "cascade",
    "classify_pair",
    "boundary_semantics",
    "classify_corpus",
    "classify_labeled_pairs",
    "label_counts",
]
