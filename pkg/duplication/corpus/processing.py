from __future__ import annotations

import logging
import unicodedata
from collections import Counter
from dataclasses import replace
from typing import Iterable, Iterator

import pandas as pd
import regex

from duplication.config import MIN_LETTERS, RETWEET_PREFIX, SHORTENER_HOSTS
from duplication.corpus.models import Corpus, Message, PairKey
from duplication.modalities.language.processing import label_languages

logger = logging.getLogger(__name__)

# Scheme-prefixed links, bare domain/path tokens such as "t.co/xyz", and bare shortener hosts.
URL_PATTERN = regex.compile(
    r"https?://\S+"
    r"|(?<![\w@.])(?:[\w-]+\.)+[a-z]{2,6}/\S*"
    r"|(?<![\w@.])(?:" + "|".join(regex.escape(host) for host in SHORTENER_HOSTS) + r")(?![\w/-]|\.\w)",
    regex.IGNORECASE,
)
MENTION_PATTERN = regex.compile(r"(?<!\w)@\w+")
WHITESPACE_PATTERN = regex.compile(r"\s+")
NON_GRAPHEME_PATTERN = regex.compile(r"[^\p{L}\p{N}]+")

STAGE_WHOLE = "whole"
STAGE_RETWEETS = "after_retweet_filter"
STAGE_LENGTH = "after_length_filter"


#################### Normalization ####################

def semantic_text(raw_text: str) -> str:
    """Strip links and @mentions, keep hashtags, collapse whitespace."""
    text = unicodedata.normalize("NFC", raw_text)
    text = URL_PATTERN.sub(" ", text)
    text = MENTION_PATTERN.sub(" ", text)
    return WHITESPACE_PATTERN.sub(" ", text).strip()


def grapheme_text(semantic: str) -> str:
    """NFKC-fold, lowercase and keep only letters and digits (drops emoji, punctuation, marks, spaces).

    NFKC maps styled letters such as mathematical bold capitals to their plain forms first.
    """
    return NON_GRAPHEME_PATTERN.sub("", unicodedata.normalize("NFKC", semantic).lower())


def normalize(msg: Message) -> Message:
    """Return the message with `semantic_text` and `grapheme_text` derived from `raw_text`.

    Both fields are recomputed from `raw_text`, which makes the operation
    idempotent. Empty outputs are allowed; `filter_short` removes them.
    """
    semantic = semantic_text(msg.raw_text)
    return replace(msg, semantic_text=semantic, grapheme_text=grapheme_text(semantic))


def normalize_corpus(corpus: Corpus) -> Corpus:
    messages = tuple(normalize(m) for m in corpus.messages)
    return corpus.derive(messages, corpus.provenance.with_parameter("normalized", True))


#################### Filters ####################

def is_retweet(msg: Message) -> bool:
    if msg.is_retweet is not None:
        return bool(msg.is_retweet)
    return msg.raw_text.lstrip().startswith(RETWEET_PREFIX)


def filter_retweets(corpus: Corpus) -> Corpus:
    kept = tuple(m for m in corpus.messages if not is_retweet(m))
    removed = len(corpus) - len(kept)
    logger.info("[CORPUS] retweet filter removed %d of %d messages", removed, len(corpus))
    stage = corpus.derive(kept).stage(STAGE_RETWEETS)
    return corpus.derive(kept, corpus.provenance.with_stage(stage))


def filter_short(corpus: Corpus, min_letters: int = MIN_LETTERS) -> Corpus:
    """Keep messages whose `grapheme_text` holds at least `min_letters` characters."""
    kept = tuple(m for m in corpus.messages if len(m.grapheme_text) >= min_letters)
    removed = len(corpus) - len(kept)
    logger.info("[CORPUS] length filter (min_letters=%d) removed %d of %d messages", min_letters, removed, len(corpus))
    provenance = corpus.provenance.with_parameter("min_letters", min_letters).with_parameter("length_removed", removed)
    stage = corpus.derive(kept).stage(STAGE_LENGTH)
    return corpus.derive(kept, provenance.with_stage(stage))


def preprocess(corpus: Corpus, min_letters: int = MIN_LETTERS) -> Corpus:
    """Run the full preprocessing chain and record one stage per step.

    Steps: provided language tags, normalization, retweet deletion and
    length cleaning. The returned provenance carries the staging rows
    `whole`, `after_retweet_filter` and `after_length_filter`.
    """
    staged = corpus.derive(corpus.messages, corpus.provenance.with_stage(corpus.stage(STAGE_WHOLE)))
    labeled = label_languages(staged, source="provided")
    normalized = normalize_corpus(labeled)
    return filter_short(filter_retweets(normalized), min_letters=min_letters)


def stage_table(corpus: Corpus) -> pd.DataFrame:
    """Return provenance stages as a table with `stage`, `users`, `messages` columns."""
    records = [{"stage": s.name, "users": s.users, "messages": s.messages} for s in corpus.provenance.stages]
    return pd.DataFrame.from_records(records, columns=["stage", "users", "messages"])


def stage_report(corpus: Corpus) -> dict[str, dict[str, int]]:
    return {s.name: {"users": s.users, "messages": s.messages} for s in corpus.provenance.stages}


#################### Pair universe ####################

def canonical_order(corpus: Corpus) -> list[Message]:
    """Messages sorted by id; pair rows are indexed into this list."""
    return sorted(corpus.messages, key=lambda m: m.id)


def iter_pair_indices(ordered: list[Message], rows: Iterable[int] | None = None) -> Iterator[tuple[int, int]]:
    """Yield (i, j), i < j, for every cross-account pair whose first index is in `rows`."""
    accounts = [m.account_id for m in ordered]
    n = len(ordered)
    for i in rows if rows is not None else range(n):
        account = accounts[i]
        for j in range(i + 1, n):
            if accounts[j] != account:
                yield i, j


def generate_pairs(corpus: Corpus) -> Iterator[PairKey]:
    """Yield every unordered cross-account pair once, in PairKey order."""
    ordered = canonical_order(corpus)
    for i, j in iter_pair_indices(ordered):
        yield PairKey(ordered[i].id, ordered[j].id)


def expected_pair_count(corpus: Corpus) -> int:
    """C(n,2) minus the same-account pairs."""
    n = len(corpus)
    per_account = Counter(m.account_id for m in corpus.messages)
    return n * (n - 1) // 2 - sum(k * (k - 1) // 2 for k in per_account.values())


def row_partitions(n: int, parts: int) -> list[range]:
    """Split first-index rows into contiguous blocks of roughly equal pair work."""
    if n == 0:
        return []
    parts = max(1, min(parts, n))
    total = n * (n - 1) / 2
    bounds = [0]
    acc = 0.0
    for i in range(n):
        acc += n - 1 - i
        if acc >= total * len(bounds) / parts and len(bounds) < parts:
            bounds.append(i + 1)
    bounds.append(n)
    return [range(a, b) for a, b in zip(bounds, bounds[1:]) if b > a]


__all__ = [
    "semantic_text",
    "grapheme_text",
    "normalize",
    "normalize_corpus",
    "is_retweet",
    "filter_retweets",
    "filter_short",
    "preprocess",
    "stage_table",
    "stage_report",
    "canonical_order",
    "iter_pair_indices",
    "generate_pairs",
    "expected_pair_count",
    "row_partitions",
]
