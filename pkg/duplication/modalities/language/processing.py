from __future__ import annotations

import logging
from dataclasses import replace
from typing import TYPE_CHECKING

import regex

from duplication.config import LANGUAGE_ID_BATCH_SIZE, LANGUAGE_ID_CONCURRENCY, UNDETERMINED_LANGUAGE
from duplication.modalities.language.identification import LanguageIdentifier, identify_all

if TYPE_CHECKING:
    from duplication.corpus.models import Corpus

logger = logging.getLogger(__name__)

PRIMARY_SUBTAG = regex.compile(r"^[a-z]{2,8}$")
LANGUAGE_SOURCES = ("provided", "external-tool")


def normalize_language_tag(raw: object) -> str:
    """Return the lowercase BCP-47 primary subtag, or "und" when absent or unusable.

    "ES" -> "es", "pt-BR" -> "pt", None / "" / "??" -> "und".
    """
    if raw is None:
        return UNDETERMINED_LANGUAGE
    text = str(raw).strip().lower().replace("_", "-")
    primary = text.split("-", 1)[0]
    if not PRIMARY_SUBTAG.match(primary):
        return UNDETERMINED_LANGUAGE
    return primary


def dist_language(l1: str, l2: str) -> float:
    """0.0 for equal concrete tags, 1.0 otherwise ("und" matches nothing, itself included)."""
    if l1 == l2 and l1 != UNDETERMINED_LANGUAGE:
        return 0.0
    return 1.0


def label_languages(
    corpus: Corpus,
    source: str = "provided",
    identifier: LanguageIdentifier | None = None,
    *,
    batch_size: int = LANGUAGE_ID_BATCH_SIZE,
    concurrency: int = LANGUAGE_ID_CONCURRENCY,
) -> Corpus:
    """Give every message a normalized language tag.

    Parameters
    ----------
    corpus: Corpus
        Ingested (or preprocessed) corpus.
    source: str
        `provided` keeps the platform tags read at ingestion; `external-tool`
        asks `identifier` for a tag per message.
    identifier: LanguageIdentifier | None
        Required for `external-tool`. Failed batches fall back to "und".

    Returns
    -------
    Corpus
        Same messages and order, tags normalized; the "und" share is stored in
        the provenance parameters as `und_share`.
    """
    if source not in LANGUAGE_SOURCES:
        raise ValueError(f"unknown language source {source!r}; expected one of {LANGUAGE_SOURCES}")

    if source == "provided":
        tags = {m.id: normalize_language_tag(m.language) for m in corpus.messages}
    else:
        if identifier is None:
            raise ValueError("external-tool language labeling needs an identifier")
        texts = [(m.id, m.semantic_text or m.raw_text) for m in corpus.messages]
        detected, failed = identify_all(identifier, texts, batch_size=batch_size, concurrency=concurrency)
        if failed:
            logger.warning("[LANGUAGE] identification failed for %d messages, tagged und", failed)
        tags = {mid: normalize_language_tag(detected.get(mid)) for mid, _ in texts}

    messages = tuple(replace(m, language=tags[m.id]) for m in corpus.messages)
    untagged = sum(1 for m in messages if m.language == UNDETERMINED_LANGUAGE)
    share = untagged / len(messages) if messages else 0.0
    if untagged:
        logger.warning("[LANGUAGE] %d untagged", untagged)
    logger.info("[LANGUAGE] und share %.3f over %d messages (source=%s)", share, len(messages), source)

    provenance = corpus.provenance.with_parameter("language_source", source).with_parameter("und_share", share)
    return corpus.derive(messages, provenance)


__all__ = ["normalize_language_tag", "dist_language", "label_languages", "LANGUAGE_SOURCES"]
