"""Deterministic scripted fixtures: seed messages with copy-pasta, rewording and translation variants."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from duplication.config import DEFAULT_SEED
from duplication.corpus.models import Corpus, Message, Provenance
from duplication.corpus.processing import grapheme_text, normalize, semantic_text
from duplication.data_access.corpus_files import write_corpus
from duplication.data_access.embedding_files import save_embeddings
from duplication.data_access.files import output_path
from duplication.evaluation.labeled_pairs import LabeledPair, Truth, write_labeled_pairs
from duplication.modalities.grapheme.processing import dist_levenshtein
from duplication.modalities.semantic.processing import EmbeddingStore

logger = logging.getLogger(__name__)

SOURCE_CONSONANTS = "bdfgklmnprst"
TARGET_CONSONANTS = "chjvwz"
VOWELS = "aeiou"
# characters that never occur in generated words, so each substitution costs exactly one edit
REPLACEMENT_ALPHABET = "0123456789qxy"
EMOJI = ("🔥", "🙏", "👇", "✅", "💪")
PUNCTUATION = ("!", "!!", "...", "?", ",")
EMBEDDING_DIM = 64
EPOCH = pd.Timestamp("2021-01-01T00:00:00Z")
MIN_SEED_LETTERS = 60


@dataclass(frozen=True)
class SyntheticFixture:
    pairs: list[LabeledPair]
    store: EmbeddingStore
    corpus: Corpus


def _word(rng: np.random.Generator, consonants: str) -> str:
    syllables = int(rng.integers(2, 4))
    return "".join(consonants[rng.integers(len(consonants))] + VOWELS[rng.integers(len(VOWELS))] for _ in range(syllables))


def _vocabulary(rng: np.random.Generator, size: int, consonants: str, exclude: set[str] = frozenset()) -> list[str]:
    words: dict[str, None] = {}
    while len(words) < size:
        word = _word(rng, consonants)
        if word not in exclude:
            words[word] = None
    return list(words)


def _sentence(rng: np.random.Generator, vocabulary: list[str]) -> list[str]:
    words: list[str] = []
    while sum(map(len, words)) < MIN_SEED_LETTERS:
        words.append(vocabulary[rng.integers(len(vocabulary))])
    return words


def scripted_edit(text: str, fraction: float, rng: np.random.Generator, alphabet: str = REPLACEMENT_ALPHABET) -> str:
    """Substitute round(fraction * len(text)) distinct positions with characters absent from `text`.

    On grapheme-form text (no spaces or punctuation) the normalized Levenshtein
    distance to the original is exactly k / len(text).
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"edit fraction {fraction} outside [0, 1]")
    fresh = [ch for ch in alphabet if ch not in text]
    if not fresh:
        raise ValueError("no replacement character absent from the text")
    k = int(round(fraction * len(text)))
    chars = list(text)
    for position in rng.choice(len(chars), size=k, replace=False):
        chars[position] = fresh[rng.integers(len(fresh))]
    return "".join(chars)


#################### Variant scripts ####################

def _grapheme_gap(a: str, b: str) -> float:
    return float(dist_levenshtein(grapheme_text(semantic_text(a)), grapheme_text(semantic_text(b))))


def _copy_pasta(rng: np.random.Generator, words: list[str], vocabulary: list[str], max_edit: float) -> str:
    """Hashtag append, emoji/punctuation churn and a single-word swap, within `max_edit`."""
    seed_text = " ".join(words)
    for _ in range(20):
        out = list(words)
        ops = [op for op in ("hashtag", "churn", "swap") if rng.random() < 0.6] or ["churn"]
        if "swap" in ops:
            out[rng.integers(len(out))] = vocabulary[rng.integers(len(vocabulary))]
        if "churn" in ops:
            for _ in range(int(rng.integers(1, 4))):
                mark = (EMOJI + PUNCTUATION)[rng.integers(len(EMOJI) + len(PUNCTUATION))]
                out.insert(int(rng.integers(len(out) + 1)), mark)
        if "hashtag" in ops:
            out.append("#" + vocabulary[rng.integers(len(vocabulary))].capitalize())
        text = " ".join(out)
        if _grapheme_gap(seed_text, text) <= max_edit:
            return text
    return seed_text + " " + EMOJI[rng.integers(len(EMOJI))]


def _rewording(rng: np.random.Generator, words: list[str], synonyms: dict[str, str]) -> str:
    """Word-order shuffle plus synonym substitution of about half the words."""
    shuffled = [words[i] for i in rng.permutation(len(words))]
    return " ".join(synonyms[w] if rng.random() < 0.5 else w for w in shuffled)


def _translation(words: list[str], dictionary: dict[str, str]) -> str:
    return " ".join(dictionary[w] for w in words)


def generate_synthetic(
    n_seeds: int = 100,
    variants: int = 10,
    n_controls: int = 1000,
    seed: int = DEFAULT_SEED,
    *,
    max_edit: float = 0.15,
    source_lang: str = "es",
    target_lang: str = "en",
) -> SyntheticFixture:
    """Build labeled pairs, embeddings and a corpus from scripted perturbations.

    Each seed gets `variants` copy-pastas, rewordings and translations, all
    paired with the seed. Rewordings and translations share the seed's
    embedding; control pairs are two unrelated sentences with independent
    random embeddings (nearly orthogonal in EMBEDDING_DIM dimensions).
    Variants are posted from accounts other than the seed's.
    """
    rng = np.random.default_rng(seed)
    vocabulary = _vocabulary(rng, 400, SOURCE_CONSONANTS)
    synonym_words = _vocabulary(rng, len(vocabulary), SOURCE_CONSONANTS, exclude=set(vocabulary))
    synonyms = dict(zip(vocabulary, synonym_words))
    synonyms.update(zip(synonym_words, vocabulary))
    target_words = _vocabulary(rng, 2 * len(vocabulary), TARGET_CONSONANTS)
    dictionary = dict(zip(vocabulary + synonym_words, target_words))
    pool = max(40, 3 * variants + 1)

    messages: list[Message] = []
    vectors: dict[str, np.ndarray] = {}
    pairs: list[LabeledPair] = []

    def _message(message_id: str, account: str, text: str, lang: str) -> Message:
        msg = normalize(
            Message(
                id=message_id,
                account_id=account,
                created_at=EPOCH + pd.Timedelta(minutes=len(messages)),
                raw_text=text,
                language=lang,
            )
        )
        messages.append(msg)
        return msg

    for i in range(n_seeds):
        words = _sentence(rng, vocabulary)
        base = _message(f"s{i:03d}", f"acct{i % pool:02d}", " ".join(words), source_lang)
        vector = rng.standard_normal(EMBEDDING_DIM)
        vectors[base.id] = vector
        scripts = (
            (Truth.COPY_PASTA, lambda: (_copy_pasta(rng, words, vocabulary, max_edit), source_lang)),
            (Truth.REWORDING, lambda: (_rewording(rng, words, synonyms), source_lang)),
            (Truth.TRANSLATION, lambda: (_translation(words, dictionary), target_lang)),
        )
        k = 0
        for truth, script in scripts:
            for v in range(variants):
                text, lang = script()
                account = f"acct{(i + 1 + k) % pool:02d}"
                variant = _message(f"s{i:03d}_{truth.value}_{v:02d}", account, text, lang)
                vectors[variant.id] = vector
                pairs.append(LabeledPair(base, variant, truth))
                k += 1

    for c in range(n_controls):
        first = _message(f"c{c:04d}a", f"ctrl{c:04d}a", " ".join(_sentence(rng, vocabulary)), source_lang)
        second = _message(f"c{c:04d}b", f"ctrl{c:04d}b", " ".join(_sentence(rng, vocabulary)), source_lang)
        vectors[first.id] = rng.standard_normal(EMBEDDING_DIM)
        vectors[second.id] = rng.standard_normal(EMBEDDING_DIM)
        pairs.append(LabeledPair(first, second, Truth.CONTROL))

    provenance = Provenance(
        source="synthetic",
        format="generated",
        parameters=tuple(sorted({"seed": seed, "n_seeds": n_seeds, "variants": variants, "n_controls": n_controls}.items())),
    )
    corpus = Corpus(messages=tuple(messages), provenance=provenance)
    store = EmbeddingStore.from_vectors(vectors, "synthetic")
    logger.info("[EVAL] synthetic fixture: %d messages, %d labeled pairs", len(messages), len(pairs))
    return SyntheticFixture(pairs=pairs, store=store, corpus=corpus)


def threshold_fixture(
    n_per_class: int = 500,
    seed: int = DEFAULT_SEED,
    *,
    length: int = 100,
    copy_range: tuple[float, float] = (0.05, 0.25),
    rewording_range: tuple[float, float] = (0.40, 0.90),
) -> list[LabeledPair]:
    """Copy-pasta and rewording pairs with Levenshtein distances drawn from the given ranges."""
    rng = np.random.default_rng(seed)
    letters = SOURCE_CONSONANTS + VOWELS
    pairs = []
    for truth, (low, high) in ((Truth.COPY_PASTA, copy_range), (Truth.REWORDING, rewording_range)):
        for n in range(n_per_class):
            base = "".join(letters[rng.integers(len(letters))] for _ in range(length))
            edited = scripted_edit(base, float(rng.uniform(low, high)), rng)
            prefix = f"{truth.value}{n:04d}"
            pairs.append(
                LabeledPair(
                    normalize(Message(f"{prefix}a", f"{prefix}a", EPOCH, base)),
                    normalize(Message(f"{prefix}b", f"{prefix}b", EPOCH, edited)),
                    truth,
                )
            )
    return pairs


def write_synthetic(fixture: SyntheticFixture, output_dir: str | Path) -> dict[str, Path]:
    """Write labeled_pairs.jsonl, embeddings.jsonl and corpus.jsonl into `output_dir`."""
    paths = {
        "labeled_pairs": output_path(output_dir, "labeled_pairs.jsonl"),
        "embeddings": output_path(output_dir, "embeddings.jsonl"),
        "corpus": output_path(output_dir, "corpus.jsonl"),
    }
    write_labeled_pairs(fixture.pairs, paths["labeled_pairs"])
    save_embeddings(fixture.store, paths["embeddings"], "jsonl")
    write_corpus(fixture.corpus, paths["corpus"])
    return paths


__all__ = [
    "REPLACEMENT_ALPHABET",
    "EMBEDDING_DIM",
    "SyntheticFixture",
    "scripted_edit",
    "generate_synthetic",
    "threshold_fixture",
    "write_synthetic",
]
