from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd

from duplication.corpus.models import Corpus, Message
from duplication.corpus.processing import normalize
from duplication.modalities.semantic.processing import EmbeddingStore

T0 = pd.Timestamp("2021-06-01T12:00:00Z")


def message(message_id: str, account: str, text: str, lang: str = "es", is_retweet: bool | None = None) -> Message:
    return normalize(Message(message_id, account, T0, text, lang, is_retweet=is_retweet))


def corpus_of(*messages: Message) -> Corpus:
    return Corpus(messages=tuple(messages))


def one_hot_store(assignments: dict[str, int], dim: int = 8) -> EmbeddingStore:
    """Message id -> one-hot vector at the given index (same index = same meaning)."""
    vectors = {mid: np.eye(dim)[index] for mid, index in assignments.items()}
    return EmbeddingStore.from_vectors(vectors, "test")


def write_lines(path: Path, records: list) -> Path:
    lines = [r if isinstance(r, str) else json.dumps(r, ensure_ascii=False) for r in records]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def random_corpus(rng: np.random.Generator, n: int, accounts: int = 25, alphabet: str = "abcdefghij") -> tuple[Corpus, EmbeddingStore]:
    """Messages of varied length drawn from a few templates, with clustered embeddings."""
    templates = ["".join(rng.choice(list(alphabet), size=int(rng.integers(30, 90)))) for _ in range(8)]
    messages, vectors = [], {}
    for i in range(n):
        t = int(rng.integers(len(templates)))
        text = list(templates[t])
        for _ in range(int(rng.integers(0, len(text) // 2))):
            text[int(rng.integers(len(text)))] = alphabet[int(rng.integers(len(alphabet)))]
        if rng.random() < 0.3:
            text = text[: int(rng.integers(30, len(text) + 1))]
        mid = f"m{i:04d}"
        messages.append(message(mid, f"u{int(rng.integers(accounts)):02d}", "".join(text), ["es", "en"][int(rng.integers(2))]))
        vectors[mid] = np.eye(16)[t % 16] + 0.15 * rng.standard_normal(16)
    return Corpus(messages=tuple(messages)), EmbeddingStore.from_vectors(vectors, "random")
