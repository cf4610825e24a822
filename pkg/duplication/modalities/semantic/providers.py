"""Embedding providers: precomputed files, fixtures, and a generic HTTP service."""
from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Protocol, Sequence

import numpy as np
import requests
from joblib import Parallel, delayed

from duplication.config import (
    EMBEDDING_BACKOFF_SECONDS,
    EMBEDDING_BATCH_SIZE,
    EMBEDDING_CONCURRENCY,
    EMBEDDING_MAX_RETRIES,
    EMBEDDING_TIMEOUT_SECONDS,
    EMBEDDING_TOKEN_ENV,
    RETRYABLE_STATUS,
)
from duplication.data_access.embedding_files import load_embeddings, save_embeddings
from duplication.errors import EmbeddingError, EmbeddingServiceError, MissingEmbeddingsError
from duplication.modalities.semantic.processing import EmbeddingStore, EmbeddingVector

logger = logging.getLogger(__name__)


class EmbeddingProvider(Protocol):
    name: str

    def embed(self, texts: Sequence[tuple[str, str]]) -> EmbeddingStore:
        """Return one vector per (id, semantic_text)."""
        ...


class FileEmbeddingProvider:
    """Vectors precomputed outside the engine, looked up by message id."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self.name = f"file:{self.path.name}"

    def embed(self, texts: Sequence[tuple[str, str]]) -> EmbeddingStore:
        store = load_embeddings(self.path, self.name)
        store.require(mid for mid, _ in texts)
        wanted = {mid for mid, _ in texts}
        return EmbeddingStore.from_vectors({mid: store[mid] for mid in wanted}, self.name)


class FixtureEmbeddingProvider:
    """Deterministic provider: each text maps to a fixture-specified vector."""

    def __init__(self, vectors_by_text: Mapping[str, Sequence[float]], name: str = "fixture") -> None:
        self.vectors_by_text = {text: EmbeddingVector(np.asarray(v, dtype=np.float64)) for text, v in vectors_by_text.items()}
        self.name = name

    def embed(self, texts: Sequence[tuple[str, str]]) -> EmbeddingStore:
        unknown = [mid for mid, text in texts if text not in self.vectors_by_text]
        if unknown:
            raise MissingEmbeddingsError(unknown, "fixture has no vector for these texts")
        return EmbeddingStore.from_vectors({mid: self.vectors_by_text[text] for mid, text in texts}, self.name)


#################### HTTP service ####################

@dataclass(frozen=True)
class EmbeddingEndpoint:
    url: str
    model: str
    token_env: str = EMBEDDING_TOKEN_ENV
    batch_size: int = EMBEDDING_BATCH_SIZE
    max_retries: int = EMBEDDING_MAX_RETRIES
    backoff_seconds: float = EMBEDDING_BACKOFF_SECONDS
    concurrency: int = EMBEDDING_CONCURRENCY
    timeout: float = EMBEDDING_TIMEOUT_SECONDS

    def headers(self) -> dict[str, str]:
        token = os.environ.get(self.token_env)
        return {"Authorization": f"Bearer {token}"} if token else {}


class _NonRetryable(Exception):
    pass


def _post_batch(
    session: requests.Session,
    endpoint: EmbeddingEndpoint,
    batch: Sequence[tuple[str, str]],
    sleep: Callable[[float], None],
) -> list[list[float]]:
    """POST one batch, retrying transient failures with exponential backoff."""
    payload = {"input": [text for _, text in batch], "model": endpoint.model}
    last_error = "no attempt made"
    for attempt in range(endpoint.max_retries + 1):
        if attempt:
            delay = endpoint.backoff_seconds * 2 ** (attempt - 1)
            logger.info("[SEMANTIC] retry %d/%d in %.1fs (%s)", attempt, endpoint.max_retries, delay, last_error)
            sleep(delay)
        try:
            response = session.post(endpoint.url, json=payload, headers=endpoint.headers(), timeout=endpoint.timeout)
        except (requests.ConnectionError, requests.Timeout) as exc:
            last_error = f"{type(exc).__name__}: {exc}"
            continue
        if response.status_code in RETRYABLE_STATUS:
            last_error = f"HTTP {response.status_code}"
            continue
        if response.status_code >= 400:
            raise _NonRetryable(f"HTTP {response.status_code}")
        try:
            data = [item["embedding"] for item in response.json()["data"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise _NonRetryable(f"malformed response: {exc}") from exc
        if len(data) != len(batch):
            raise _NonRetryable(f"expected {len(batch)} embeddings, got {len(data)}")
        return data
    raise _NonRetryable(f"gave up after {endpoint.max_retries + 1} attempts ({last_error})")


def _run_batch(
    session_factory: Callable[[], requests.Session],
    endpoint: EmbeddingEndpoint,
    batch: Sequence[tuple[str, str]],
    sleep: Callable[[float], None],
) -> tuple[Sequence[tuple[str, str]], list[list[float]] | None, str]:
    # one session per batch; sessions are not shared between worker threads
    session = session_factory()
    try:
        return batch, _post_batch(session, endpoint, batch, sleep), ""
    except _NonRetryable as exc:
        return batch, None, str(exc)
    finally:
        session.close()


def fetch_embeddings(
    texts: Sequence[tuple[str, str]],
    endpoint: EmbeddingEndpoint,
    *,
    cache_path: str | Path | None = None,
    session_factory: Callable[[], requests.Session] | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> EmbeddingStore:
    """Embed (id, semantic_text) pairs through the HTTP service.

    Ids already present in the on-disk cache are never requested again. New
    vectors are committed to the cache only when every batch succeeded; on
    failure `EmbeddingServiceError` lists every id left without a vector.
    """
    if endpoint.batch_size < 1:
        raise EmbeddingError("batch size must be at least 1")
    cached = None
    if cache_path is not None and Path(cache_path).exists():
        cached = load_embeddings(cache_path, f"http:{endpoint.model}")
    pending = [(mid, text) for mid, text in texts if cached is None or mid not in cached]
    logger.info("[SEMANTIC] %d cache hits, %d texts to embed", len(texts) - len(pending), len(pending))

    fetched: dict[str, list[float]] = {}
    if pending:
        session_factory = session_factory or requests.Session
        batches = [pending[i : i + endpoint.batch_size] for i in range(0, len(pending), endpoint.batch_size)]
        results = Parallel(n_jobs=max(1, endpoint.concurrency), backend="threading")(
            delayed(_run_batch)(session_factory, endpoint, batch, sleep) for batch in batches
        )
        errors = [error for _, vectors, error in results if vectors is None]
        if errors:
            raise EmbeddingServiceError(
                [mid for mid, _ in pending],
                f"{len(errors)} of {len(batches)} batches failed, first: {errors[0]}",
            )
        for batch, vectors, _ in results:
            fetched.update({mid: vec for (mid, _), vec in zip(batch, vectors)})

    store = EmbeddingStore.from_vectors(fetched, f"http:{endpoint.model}")
    if cached is not None:
        store = cached.merged(store)
    if cache_path is not None and fetched:
        save_embeddings(store, cache_path)
    wanted = {mid for mid, _ in texts}
    return EmbeddingStore.from_vectors({mid: store[mid] for mid in wanted}, store.provider.name)


class HttpEmbeddingProvider:
    def __init__(
        self,
        endpoint: EmbeddingEndpoint,
        cache_path: str | Path | None = None,
        session_factory: Callable[[], requests.Session] | None = None,
    ) -> None:
        self.endpoint = endpoint
        self.cache_path = cache_path
        self.session_factory = session_factory
        self.name = f"http:{endpoint.model}"

    def embed(self, texts: Sequence[tuple[str, str]]) -> EmbeddingStore:
        return fetch_embeddings(texts, self.endpoint, cache_path=self.cache_path, session_factory=self.session_factory)


__all__ = [
    "EmbeddingProvider",
    "FileEmbeddingProvider",
    "FixtureEmbeddingProvider",
    "EmbeddingEndpoint",
    "fetch_embeddings",
    "HttpEmbeddingProvider",
]
