from __future__ import annotations

import logging

from duplication.commands.artifacts import require
from duplication.data_access.corpus_files import read_corpus
from duplication.data_access.embedding_files import save_embeddings
from duplication.modalities.semantic.providers import EmbeddingEndpoint, HttpEmbeddingProvider
from duplication.run_config import RunConfig

logger = logging.getLogger(__name__)

CACHE_FILE = "embedding_cache.jsonl"


def cmd_embed(config: RunConfig) -> dict:
    """Embed every message's semantic_text through the configured service (cached per id)."""
    require(config, "corpus", "embedding_url")
    corpus = read_corpus(config.corpus)
    endpoint = EmbeddingEndpoint(
        url=config.embedding_url,
        model=config.embedding_model,
        token_env=config.embedding_token_env,
        batch_size=config.embedding_batch_size,
        concurrency=config.embedding_concurrency,
    )
    provider = HttpEmbeddingProvider(endpoint, cache_path=config.output(CACHE_FILE))
    store = provider.embed([(m.id, m.semantic_text) for m in corpus.messages])
    suffix = "bin" if config.embedding_format == "binary" else "jsonl"
    path = save_embeddings(store, config.output(f"embeddings.{suffix}"), config.embedding_format)
    logger.info("[CLI] %d embeddings (dim %d) written to %s", len(store), store.dim, path)
    return {"embeddings": len(store), "dim": store.dim, "provider": store.provider.name}


__all__ = ["cmd_embed"]
