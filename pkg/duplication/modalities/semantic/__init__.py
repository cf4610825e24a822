"""Semantic proximity through sentence embeddings."""
