"""Corpus ingestion models and preprocessing."""
from duplication.corpus.models import Corpus, Message, PairKey, Provenance, Stage

__all__ = ["Corpus", "Message", "PairKey", "Provenance", "Stage"]
