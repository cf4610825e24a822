from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from duplication.errors import EmbeddingError, MissingEmbeddingsError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    values: np.ndarray
    norm: float = field(init=False)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64).ravel()
        if values.size == 0:
            raise EmbeddingError("embedding has dimension 0")
        if not np.all(np.isfinite(values)):
            raise EmbeddingError("embedding contains non-finite entries")
        norm = float(np.linalg.norm(values))
        if norm == 0.0:
            raise EmbeddingError("embedding is the zero vector")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "norm", norm)

    @property
    def dim(self) -> int:
        return int(self.values.size)


def dist_semantic(e1: EmbeddingVector, e2: EmbeddingVector) -> float:
    """Angular distance arccos(cos(e1, e2)) / pi in [0, 1]; cosine clamped before arccos."""
    if e1.dim != e2.dim:
        raise EmbeddingError(f"dimension mismatch: {e1.dim} vs {e2.dim}")
    cosine = float(np.dot(e1.values, e2.values)) / (e1.norm * e2.norm)
    cosine = min(1.0, max(-1.0, cosine))
    return math.acos(cosine) / math.pi


@dataclass(frozen=True)
class ProviderDescriptor:
    name: str
    dim: int


@dataclass(frozen=True)
class EmbeddingStore:
    """Write-once mapping message id -> EmbeddingVector with one shared dimension."""

    vectors: Mapping[str, EmbeddingVector]
    provider: ProviderDescriptor

    @classmethod
    def from_vectors(cls, vectors: Mapping[str, EmbeddingVector | Iterable[float]], provider_name: str) -> EmbeddingStore:
        built = {
            mid: vec if isinstance(vec, EmbeddingVector) else EmbeddingVector(np.asarray(vec, dtype=np.float64))
            for mid, vec in vectors.items()
        }
        dims = {vec.dim for vec in built.values()}
        if len(dims) > 1:
            raise EmbeddingError(f"mixed embedding dimensions {sorted(dims)}")
        dim = dims.pop() if dims else 0
        return cls(vectors=MappingProxyType(dict(sorted(built.items()))), provider=ProviderDescriptor(provider_name, dim))

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, message_id: object) -> bool:
        return message_id in self.vectors

    def __getitem__(self, message_id: str) -> EmbeddingVector:
        return self.vectors[message_id]

    @property
    def dim(self) -> int:
        return self.provider.dim

    def missing(self, ids: Iterable[str]) -> list[str]:
        return sorted(mid for mid in ids if mid not in self.vectors)

    def require(self, ids: Iterable[str]) -> None:
        """Raise MissingEmbeddingsError listing every id without a vector."""
        missing = self.missing(ids)
        if missing:
            raise MissingEmbeddingsError(missing, f"embedding store {self.provider.name!r} is incomplete")

    def merged(self, other: EmbeddingStore, provider_name: str | None = None) -> EmbeddingStore:
        if len(self) and len(other) and self.dim != other.dim:
            raise EmbeddingError(f"cannot merge stores of dimension {self.dim} and {other.dim}")
        combined = dict(self.vectors)
        combined.update(other.vectors)
        return EmbeddingStore.from_vectors(combined, provider_name or self.provider.name)


__all__ = ["EmbeddingVector", "dist_semantic", "ProviderDescriptor", "EmbeddingStore"]
