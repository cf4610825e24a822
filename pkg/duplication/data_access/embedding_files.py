"""Readers and writers for embedding files (JSONL and EMB1 binary)."""
from __future__ import annotations

import json
import logging
import os
import struct
from pathlib import Path

import numpy as np

from duplication.errors import EmbeddingError, EmbeddingFramingError
from duplication.modalities.semantic.processing import EmbeddingStore, EmbeddingVector

logger = logging.getLogger(__name__)

BINARY_MAGIC = b"EMB1"
EMBEDDING_FORMATS = ("jsonl", "binary")


def detect_embedding_format(path: str | Path) -> str:
    with open(path, "rb") as handle:
        head = handle.read(len(BINARY_MAGIC))
    return "binary" if head == BINARY_MAGIC else "jsonl"


def _read_jsonl(path: Path) -> dict[str, EmbeddingVector]:
    vectors: dict[str, EmbeddingVector] = {}
    first_line: dict[str, int] = {}
    dim: int | None = None
    with path.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                mid = str(record["id"])
                values = np.asarray(record["embedding"], dtype=np.float64)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise EmbeddingError(f"{path}:{line_no}: malformed embedding record ({exc})") from exc
            if mid in vectors:
                raise EmbeddingError(f"{path}: duplicate id {mid!r} on lines {first_line[mid]} and {line_no}")
            if dim is None:
                dim = values.size
            elif values.size != dim:
                raise EmbeddingError(f"{path}:{line_no}: dimension {values.size} differs from {dim}")
            vectors[mid] = EmbeddingVector(values)
            first_line[mid] = line_no
    return vectors


def _read_binary(path: Path) -> dict[str, EmbeddingVector]:
    data = path.read_bytes()
    if len(data) < 8 or data[:4] != BINARY_MAGIC:
        raise EmbeddingFramingError(f"{path}: missing EMB1 header")
    (dim,) = struct.unpack_from("<I", data, 4)
    if dim == 0:
        raise EmbeddingFramingError(f"{path}: declared dimension 0")
    payload = dim * 4
    vectors: dict[str, EmbeddingVector] = {}
    offset = 8
    record = 0
    while offset < len(data):
        record += 1
        if offset + 2 > len(data):
            raise EmbeddingFramingError(f"{path}: record {record} truncated in id length")
        (id_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if offset + id_len + payload > len(data):
            raise EmbeddingFramingError(
                f"{path}: record {record} truncated (needs {id_len + payload} bytes, {len(data) - offset} left)"
            )
        try:
            mid = data[offset : offset + id_len].decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EmbeddingFramingError(
                f"{path}: record {record} at byte {offset - 2} has an id that is not UTF-8 ({exc.reason})"
            ) from exc
        offset += id_len
        values = np.frombuffer(data, dtype="<f4", count=dim, offset=offset)
        offset += payload
        if mid in vectors:
            raise EmbeddingError(f"{path}: duplicate id {mid!r} (record {record})")
        vectors[mid] = EmbeddingVector(values)
    return vectors


def load_embeddings(path: str | Path, provider_name: str | None = None) -> EmbeddingStore:
    """Load a JSONL or EMB1 binary embedding file (format detected from the magic bytes)."""
    path = Path(path)
    if not path.exists():
        raise EmbeddingError(f"embedding file not found: {path}")
    fmt = detect_embedding_format(path)
    vectors = _read_binary(path) if fmt == "binary" else _read_jsonl(path)
    store = EmbeddingStore.from_vectors(vectors, provider_name or f"file:{path.name}")
    logger.info("[SEMANTIC] loaded %d embeddings of dim %d from %s (%s)", len(store), store.dim, path, fmt)
    return store


def save_embeddings(store: EmbeddingStore, path: str | Path, fmt: str = "jsonl") -> Path:
    """Write the store sorted by id; the file is replaced atomically."""
    if fmt not in EMBEDDING_FORMATS:
        raise ValueError(f"unknown embedding format {fmt!r}; expected one of {EMBEDDING_FORMATS}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    if fmt == "jsonl":
        with tmp.open("w", encoding="utf-8") as handle:
            for mid in sorted(store.vectors):
                values = store[mid].values.tolist()
                handle.write(json.dumps({"id": mid, "embedding": values}, ensure_ascii=False) + "\n")
    else:
        with tmp.open("wb") as handle:
            handle.write(BINARY_MAGIC + struct.pack("<I", store.dim))
            for mid in sorted(store.vectors):
                encoded = mid.encode("utf-8")
                handle.write(struct.pack("<H", len(encoded)) + encoded)
                handle.write(store[mid].values.astype("<f4").tobytes())
    os.replace(tmp, path)
    return path


__all__ = ["BINARY_MAGIC", "EMBEDDING_FORMATS", "detect_embedding_format", "load_embeddings", "save_embeddings"]
