"""Message dataset ingestion (JSONL / CSV) and the normalized corpus file."""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Iterator

import pandas as pd

from duplication.config import UNDETERMINED_LANGUAGE
from duplication.corpus.models import Corpus, Message, Provenance
from duplication.corpus.processing import normalize
from duplication.data_access.files import INPUT_FORMATS, detect_input_format, iter_jsonl, write_jsonl
from duplication.errors import DuplicateIdError, DuplicationError, RecordError

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("id", "account_id", "created_at", "text")
TRUE_VALUES = {"true", "1", "yes", "t", "y"}
FALSE_VALUES = {"false", "0", "no", "f", "n"}


def _parse_timestamp(value: object) -> pd.Timestamp:
    """Parse an RFC 3339 timestamp to UTC; naive timestamps are taken as UTC."""
    stamp = pd.Timestamp(str(value))
    if pd.isna(stamp):
        raise ValueError(f"unparseable created_at {value!r}")
    return stamp.tz_localize("UTC") if stamp.tzinfo is None else stamp.tz_convert("UTC")


def _parse_flag(value: object) -> bool | None:
    if value is None or isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text == "":
        return None
    if text in TRUE_VALUES:
        return True
    if text in FALSE_VALUES:
        return False
    raise ValueError(f"is_retweet must be boolean, got {value!r}")


def _record_to_message(record: dict, line: int) -> Message:
    if not isinstance(record, dict):
        raise RecordError(line, "record is not an object")
    missing = [name for name in REQUIRED_FIELDS if record.get(name) in (None, "") and name != "text"]
    if record.get("text") is None:
        missing.append("text")
    if missing:
        raise RecordError(line, f"missing field(s) {', '.join(missing)}")
    try:
        created_at = _parse_timestamp(record["created_at"])
    except (ValueError, TypeError) as exc:
        raise RecordError(line, f"bad created_at ({exc})") from exc
    try:
        flag = _parse_flag(record.get("is_retweet"))
    except ValueError as exc:
        raise RecordError(line, str(exc)) from exc
    lang = record.get("lang")
    return Message(
        id=str(record["id"]),
        account_id=str(record["account_id"]),
        created_at=created_at,
        raw_text=str(record["text"]),
        language=str(lang) if lang not in (None, "") else UNDETERMINED_LANGUAGE,
        is_retweet=flag,
    )


def _jsonl_records(path: Path) -> Iterator[tuple[int, dict | RecordError]]:
    for line_no, line in iter_jsonl(path):
        try:
            yield line_no, json.loads(line)
        except json.JSONDecodeError as exc:
            yield line_no, RecordError(line_no, f"invalid JSON ({exc.msg})")


def _csv_records(path: Path) -> Iterator[tuple[int, dict | RecordError]]:
    """Yield (physical line where the record starts, row); quoted fields may span lines."""
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            return
        absent = [name for name in REQUIRED_FIELDS if name not in header]
        if absent:
            raise DuplicationError(f"{path}: CSV header lacks column(s) {', '.join(absent)}")
        end = reader.line_num
        for fields in reader:
            start, end = end + 1, reader.line_num
            if not fields:
                continue
            yield start, dict(zip(header, fields))


def ingest(path: str | Path, format: str | None = None, *, strict: bool = False) -> Corpus:
    """Read a message dataset into a Corpus with raw text only.

    Parameters
    ----------
    path: str | Path
        JSONL (one object per line) or CSV (header required, UTF-8).
    format: str | None
        `jsonl` or `csv`; guessed from the suffix when omitted.
    strict: bool
        Raise the first malformed record instead of skipping it.

    Returns
    -------
    Corpus
        One Message per valid record in file order. Skipped records are kept in
        `provenance.rejected` as (line, reason). Duplicate ids always raise
        `DuplicateIdError`.
    """
    path = Path(path)
    fmt = format or detect_input_format(path)
    if fmt not in INPUT_FORMATS:
        raise ValueError(f"unknown input format {fmt!r}; expected one of {INPUT_FORMATS}")
    if not path.exists():
        raise DuplicationError(f"input file not found: {path}")

    records = _csv_records(path) if fmt == "csv" else _jsonl_records(path)
    messages: list[Message] = []
    rejected: list[tuple[int, str]] = []
    seen: dict[str, int] = {}

    for line_no, record in records:
        try:
            if isinstance(record, RecordError):
                raise record
            message = _record_to_message(record, line_no)
        except RecordError as exc:
            if strict:
                raise
            rejected.append((exc.line, exc.reason))
            continue
        if message.id in seen:
            raise DuplicateIdError(message.id, seen[message.id], line_no)
        seen[message.id] = line_no
        messages.append(message)

    if rejected:
        logger.warning("[CORPUS] %d malformed records skipped in %s (first: line %d: %s)", len(rejected), path, *rejected[0])
    logger.info("[CORPUS] ingested %d messages from %s (%s)", len(messages), path, fmt)
    provenance = Provenance(source=str(path), format=fmt, rejected=tuple(rejected))
    return Corpus(messages=tuple(messages), provenance=provenance)


#################### Normalized corpus file ####################

def _message_record(msg: Message) -> dict:
    return {
        "id": msg.id,
        "account_id": msg.account_id,
        "created_at": msg.created_at.isoformat(),
        "lang": msg.language,
        "text": msg.raw_text,
        "is_retweet": msg.is_retweet,
        "semantic_text": msg.semantic_text,
        "grapheme_text": msg.grapheme_text,
    }


def write_corpus(corpus: Corpus, path: str | Path) -> Path:
    write_jsonl((_message_record(m) for m in corpus.messages), path)
    return Path(path)


def read_corpus(path: str | Path) -> Corpus:
    """Read a corpus file written by `write_corpus` (normalizes if the fields are absent)."""
    corpus = ingest(path, "jsonl", strict=True)
    stored = {}
    for _, line in iter_jsonl(path):
        record = json.loads(line)
        if "grapheme_text" in record and "semantic_text" in record:
            stored[str(record["id"])] = (record["semantic_text"], record["grapheme_text"])
    messages = []
    for msg in corpus.messages:
        if msg.id in stored:
            semantic, grapheme = stored[msg.id]
            messages.append(replace(msg, semantic_text=semantic, grapheme_text=grapheme))
        else:
            messages.append(normalize(msg))
    return corpus.derive(tuple(messages), corpus.provenance.with_parameter("normalized", True))


__all__ = ["REQUIRED_FIELDS", "ingest", "write_corpus", "read_corpus"]
