"""Path helpers and deterministic JSON / JSONL writers."""
from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Iterable, Iterator

INPUT_FORMATS = ("jsonl", "csv")


def detect_input_format(path: str | Path) -> str:
    """Guess `jsonl` or `csv` from the file suffix (defaults to jsonl)."""
    suffix = Path(path).suffix.lower()
    return "csv" if suffix in {".csv", ".tsv"} else "jsonl"


def output_path(output_dir: str | Path, name: str) -> Path:
    """Build an artifact path inside the output directory, creating the directory."""
    directory = Path(output_dir)
    directory.mkdir(parents=True, exist_ok=True)
    return directory / name


def dumps(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, allow_nan=False)


def write_json(obj: Any, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2, allow_nan=False) + "\n", encoding="utf-8")
    os.replace(tmp, path)
    return path


def write_jsonl(records: Iterable[dict], path: str | Path) -> int:
    """Write one sorted-key JSON object per line; returns the record count."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    count = 0
    with tmp.open("w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(dumps(record) + "\n")
            count += 1
    os.replace(tmp, path)
    return count


def iter_jsonl(path: str | Path) -> Iterator[tuple[int, str]]:
    """Yield (line number, raw line) for non-blank lines."""
    with Path(path).open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if line.strip():
                yield line_no, line


def read_jsonl(path: str | Path) -> list[dict]:
    return [json.loads(line) for _, line in iter_jsonl(path)]


__all__ = [
    "INPUT_FORMATS",
    "detect_input_format",
    "output_path",
    "dumps",
    "write_json",
    "write_jsonl",
    "iter_jsonl",
    "read_jsonl",
]
