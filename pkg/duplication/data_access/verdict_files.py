"""Verdict JSONL: one {"a", "b", "label", "d_grapheme", "d_semantic", "d_language"} per line."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from duplication.data_access.files import iter_jsonl, write_jsonl
from duplication.errors import RecordError
from duplication.services.classifier import PairVerdict


def write_verdicts(verdicts: Iterable[PairVerdict], path: str | Path) -> int:
    return write_jsonl((v.to_record() for v in verdicts), path)


def read_verdicts(path: str | Path) -> list[PairVerdict]:
    verdicts = []
    for line_no, line in iter_jsonl(path):
        try:
            verdicts.append(PairVerdict.from_record(json.loads(line)))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise RecordError(line_no, f"bad verdict record ({exc})") from exc
    return verdicts


__all__ = ["write_verdicts", "read_verdicts"]
