"""External language-identification tools (subprocess or HTTP endpoint)."""
from __future__ import annotations

import json
import logging
import subprocess
from typing import Callable, Protocol, Sequence

import requests
from joblib import Parallel, delayed

logger = logging.getLogger(__name__)


class LanguageIdentifier(Protocol):
    def identify(self, batch: Sequence[tuple[str, str]]) -> dict[str, str]:
        """Map message id -> raw language code for one batch of (id, text)."""
        ...


def _parse_records(records: list[dict]) -> dict[str, str]:
    return {str(r["id"]): str(r.get("lang", "")) for r in records if "id" in r}


class SubprocessLanguageIdentifier:
    """Runs a command that reads JSONL {"id","text"} on stdin and writes JSONL {"id","lang"}."""

    def __init__(self, command: Sequence[str], timeout: float = 300.0) -> None:
        self.command = list(command)
        self.timeout = timeout

    def identify(self, batch: Sequence[tuple[str, str]]) -> dict[str, str]:
        payload = "\n".join(json.dumps({"id": mid, "text": text}, ensure_ascii=False) for mid, text in batch)
        completed = subprocess.run(
            self.command,
            input=payload,
            capture_output=True,
            text=True,
            encoding="utf-8",
            timeout=self.timeout,
            check=True,
        )
        records = [json.loads(line) for line in completed.stdout.splitlines() if line.strip()]
        return _parse_records(records)


class HttpLanguageIdentifier:
    """POSTs [{"id","text"}, ...] and expects [{"id","lang"}, ...] back."""

    def __init__(
        self,
        url: str,
        session_factory: Callable[[], requests.Session] | None = None,
        timeout: float = 60.0,
    ) -> None:
        self.url = url
        self.session_factory = session_factory or requests.Session
        self.timeout = timeout

    def identify(self, batch: Sequence[tuple[str, str]]) -> dict[str, str]:
        with self.session_factory() as session:
            response = session.post(
                self.url,
                json=[{"id": mid, "text": text} for mid, text in batch],
                timeout=self.timeout,
            )
        response.raise_for_status()
        body = response.json()
        records = body.get("data", []) if isinstance(body, dict) else body
        return _parse_records(records)


def _identify_batch(identifier: LanguageIdentifier, batch: Sequence[tuple[str, str]]) -> tuple[dict[str, str], int]:
    try:
        found = identifier.identify(batch)
    except (subprocess.SubprocessError, OSError, requests.RequestException, ValueError, KeyError) as exc:
        logger.warning("[LANGUAGE] batch of %d failed: %s", len(batch), exc)
        return {}, len(batch)
    missing = sum(1 for mid, _ in batch if not found.get(mid))
    return found, missing


def identify_all(
    identifier: LanguageIdentifier,
    texts: Sequence[tuple[str, str]],
    *,
    batch_size: int,
    concurrency: int,
) -> tuple[dict[str, str], int]:
    """Return (id -> raw code, number of messages left without a code)."""
    batches = [texts[i : i + batch_size] for i in range(0, len(texts), batch_size)]
    if not batches:
        return {}, 0
    results = Parallel(n_jobs=max(1, concurrency), backend="threading")(
        delayed(_identify_batch)(identifier, batch) for batch in batches
    )
    detected: dict[str, str] = {}
    failed = 0
    for found, missing in results:
        detected.update(found)
        failed += missing
    return detected, failed


__all__ = [
    "LanguageIdentifier",
    "SubprocessLanguageIdentifier",
    "HttpLanguageIdentifier",
    "identify_all",
]
