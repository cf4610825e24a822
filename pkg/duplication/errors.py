"""Exception hierarchy for the duplication pipeline."""
from __future__ import annotations

from typing import Iterable


class DuplicationError(Exception):
    """Base class for data and runtime errors (CLI exit code 1)."""


class ConfigError(DuplicationError):
    pass


class RecordError(DuplicationError):
    """A single malformed input record."""

    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class DuplicateIdError(DuplicationError):
    def __init__(self, message_id: str, first_line: int, second_line: int) -> None:
        super().__init__(f"duplicate id {message_id!r} on lines {first_line} and {second_line}")
        self.message_id = message_id
        self.first_line = first_line
        self.second_line = second_line


class _IdListError(DuplicationError):
    """Error carrying the ids it concerns, listed in the message."""

    label = "ids"

    def __init__(self, ids: Iterable[str], detail: str = "") -> None:
        self.ids = sorted(ids)
        text = f"{len(self.ids)} {self.label}: {', '.join(self.ids)}"
        super().__init__(f"{detail} ({text})" if detail else text)


class EmbeddingError(DuplicationError):
    pass


class EmbeddingFramingError(EmbeddingError):
    pass


class MissingEmbeddingsError(_IdListError, EmbeddingError):
    label = "messages without embedding"


class EmbeddingServiceError(_IdListError, EmbeddingError):
    label = "unembedded messages"


class UnresolvableMessageError(_IdListError):
    label = "unknown message ids"


class UnmatchedPairError(_IdListError):
    label = "pairs without ground truth"


class InsufficientBigramsError(DuplicationError, ValueError):
    pass


class SingleClassError(DuplicationError, ValueError):
    pass


class UnknownLabelError(DuplicationError, ValueError):
    pass
