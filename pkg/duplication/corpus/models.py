"""Message, Corpus and PairKey records shared by every pipeline stage."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator

import pandas as pd

from duplication.config import UNDETERMINED_LANGUAGE


@dataclass(frozen=True)
class Message:
    id: str
    account_id: str
    created_at: pd.Timestamp
    raw_text: str
    language: str = UNDETERMINED_LANGUAGE
    semantic_text: str = ""
    grapheme_text: str = ""
    is_retweet: bool | None = None


@dataclass(frozen=True)
class Stage:
    """One row of the staging table: users and messages left after a step."""

    name: str
    users: int
    messages: int


@dataclass(frozen=True)
class Provenance:
    source: str = ""
    format: str = ""
    parameters: tuple[tuple[str, object], ...] = ()
    stages: tuple[Stage, ...] = ()
    rejected: tuple[tuple[int, str], ...] = ()

    def with_parameter(self, key: str, value: object) -> Provenance:
        params = dict(self.parameters)
        params[key] = value
        return replace(self, parameters=tuple(sorted(params.items())))

    def with_stage(self, stage: Stage) -> Provenance:
        return replace(self, stages=self.stages + (stage,))


@dataclass(frozen=True)
class Corpus:
    messages: tuple[Message, ...]
    provenance: Provenance = field(default_factory=Provenance)

    def __len__(self) -> int:
        return len(self.messages)

    def __iter__(self) -> Iterator[Message]:
        return iter(self.messages)

    @property
    def ids(self) -> list[str]:
        return [m.id for m in self.messages]

    def accounts(self) -> set[str]:
        return {m.account_id for m in self.messages}

    def by_id(self) -> dict[str, Message]:
        return {m.id: m for m in self.messages}

    def stage(self, name: str) -> Stage:
        return Stage(name=name, users=len(self.accounts()), messages=len(self.messages))

    def derive(self, messages: tuple[Message, ...], provenance: Provenance | None = None) -> Corpus:
        return Corpus(messages=messages, provenance=provenance or self.provenance)


@dataclass(frozen=True, order=True)
class PairKey:
    first_id: str
    second_id: str

    @classmethod
    def of(cls, a: str, b: str) -> PairKey:
        if a == b:
            raise ValueError(f"pair of identical ids {a!r}")
        return cls(a, b) if a < b else cls(b, a)


__all__ = ["Message", "Stage", "Provenance", "Corpus", "PairKey"]
