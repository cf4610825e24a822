from __future__ import annotations

import sys

import pytest

from duplication.modalities.language.identification import HttpLanguageIdentifier, SubprocessLanguageIdentifier, identify_all
from duplication.modalities.language.processing import dist_language, label_languages, normalize_language_tag
from tests.helpers import corpus_of, message

ECHO_SPANISH = (
    "import json, sys\n"
    "for line in sys.stdin:\n"
    "    if line.strip():\n"
    "        print(json.dumps({'id': json.loads(line)['id'], 'lang': 'ES-mx'}))\n"
)


@pytest.mark.parametrize(
    ("raw", "expected"),
    [("ES", "es"), ("pt-BR", "pt"), ("zh_Hant", "zh"), (None, "und"), ("", "und"), ("zxx-?", "zxx"), ("??", "und"), ("x", "und")],
)
def test_normalize_language_tag(raw, expected):
    assert normalize_language_tag(raw) == expected


def test_language_distance_is_binary():
    assert dist_language("es", "es") == 0.0
    assert dist_language("es", "en") == 1.0
    assert dist_language("und", "und") == 1.0
    assert dist_language("und", "es") == 1.0


def test_provided_tags_are_normalized_and_und_share_recorded(caplog):
    corpus = corpus_of(message("1", "u", "hola", lang="ES"), message("2", "u", "hello", lang=None), message("3", "u", "oi", lang="pt-BR"))
    with caplog.at_level("WARNING"):
        labeled = label_languages(corpus)
    assert [m.language for m in labeled] == ["es", "und", "pt"]
    assert dict(labeled.provenance.parameters)["und_share"] == pytest.approx(1 / 3)
    assert "1 untagged" in caplog.text


class FlakyIdentifier:
    def __init__(self) -> None:
        self.calls = 0

    def identify(self, batch):
        self.calls += 1
        if any(mid == "boom" for mid, _ in batch):
            raise OSError("tool crashed")
        return {mid: "en" for mid, _ in batch}


def test_failed_batches_fall_back_to_und():
    corpus = corpus_of(message("a", "u", "one"), message("b", "u", "two"), message("boom", "u", "three"))
    labeled = label_languages(corpus, "external-tool", FlakyIdentifier(), batch_size=2, concurrency=1)
    assert {m.id: m.language for m in labeled} == {"a": "en", "b": "en", "boom": "und"}


def test_identify_all_counts_missing_codes():
    found, failed = identify_all(FlakyIdentifier(), [("a", "x"), ("boom", "y")], batch_size=1, concurrency=2)
    assert found == {"a": "en"}
    assert failed == 1
    assert identify_all(FlakyIdentifier(), [], batch_size=4, concurrency=1) == ({}, 0)


def test_subprocess_identifier_round_trips_jsonl():
    identifier = SubprocessLanguageIdentifier([sys.executable, "-c", ECHO_SPANISH], timeout=60)
    corpus = corpus_of(message("1", "u", "hola"), message("2", "u", "qué tal"))
    labeled = label_languages(corpus, "external-tool", identifier)
    assert [m.language for m in labeled] == ["es", "es"]


class LanguageSession:
    opened: list[LanguageSession] = []

    def __init__(self) -> None:
        self.exited = False
        LanguageSession.opened.append(self)

    def __enter__(self) -> LanguageSession:
        return self

    def __exit__(self, *exc) -> None:
        self.exited = True

    def post(self, url, json, timeout):
        return LanguageResponse([{"id": item["id"], "lang": "pt-BR"} for item in json])


class LanguageResponse:
    def __init__(self, body) -> None:
        self.body = body

    def raise_for_status(self) -> None:
        pass

    def json(self):
        return self.body


def test_http_identifier_opens_a_session_per_batch():
    LanguageSession.opened.clear()
    identifier = HttpLanguageIdentifier("http://lang.local", session_factory=LanguageSession)
    found, failed = identify_all(identifier, [("a", "oi"), ("b", "tudo"), ("c", "bem")], batch_size=1, concurrency=3)
    assert (found, failed) == ({"a": "pt-BR", "b": "pt-BR", "c": "pt-BR"}, 0)
    assert len(LanguageSession.opened) == 3
    assert all(session.exited for session in LanguageSession.opened)


def test_unknown_source_and_missing_identifier():
    corpus = corpus_of(message("1", "u", "hola"))
    with pytest.raises(ValueError):
        label_languages(corpus, "guess")
    with pytest.raises(ValueError):
        label_languages(corpus, "external-tool")
