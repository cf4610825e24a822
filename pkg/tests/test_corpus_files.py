from __future__ import annotations

import pandas as pd
import pytest

from duplication.corpus.processing import preprocess
from duplication.data_access.corpus_files import ingest, read_corpus, write_corpus
from duplication.errors import DuplicateIdError, DuplicationError, RecordError
from tests.helpers import write_lines


def _record(mid: str, account: str = "u1", text: str = "hola mundo", **extra) -> dict:
    return {"id": mid, "account_id": account, "created_at": "2021-06-01T12:00:00-05:00", "text": text, **extra}


def test_ingest_jsonl_skips_malformed_records_with_line_numbers(tmp_path):
    path = write_lines(
        tmp_path / "in.jsonl",
        [
            _record("1", lang="es"),
            "{not json",
            {"id": "3", "account_id": "u3", "text": "sin fecha"},
            _record("4", created_at="yesterday-ish"),
            _record("5", is_retweet=True),
        ],
    )
    corpus = ingest(path)
    assert corpus.ids == ["1", "5"]
    assert [line for line, _ in corpus.provenance.rejected] == [2, 3, 4]
    assert "created_at" in corpus.provenance.rejected[1][1]
    first = corpus.messages[0]
    assert first.created_at == pd.Timestamp("2021-06-01T17:00:00Z")
    assert first.language == "es"
    assert first.semantic_text == "" and first.grapheme_text == ""
    assert corpus.messages[1].is_retweet is True


def test_ingest_strict_raises_first_bad_record(tmp_path):
    path = write_lines(tmp_path / "in.jsonl", [_record("1"), "{broken"])
    with pytest.raises(RecordError) as info:
        ingest(path, strict=True)
    assert info.value.line == 2


def test_duplicate_ids_are_fatal(tmp_path):
    path = write_lines(tmp_path / "in.jsonl", [_record("7"), _record("8"), _record("7", account="u2")])
    with pytest.raises(DuplicateIdError) as info:
        ingest(path)
    assert (info.value.first_line, info.value.second_line) == (1, 3)


def test_ingest_csv_with_header(tmp_path):
    path = tmp_path / "in.csv"
    path.write_text(
        "id,account_id,created_at,lang,text,is_retweet\n"
        '1,u1,2021-06-01T12:00:00Z,es,"hola, mundo",false\n'
        "2,u2,2021-06-01T12:05:00Z,,otro texto,\n",
        encoding="utf-8",
    )
    corpus = ingest(path)
    assert corpus.provenance.format == "csv"
    assert [m.raw_text for m in corpus] == ["hola, mundo", "otro texto"]
    assert [m.language for m in corpus] == ["es", "und"]
    assert corpus.messages[0].is_retweet is False and corpus.messages[1].is_retweet is None


def test_csv_line_numbers_follow_multiline_quoted_fields(tmp_path):
    path = tmp_path / "in.csv"
    path.write_text(
        "id,account_id,created_at,lang,text,is_retweet\n"
        '1,u1,2021-06-01T12:00:00Z,es,"primera línea\nsegunda línea\ntercera",false\n'
        "\n"
        "2,u2,not-a-date,es,roto,\n"
        "3,u3,2021-06-01T12:05:00Z,es,bien,\n",
        encoding="utf-8",
    )
    corpus = ingest(path)
    assert [m.id for m in corpus] == ["1", "3"]
    assert corpus.messages[0].raw_text == "primera línea\nsegunda línea\ntercera"
    assert [line for line, _ in corpus.provenance.rejected] == [6]
    with pytest.raises(RecordError) as info:
        ingest(path, strict=True)
    assert info.value.line == 6


def test_csv_without_required_columns_is_fatal(tmp_path):
    path = tmp_path / "in.csv"
    path.write_text("id,text\n1,hola\n", encoding="utf-8")
    with pytest.raises(DuplicationError, match="account_id"):
        ingest(path)


def test_empty_input_gives_empty_corpus(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("", encoding="utf-8")
    assert len(ingest(path)) == 0


def test_missing_input_file(tmp_path):
    with pytest.raises(DuplicationError, match="not found"):
        ingest(tmp_path / "absent.jsonl")


def test_normalized_corpus_file_keeps_derived_fields(tmp_path):
    text = "Mensaje largo con enlace https://t.co/abc y mención @alguien #Tema"
    source = write_lines(tmp_path / "in.jsonl", [_record("1", text=text, lang="pt-BR"), _record("2", "u2", text=text)])
    corpus = preprocess(ingest(source), min_letters=10)
    write_corpus(corpus, tmp_path / "corpus.jsonl")
    loaded = read_corpus(tmp_path / "corpus.jsonl")
    assert loaded.messages == corpus.messages
    assert loaded.messages[0].language == "pt"
