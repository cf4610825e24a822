from __future__ import annotations

import logging
import shlex

from duplication.commands.artifacts import require, write_table
from duplication.corpus.processing import preprocess, stage_report, stage_table
from duplication.data_access.corpus_files import ingest, write_corpus
from duplication.data_access.files import write_json
from duplication.errors import ConfigError
from duplication.modalities.language.identification import HttpLanguageIdentifier, SubprocessLanguageIdentifier
from duplication.modalities.language.processing import label_languages
from duplication.run_config import RunConfig

logger = logging.getLogger(__name__)


def _identifier(config: RunConfig):
    if config.language_tool:
        return SubprocessLanguageIdentifier(shlex.split(config.language_tool))
    if config.language_url:
        return HttpLanguageIdentifier(config.language_url)
    raise ConfigError("external-tool language labeling needs --language-tool or --language-url")


def cmd_preprocess(config: RunConfig) -> dict:
    """Ingest, normalize and filter a dataset; write corpus.jsonl and the staging report."""
    require(config, "input")
    corpus = preprocess(ingest(config.input, config.input_format, strict=config.strict), config.min_letters)
    if config.language_source == "external-tool":
        corpus = label_languages(corpus, "external-tool", _identifier(config))

    write_corpus(corpus, config.output("corpus.jsonl"))
    write_table(stage_table(corpus), config, "stages.csv")
    report = {
        "stages": stage_report(corpus),
        "parameters": dict(corpus.provenance.parameters),
        "rejected": [{"line": line, "reason": reason} for line, reason in corpus.provenance.rejected],
    }
    write_json(report, config.output("stage_report.json"))
    logger.info("[CLI] preprocess kept %d messages", len(corpus))
    return report


__all__ = ["cmd_preprocess"]
