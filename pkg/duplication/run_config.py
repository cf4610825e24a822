"""Run configuration: built-in defaults < JSON config file < explicit command-line flags."""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Mapping

from duplication.config import (
    BOOTSTRAP_RESAMPLES,
    CI_LEVEL,
    DEFAULT_GRAPHEME_ALGORITHM,
    DEFAULT_SEED,
    EMBEDDING_BATCH_SIZE,
    EMBEDDING_CONCURRENCY,
    EMBEDDING_TOKEN_ENV,
    GRAPH_FORMATS,
    GRAPHEME_ALGORITHMS,
    MIN_LETTERS,
    THRESHOLD_PRESETS,
)
from duplication.data_access.files import output_path, write_json
from duplication.errors import ConfigError
from duplication.services.classifier import Thresholds

logger = logging.getLogger(__name__)

RUN_CONFIG_FILE = "run_config.json"


@dataclass
class RunConfig:
    command: str = ""
    output_dir: str = "out"
    seed: int = DEFAULT_SEED
    workers: int = 1
    # inputs
    input: str | None = None
    input_format: str | None = None
    strict: bool = False
    corpus: str | None = None
    embeddings: str | None = None
    verdicts: str | None = None
    pairs: str | None = None
    themes: str | None = None
    stage_report: str | None = None
    # preprocessing
    min_letters: int = MIN_LETTERS
    language_source: str = "provided"
    language_tool: str | None = None
    language_url: str | None = None
    # embedding service
    embedding_url: str | None = None
    embedding_model: str = ""
    embedding_token_env: str = EMBEDDING_TOKEN_ENV
    embedding_batch_size: int = EMBEDDING_BATCH_SIZE
    embedding_concurrency: int = EMBEDDING_CONCURRENCY
    embedding_format: str = "jsonl"
    # classification
    preset: str = "synthetic"
    tau_p: float | None = None
    tau_s: float | None = None
    tau_l: float | None = None
    grapheme_algorithm: str = DEFAULT_GRAPHEME_ALGORITHM
    tau_p_by_language: dict[str, float] = field(default_factory=dict)
    emit_nomatch: bool = False
    require_semantic_for_copypasta: bool = False
    prune: bool = True
    # graph
    project_accounts: bool = False
    component_account_linkage: bool = False
    graph_formats: list[str] = field(default_factory=lambda: list(GRAPH_FORMATS))
    # evaluation
    algorithms: list[str] = field(default_factory=lambda: list(GRAPHEME_ALGORITHMS))
    resolution: int | None = None
    n_resamples: int = BOOTSTRAP_RESAMPLES
    ci_level: float = CI_LEVEL
    length_filter: bool = False
    # synthetic fixture
    n_seeds: int = 100
    variants: int = 10
    n_controls: int = 1000
    figures: bool = False

    def thresholds(self) -> Thresholds:
        return Thresholds(
            tau_p=self.tau_p,
            tau_s=self.tau_s,
            tau_l=self.tau_l,
            grapheme_algorithm=self.grapheme_algorithm,
            tau_p_by_language=self.tau_p_by_language,
        )

    def output(self, name: str) -> Path:
        return output_path(self.output_dir, name)

    def to_dict(self) -> dict:
        return asdict(self)


def _load_config_file(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return data


def resolve_run_config(explicit: Mapping[str, object], config_path: str | Path | None = None) -> RunConfig:
    """Merge defaults, the optional JSON config and explicit flags into a fully materialized RunConfig.

    Threshold values left unset are filled from the chosen preset, so the
    echoed config always lists tau_p, tau_s and tau_l.
    """
    known = {f.name for f in fields(RunConfig)}
    merged: dict[str, object] = {}
    if config_path is not None:
        from_file = _load_config_file(config_path)
        unknown = sorted(set(from_file) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        merged.update(from_file)
    merged.update({k: v for k, v in explicit.items() if k in known})
    config = RunConfig(**merged)

    if config.preset not in THRESHOLD_PRESETS:
        raise ConfigError(f"unknown threshold preset {config.preset!r}; expected one of {sorted(THRESHOLD_PRESETS)}")
    for name, value in THRESHOLD_PRESETS[config.preset].items():
        if getattr(config, name) is None:
            setattr(config, name, value)
    config.tau_p_by_language = dict(sorted(config.tau_p_by_language.items()))
    config.thresholds()
    if config.workers < 1:
        raise ConfigError(f"workers must be >= 1, got {config.workers}")
    return config


def write_run_config(config: RunConfig) -> Path:
    path = write_json(config.to_dict(), config.output(RUN_CONFIG_FILE))
    logger.info("[CLI] run configuration written to %s", path)
    return path


__all__ = ["RUN_CONFIG_FILE", "RunConfig", "resolve_run_config", "write_run_config"]
