"""Shared writers for command outputs (tables, plotly figure specs)."""
from __future__ import annotations

import logging
from pathlib import Path

import pandas as pd
import plotly.graph_objects as go

from duplication.data_access.files import output_path
from duplication.errors import ConfigError
from duplication.run_config import RunConfig

logger = logging.getLogger(__name__)

FIGURES_DIR = "figures"


def require(config: RunConfig, *names: str) -> None:
    missing = [name for name in names if getattr(config, name) in (None, "")]
    if missing:
        raise ConfigError(f"{config.command}: missing required input(s) {', '.join('--' + n.replace('_', '-') for n in missing)}")


def write_table(frame: pd.DataFrame, config: RunConfig, name: str) -> Path:
    path = config.output(name)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def write_figure(figure: go.Figure, config: RunConfig, name: str) -> Path | None:
    """Write the figure as a plotly JSON spec under figures/ when --figures is on."""
    if not config.figures:
        return None
    path = output_path(Path(config.output_dir) / FIGURES_DIR, f"{name}.json")
    path.write_text(figure.to_json(), encoding="utf-8")
    logger.info("[CLI] figure %s written", path)
    return path


__all__ = ["FIGURES_DIR", "require", "write_table", "write_figure"]
