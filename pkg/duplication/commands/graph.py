from __future__ import annotations

import json
import logging
from pathlib import Path

from duplication.commands.artifacts import require, write_figure, write_table
from duplication.data_access.corpus_files import read_corpus
from duplication.data_access.files import write_json
from duplication.data_access.verdict_files import read_verdicts
from duplication.errors import ConfigError
from duplication.graph.export import write_graph
from duplication.graph.plots import plot_component_sizes, plot_method_mix_ternary, plot_sunburst
from duplication.graph.processing import (
    annotate_nodes,
    build_message_graph,
    component_report,
    default_theme_map,
    duplicates_stage,
    label_themes,
    labeled_share,
    load_theme_map,
    method_breakdown,
    method_mix,
    project_accounts,
    sunburst_frame,
)
from duplication.run_config import RunConfig

logger = logging.getLogger(__name__)


def _stages_with_duplicates(config: RunConfig, duplicates: dict) -> dict | None:
    """Append the duplicates row to a preprocess staging report, when one is given."""
    if not config.stage_report:
        return None
    try:
        report = json.loads(Path(config.stage_report).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read stage report {config.stage_report}: {exc}") from exc
    report.setdefault("stages", {})["duplicates"] = duplicates
    return report


def cmd_graph(config: RunConfig) -> dict:
    """Build the message graph (and optionally the account graph) from verdicts and export it."""
    require(config, "verdicts", "corpus")
    verdicts = read_verdicts(config.verdicts)
    corpus = read_corpus(config.corpus)
    themes = load_theme_map(config.themes) if config.themes else default_theme_map()
    themes_by_id = label_themes(corpus, themes)

    graph = build_message_graph(verdicts)
    annotated = annotate_nodes(graph, corpus, themes_by_id)
    for fmt in config.graph_formats:
        write_graph(annotated, config.output(f"message_graph.{fmt}"), fmt)

    components = component_report(graph, corpus)
    write_json(components, config.output("components.json"))
    write_table(method_breakdown(graph, corpus), config, "method_breakdown.csv")
    stage = duplicates_stage(graph, corpus)
    duplicates = {"users": stage.users, "messages": stage.messages}
    stages = _stages_with_duplicates(config, duplicates)
    if stages is not None:
        write_json(stages, config.output("stage_report.json"))
    write_figure(plot_component_sizes(components), config, "component_sizes")

    linkage = "component" if config.component_account_linkage else "pair"
    accounts = project_accounts(graph, corpus, linkage)
    if config.project_accounts:
        for fmt in config.graph_formats:
            write_graph(accounts, config.output(f"account_graph.{fmt}"), fmt)
        mix = method_mix(verdicts, corpus)
        write_table(mix, config, "method_mix.csv")
        write_figure(plot_method_mix_ternary(mix), config, "method_mix")
    if config.themes:
        frame = sunburst_frame(graph, corpus, themes_by_id, accounts)
        write_json(frame.to_dict(orient="records"), config.output("sunburst.json"))
        write_figure(plot_sunburst(frame), config, "sunburst")

    report = {
        "nodes": graph.number_of_nodes(),
        "edges": graph.number_of_edges(),
        "components": len(components),
        "duplicates": duplicates,
        "labeled_share": labeled_share(themes_by_id),
        "themes": themes.names,
        "account_linkage": linkage,
        "accounts": accounts.number_of_nodes(),
        "account_edges": accounts.number_of_edges(),
    }
    write_json(report, config.output("graph_report.json"))
    return report


__all__ = ["cmd_graph"]
