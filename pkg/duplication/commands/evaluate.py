from __future__ import annotations

import logging
from collections import Counter

from duplication.commands.artifacts import require, write_figure, write_table
from duplication.data_access.embedding_files import load_embeddings
from duplication.data_access.files import write_json
from duplication.evaluation.labeled_pairs import (
    Truth,
    calibrate_semantic,
    compare_grapheme_algorithms,
    load_inline_embeddings,
    load_labeled_pairs,
    pair_distances,
)
from duplication.evaluation.plots import plot_delta_space, plot_roc
from duplication.evaluation.processing import bootstrap_rates, confusion
from duplication.modalities.grapheme.processing import parse_algorithms
from duplication.run_config import RunConfig
from duplication.services.classifier import classify_labeled_pairs

logger = logging.getLogger(__name__)


def cmd_evaluate(config: RunConfig) -> dict:
    """Compare grapheme algorithms, calibrate the semantic threshold and score the cascade on labeled pairs."""
    require(config, "pairs")
    pairs = load_labeled_pairs(config.pairs, length_filter=config.length_filter, min_letters=config.min_letters)
    store = load_embeddings(config.embeddings) if config.embeddings else load_inline_embeddings(config.pairs)
    algorithms = parse_algorithms(config.algorithms)
    has_vectors = len(store) > 0
    table = pair_distances(pairs, store if has_vectors else None, algorithms)
    write_table(table, config, "distances.csv")

    bootstrap = {"n_resamples": config.n_resamples, "level": config.ci_level, "seed": config.seed}
    comparison, curves = compare_grapheme_algorithms(table, algorithms, resolution=config.resolution, **bootstrap)
    rate_bars = {}
    report_algorithms = {}
    for row in comparison.to_dict(orient="records"):
        name = row.pop("algorithm")
        if not row["defined"]:
            report_algorithms[name] = {"defined": False, "positives": int(row["positives"]), "negatives": int(row["negatives"])}
            continue
        subset = table[table["truth"].isin([Truth.COPY_PASTA.value, Truth.REWORDING.value]) & table[name].notna()]
        scores = zip(subset[name], subset["truth"] == Truth.COPY_PASTA.value)
        rate_bars[name] = bootstrap_rates(scores, row["threshold"], config.n_resamples, config.ci_level, config.seed)
        report_algorithms[name] = {**row, "rates": rate_bars[name], "roc": curves[name].to_record()}
    write_table(comparison, config, "algorithm_comparison.csv")

    report = {
        "pairs": dict(sorted(Counter(p.truth.value for p in pairs).items())),
        "algorithms": report_algorithms,
        "thresholds": config.thresholds().as_dict(),
    }
    if has_vectors:
        semantic, semantic_curve = calibrate_semantic(table, resolution=config.resolution, **bootstrap)
        report["semantic"] = {**semantic, "roc": semantic_curve.to_record()}
        verdicts = classify_labeled_pairs(
            pairs, store, config.thresholds(), require_semantic_for_copypasta=config.require_semantic_for_copypasta
        )
        matrix = confusion(
            [(v.pair, v.label.value) for v in verdicts],
            [(p.key, p.truth.label.value) for p in pairs],
        )
        report["confusion"] = matrix.to_record()
        write_figure(plot_delta_space(table, algorithms[0].value), config, "delta_space")

    write_json(report, config.output("evaluation_report.json"))
    write_figure(plot_roc(curves, rate_bars), config, "roc")
    return report


__all__ = ["cmd_evaluate"]
