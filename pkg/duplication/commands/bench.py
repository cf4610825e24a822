from __future__ import annotations

from duplication.commands.artifacts import require, write_table
from duplication.data_access.corpus_files import read_corpus
from duplication.data_access.files import write_json
from duplication.evaluation.benchmark import bench_grapheme, bench_report
from duplication.modalities.grapheme.processing import parse_algorithms
from duplication.run_config import RunConfig


def cmd_bench(config: RunConfig) -> dict:
    require(config, "corpus")
    table = bench_grapheme(read_corpus(config.corpus), parse_algorithms(config.algorithms))
    write_table(table, config, "bench.csv")
    report = bench_report(table)
    write_json(report, config.output("bench_report.json"))
    return report


__all__ = ["cmd_bench"]
