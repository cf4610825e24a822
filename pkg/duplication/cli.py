"""Command-line entry point: preprocess, embed, classify, graph, eval, bench, synth."""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Callable, Sequence

from duplication.commands.bench import cmd_bench
from duplication.commands.classify import cmd_classify
from duplication.commands.embed import cmd_embed
from duplication.commands.evaluate import cmd_evaluate
from duplication.commands.graph import cmd_graph
from duplication.commands.preprocess import cmd_preprocess
from duplication.commands.synth import cmd_synth
from duplication.config import GRAPH_FORMATS, GRAPHEME_ALGORITHMS, THRESHOLD_PRESETS
from duplication.data_access.embedding_files import EMBEDDING_FORMATS
from duplication.data_access.files import INPUT_FORMATS
from duplication.errors import DuplicationError
from duplication.modalities.language.processing import LANGUAGE_SOURCES
from duplication.run_config import RunConfig, resolve_run_config, write_run_config

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
EXIT_OK, EXIT_ERROR = 0, 1

COMMANDS: dict[str, Callable[[RunConfig], dict]] = {
    "preprocess": cmd_preprocess,
    "embed": cmd_embed,
    "classify": cmd_classify,
    "graph": cmd_graph,
    "eval": cmd_evaluate,
    "bench": cmd_bench,
    "synth": cmd_synth,
}


#################### Argument types ####################

def _choice_list(choices: Sequence[str]) -> Callable[[str], list[str]]:
    def parse(text: str) -> list[str]:
        items = [item.strip() for item in text.split(",") if item.strip()]
        unknown = [item for item in items if item not in choices]
        if unknown or not items:
            raise argparse.ArgumentTypeError(f"expected a comma list of {', '.join(choices)}, got {text!r}")
        return items

    return parse


def _language_threshold(text: str) -> tuple[str, float]:
    lang, sep, value = text.partition("=")
    try:
        if not sep or not lang:
            raise ValueError
        return lang.strip().lower(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LANG=VALUE, got {text!r}") from None


#################### Parser ####################

def _option(parser: argparse.ArgumentParser, *flags: str, **kwargs) -> None:
    # absent options stay absent, so the JSON config file can fill them
    parser.add_argument(*flags, default=argparse.SUPPRESS, **kwargs)


def _threshold_options(parser: argparse.ArgumentParser) -> None:
    _option(parser, "--preset", choices=sorted(THRESHOLD_PRESETS), help="threshold preset (default synthetic)")
    _option(parser, "--tau-p", type=float, help="grapheme threshold")
    _option(parser, "--tau-s", type=float, help="semantic threshold")
    _option(parser, "--tau-l", type=float, help="language threshold")
    _option(parser, "--algorithm", dest="grapheme_algorithm", choices=GRAPHEME_ALGORITHMS)
    _option(parser, "--tau-p-lang", dest="tau_p_by_language", type=_language_threshold, action="append",
            metavar="LANG=VALUE", help="grapheme threshold for pairs sharing LANG (repeatable)")
    _option(parser, "--require-semantic-for-copypasta", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="JSON run configuration (flags override it)")
    common.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    _option(common, "--output-dir", help="directory for all artifacts (default out)")
    _option(common, "--seed", type=int)
    _option(common, "--workers", type=int)
    _option(common, "--figures", action="store_true", help="also write plotly figure specs")

    parser = argparse.ArgumentParser(prog="duplication", description="Detect Copy-Pasta, Rewording and Translation across accounts.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", parents=[common], help="ingest, normalize and filter a dataset")
    _option(p, "--input")
    _option(p, "--format", dest="input_format", choices=INPUT_FORMATS)
    _option(p, "--strict", action="store_true", help="fail on the first malformed record")
    _option(p, "--min-letters", type=int)
    _option(p, "--language-source", choices=LANGUAGE_SOURCES)
    _option(p, "--language-tool", help="command reading JSONL {id,text} and writing JSONL {id,lang}")
    _option(p, "--language-url")

    p = sub.add_parser("embed", parents=[common], help="fetch embeddings from an HTTP service")
    _option(p, "--corpus")
    _option(p, "--embedding-url")
    _option(p, "--embedding-model")
    _option(p, "--embedding-token-env")
    _option(p, "--embedding-batch-size", type=int)
    _option(p, "--embedding-concurrency", type=int)
    _option(p, "--embedding-format", choices=EMBEDDING_FORMATS)

    p = sub.add_parser("classify", parents=[common], help="classify every cross-account pair")
    _option(p, "--corpus")
    _option(p, "--embeddings")
    _threshold_options(p)
    _option(p, "--emit-nomatch", action="store_true")
    _option(p, "--no-prune", dest="prune", action="store_false")

    p = sub.add_parser("graph", parents=[common], help="aggregate verdicts into graphs and reports")
    _option(p, "--verdicts")
    _option(p, "--corpus")
    _option(p, "--themes", help="JSON {theme: [keywords]}")
    _option(p, "--stage-report", help="preprocess stage_report.json to extend with the duplicates row")
    _option(p, "--project-accounts", action="store_true")
    _option(p, "--component-account-linkage", action="store_true")
    _option(p, "--formats", dest="graph_formats", type=_choice_list(GRAPH_FORMATS))

    p = sub.add_parser("eval", parents=[common], help="evaluate on labeled pairs")
    _option(p, "--pairs")
    _option(p, "--embeddings")
    _option(p, "--algorithms", type=_choice_list(GRAPHEME_ALGORITHMS))
    _option(p, "--resolution", type=int)
    _option(p, "--n-resamples", type=int)
    _option(p, "--ci-level", type=float)
    _option(p, "--length-filter", action="store_true")
    _option(p, "--min-letters", type=int)
    _threshold_options(p)

    p = sub.add_parser("bench", parents=[common], help="time grapheme kernels on one worker")
    _option(p, "--corpus")
    _option(p, "--algorithms", type=_choice_list(GRAPHEME_ALGORITHMS))

    p = sub.add_parser("synth", parents=[common], help="write a scripted synthetic fixture")
    _option(p, "--n-seeds", type=int)
    _option(p, "--variants", type=int)
    _option(p, "--n-controls", type=int)
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(level=getattr(logging, level), format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: Sequence[str] | None = None) -> int:
    """Run one command; returns 0 on success and 1 on data or runtime errors.

    Usage errors exit with status 2 through argparse.
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    explicit = {k: v for k, v in vars(args).items() if k not in {"config", "log_level"}}
    if "tau_p_by_language" in explicit:
        explicit["tau_p_by_language"] = dict(explicit["tau_p_by_language"])
    try:
        config = resolve_run_config(explicit, args.config)
        write_run_config(config)
        COMMANDS[config.command](config)
    except (DuplicationError, OSError, ValueError) as exc:
        logger.error("[CLI] %s failed: %s", args.command, exc)
        return EXIT_ERROR
    return EXIT_OK


__all__ = ["COMMANDS", "build_parser", "configure_logging", "main"]
