from __future__ import annotations

import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Mapping

import networkx as nx
import pandas as pd
import regex

from duplication.config import DEFAULT_THEMES, UNLABELED_THEME
from duplication.corpus.models import Corpus, Stage
from duplication.errors import ConfigError, UnresolvableMessageError
from duplication.services.classifier import MATCH_LABELS, Label, PairVerdict

logger = logging.getLogger(__name__)

HASHTAG_PATTERN = regex.compile(r"#[\p{L}\p{N}_]+")
ACCOUNT_LINKAGES = ("pair", "component")
STAGE_DUPLICATES = "duplicates"
METHODS = tuple(label.value for label in MATCH_LABELS)


#################### Graph construction ####################

def build_message_graph(verdicts: Iterable[PairVerdict]) -> nx.Graph:
    """Message graph: nodes are messages in at least one match, edges carry `label`."""
    edges = sorted((v.pair.first_id, v.pair.second_id, v.label.value) for v in verdicts if v.is_match)
    graph = nx.Graph(kind="message")
    graph.add_nodes_from(sorted({node for a, b, _ in edges for node in (a, b)}))
    for a, b, label in edges:
        graph.add_edge(a, b, label=label)
    logger.info("[GRAPH] message graph: %d nodes, %d edges", graph.number_of_nodes(), graph.number_of_edges())
    return graph


def connected_components(graph: nx.Graph, labels: Iterable[str | Label] | None = None) -> list[list[str]]:
    """Components as sorted id lists, largest first, ties by smallest contained id.

    With `labels`, only edges carrying one of them count and nodes left without
    such an edge are dropped.
    """
    if labels is not None:
        keep = {Label(label).value for label in labels}
        graph = graph.edge_subgraph([(a, b) for a, b, lab in graph.edges(data="label") if lab in keep])
    components = [sorted(nodes) for nodes in nx.connected_components(graph)]
    return sorted(components, key=lambda nodes: (-len(nodes), nodes[0]))


def _owners(nodes: Iterable[str], corpus: Corpus) -> dict[str, str]:
    by_id = corpus.by_id()
    nodes = list(nodes)
    unresolved = [node for node in nodes if node not in by_id]
    if unresolved:
        raise UnresolvableMessageError(unresolved, "message ids absent from the corpus")
    return {node: by_id[node].account_id for node in nodes}


def project_accounts(graph: nx.Graph, corpus: Corpus, linkage: str = "pair") -> nx.Graph:
    """Account graph with `weight` edges and per-method edge counts.

    Parameters
    ----------
    graph: nx.Graph
        Message graph from `build_message_graph`.
    corpus: Corpus
        Resolves message ids to accounts.
    linkage: str
        `pair`: one unit of weight per message edge between the two owners.
        `component`: accounts are linked when they share a duplicate component;
        the weight counts the shared components.

    Returns
    -------
    nx.Graph
        Nodes are account ids; no self-loops.
    """
    if linkage not in ACCOUNT_LINKAGES:
        raise ConfigError(f"unknown account linkage {linkage!r}; expected one of {ACCOUNT_LINKAGES}")
    owner = _owners(graph.nodes, corpus)
    weights: Counter = Counter()
    methods: dict[tuple[str, str], Counter] = defaultdict(Counter)

    if linkage == "pair":
        for a, b, label in graph.edges(data="label"):
            u, v = sorted((owner[a], owner[b]))
            if u == v:
                continue
            weights[(u, v)] += 1
            methods[(u, v)][label] += 1
    else:
        for component in connected_components(graph):
            sub = graph.subgraph(component)
            accounts = sorted({owner[node] for node in component})
            component_methods = Counter(label for _, _, label in sub.edges(data="label"))
            for u, v in combinations(accounts, 2):
                weights[(u, v)] += 1
                methods[(u, v)].update(component_methods)

    accounts_graph = nx.Graph(kind="account", linkage=linkage)
    accounts_graph.add_nodes_from(sorted({owner[node] for node in graph.nodes}))
    for (u, v), weight in sorted(weights.items()):
        attrs = {method: int(methods[(u, v)].get(method, 0)) for method in METHODS}
        accounts_graph.add_edge(u, v, weight=int(weight), **attrs)
    logger.info(
        "[GRAPH] account graph (%s linkage): %d accounts, %d edges",
        linkage, accounts_graph.number_of_nodes(), accounts_graph.number_of_edges(),
    )
    return accounts_graph


#################### Method mix ####################

def method_mix(verdicts: Iterable[PairVerdict], corpus: Corpus) -> pd.DataFrame:
    """Per-account share of Copy-Pasta / Rewording / Translation participations.

    Each matched pair counts once for each of its two accounts. Accounts with
    no duplicates are omitted. Columns: account_id, copy_pasta, rewording,
    translation (fractions summing to 1) and total.
    """
    matches = [v for v in verdicts if v.is_match]
    owner = _owners({m for v in matches for m in (v.pair.first_id, v.pair.second_id)}, corpus)
    tallies: dict[str, Counter] = defaultdict(Counter)
    for verdict in matches:
        for message_id in (verdict.pair.first_id, verdict.pair.second_id):
            tallies[owner[message_id]][verdict.label.value] += 1

    records = []
    for account in sorted(tallies):
        total = sum(tallies[account].values())
        row = {"account_id": account}
        row.update({method: tallies[account][method] / total for method in METHODS})
        row["total"] = total
        records.append(row)
    return pd.DataFrame.from_records(records, columns=["account_id", *METHODS, "total"])


#################### Themes ####################

@dataclass(frozen=True)
class ThemeMap:
    """Ordered themes with case-insensitive keywords; the first matching theme wins."""

    themes: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self) -> None:
        owner: dict[str, str] = {}
        for name, keywords in self.themes:
            if name == UNLABELED_THEME:
                raise ConfigError(f"theme name {UNLABELED_THEME!r} is reserved")
            if not keywords:
                raise ConfigError(f"theme {name!r} has no keywords")
            for keyword in keywords:
                key = keyword.casefold()
                if key in owner and owner[key] != name:
                    raise ConfigError(f"keyword {keyword!r} appears in themes {owner[key]!r} and {name!r}")
                owner[key] = name

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Iterable[str]]) -> ThemeMap:
        return cls(tuple((str(name), tuple(str(k) for k in keywords)) for name, keywords in mapping.items()))

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.themes]

    def match(self, text: str) -> str:
        folded = text.casefold()
        for name, keywords in self.themes:
            if any(keyword.casefold() in folded for keyword in keywords):
                return name
        return UNLABELED_THEME


def default_theme_map() -> ThemeMap:
    return ThemeMap.from_mapping(DEFAULT_THEMES)


def load_theme_map(path: str | Path) -> ThemeMap:
    """Read a JSON object {theme: [keywords]}; key order is the matching order."""
    try:
        mapping = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read theme map {path}: {exc}") from exc
    if not isinstance(mapping, dict) or not all(isinstance(v, list) for v in mapping.values()):
        raise ConfigError(f"theme map {path} must be a JSON object of keyword lists")
    return ThemeMap.from_mapping(mapping)


def label_themes(corpus: Corpus, themes: ThemeMap) -> dict[str, str]:
    """Message id -> first theme with a keyword in `semantic_text`, else "unlabeled"."""
    labels = {m.id: themes.match(m.semantic_text) for m in corpus.messages}
    logger.info("[GRAPH] themes labeled %.1f%% of %d messages", 100 * labeled_share(labels), len(labels))
    return labels


def labeled_share(labels: Mapping[str, str]) -> float:
    if not labels:
        return 0.0
    return sum(theme != UNLABELED_THEME for theme in labels.values()) / len(labels)


#################### Reports ####################

def hashtags(text: str) -> list[str]:
    """Distinct casefolded hashtags in order of appearance."""
    return list(dict.fromkeys(tag.casefold() for tag in HASHTAG_PATTERN.findall(text)))


def _top(counter: Counter, top: int) -> list[tuple[str, int]]:
    return sorted(counter.items(), key=lambda item: (-item[1], item[0]))[:top]


def component_report(graph: nx.Graph, corpus: Corpus, top: int = 3) -> list[dict]:
    """Per component: size, accounts, label histogram and the most represented hashtags and languages."""
    by_id = corpus.by_id()
    _owners(graph.nodes, corpus)
    report = []
    for index, component in enumerate(connected_components(graph)):
        sub = graph.subgraph(component)
        tags: Counter = Counter()
        languages: Counter = Counter()
        for node in component:
            tags.update(hashtags(by_id[node].semantic_text))
            languages[by_id[node].language] += 1
        histogram = Counter(label for _, _, label in sub.edges(data="label"))
        report.append(
            {
                "component": index,
                "size": len(component),
                "accounts": len({by_id[node].account_id for node in component}),
                "label_histogram": {method: histogram.get(method, 0) for method in METHODS},
                "top_hashtags": [[tag, n] for tag, n in _top(tags, top)],
                "top_languages": [[lang, n] for lang, n in _top(languages, top)],
            }
        )
    return report


def method_breakdown(graph: nx.Graph, corpus: Corpus, top: int = 3) -> pd.DataFrame:
    """Per duplication method, the top hashtags and languages among the messages it touches.

    Long format: method, kind (hashtag | language), rank, value, count, share,
    where share is relative to the method's message count.
    """
    by_id = corpus.by_id()
    _owners(graph.nodes, corpus)
    records = []
    for method in METHODS:
        touched = sorted({node for a, b, label in graph.edges(data="label") if label == method for node in (a, b)})
        if not touched:
            continue
        tags: Counter = Counter()
        languages: Counter = Counter(by_id[node].language for node in touched)
        for node in touched:
            tags.update(hashtags(by_id[node].semantic_text))
        for kind, counter in (("hashtag", tags), ("language", languages)):
            for rank, (value, count) in enumerate(_top(counter, top), start=1):
                records.append(
                    {
                        "method": method,
                        "kind": kind,
                        "rank": rank,
                        "value": value,
                        "count": count,
                        "share": count / len(touched),
                        "messages": len(touched),
                    }
                )
    return pd.DataFrame.from_records(records, columns=["method", "kind", "rank", "value", "count", "share", "messages"])


def duplicates_stage(graph: nx.Graph, corpus: Corpus) -> Stage:
    """The final staging row: messages in any match and the accounts that posted them."""
    owner = _owners(graph.nodes, corpus)
    return Stage(name=STAGE_DUPLICATES, users=len(set(owner.values())), messages=graph.number_of_nodes())


def account_clusters(account_graph: nx.Graph) -> dict[str, str]:
    """Account id -> "cluster_<n>", numbered by `connected_components` order."""
    return {
        account: f"cluster_{index}"
        for index, component in enumerate(connected_components(account_graph))
        for account in component
    }


def sunburst_frame(
    graph: nx.Graph,
    corpus: Corpus,
    themes_by_id: Mapping[str, str],
    account_graph: nx.Graph,
) -> pd.DataFrame:
    """Counts of messages per (account cluster, method, theme).

    A message counts once for every distinct method among its edges.
    """
    owner = _owners(graph.nodes, corpus)
    clusters = account_clusters(account_graph)
    counts: Counter = Counter()
    for node in graph.nodes:
        methods = {label for _, _, label in graph.edges(node, data="label")}
        cluster = clusters.get(owner[node], "unclustered")
        for method in methods:
            counts[(cluster, method, themes_by_id.get(node, UNLABELED_THEME))] += 1
    records = [
        {"cluster": c, "method": m, "theme": t, "count": n}
        for (c, m, t), n in sorted(counts.items())
    ]
    return pd.DataFrame.from_records(records, columns=["cluster", "method", "theme", "count"])


def annotate_nodes(graph: nx.Graph, corpus: Corpus, themes_by_id: Mapping[str, str] | None = None) -> nx.Graph:
    """Copy of the message graph with `account`, `lang` and (optionally) `theme` node attributes."""
    by_id = corpus.by_id()
    _owners(graph.nodes, corpus)
    annotated = graph.copy()
    for node in annotated.nodes:
        annotated.nodes[node]["account"] = by_id[node].account_id
        annotated.nodes[node]["lang"] = by_id[node].language
        if themes_by_id is not None:
            annotated.nodes[node]["theme"] = themes_by_id.get(node, UNLABELED_THEME)
    return annotated


__all__ = [
    "ACCOUNT_LINKAGES",
    "STAGE_DUPLICATES",
    "METHODS",
    "build_message_graph",
    "connected_components",
    "project_accounts",
    "method_mix",
    "ThemeMap",
    "default_theme_map",
    "load_theme_map",
    "label_themes",
    "labeled_share",
    "hashtags",
    "component_report",
    "method_breakdown",
    "duplicates_stage",
    "account_clusters",
    "sunburst_frame",
    "annotate_nodes",
]
