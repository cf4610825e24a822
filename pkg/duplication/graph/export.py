"""Deterministic GraphML / DOT / JSONL serialization of duplication graphs."""
from __future__ import annotations

import json
import logging
import os
from pathlib import Path

import networkx as nx

from duplication.config import GRAPH_FORMATS
from duplication.data_access.files import iter_jsonl, write_jsonl
from duplication.errors import RecordError

logger = logging.getLogger(__name__)


def canonical_graph(graph: nx.Graph) -> nx.Graph:
    """Copy with nodes, edges and attribute keys inserted in sorted order."""
    out = nx.Graph()
    out.graph.update(sorted(graph.graph.items()))
    for node in sorted(graph.nodes):
        out.add_node(node, **dict(sorted(graph.nodes[node].items())))
    for a, b in sorted(tuple(sorted(edge)) for edge in graph.edges):
        out.add_edge(a, b, **dict(sorted(graph.edges[a, b].items())))
    return out


def _dot_id(value: object) -> str:
    text = str(value).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{text}"'


def _dot_attrs(attrs: dict) -> str:
    if not attrs:
        return ""
    return " [" + ", ".join(f"{key}={_dot_id(value)}" for key, value in attrs.items()) + "]"


def to_dot(graph: nx.Graph) -> str:
    """Undirected DOT text; account graphs get their weight as the edge label."""
    graph = canonical_graph(graph)
    name = graph.graph.get("kind", "duplication")
    lines = [f"graph {_dot_id(name)} {{"]
    for node, attrs in graph.nodes(data=True):
        lines.append(f"  {_dot_id(node)}{_dot_attrs(attrs)};")
    for a, b, attrs in graph.edges(data=True):
        attrs = dict(attrs)
        if "weight" in attrs and "label" not in attrs:
            attrs = {"label": attrs["weight"], **attrs}
        lines.append(f"  {_dot_id(a)} -- {_dot_id(b)}{_dot_attrs(attrs)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _jsonl_records(graph: nx.Graph):
    yield {"type": "graph", "attrs": dict(graph.graph)}
    for node, attrs in graph.nodes(data=True):
        yield {"type": "node", "id": node, "attrs": dict(attrs)}
    for a, b, attrs in graph.edges(data=True):
        yield {"type": "edge", "source": a, "target": b, "attrs": dict(attrs)}


def write_graph(graph: nx.Graph, path: str | Path, fmt: str) -> Path:
    """Write `graph` as graphml, dot or jsonl; reruns produce byte-identical files."""
    if fmt not in GRAPH_FORMATS:
        raise ValueError(f"unknown graph format {fmt!r}; expected one of {GRAPH_FORMATS}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    graph = canonical_graph(graph)
    if fmt == "jsonl":
        write_jsonl(_jsonl_records(graph), path)
    else:
        tmp = path.with_name(path.name + ".tmp")
        if fmt == "graphml":
            nx.write_graphml(graph, tmp, encoding="utf-8", prettyprint=True)
        else:
            tmp.write_text(to_dot(graph), encoding="utf-8")
        os.replace(tmp, path)
    logger.info("[GRAPH] wrote %s (%d nodes, %d edges)", path, graph.number_of_nodes(), graph.number_of_edges())
    return path


def read_jsonl_graph(path: str | Path) -> nx.Graph:
    graph = nx.Graph()
    for line_no, line in iter_jsonl(path):
        try:
            record = json.loads(line)
            kind = record["type"]
            if kind == "graph":
                graph.graph.update(record.get("attrs", {}))
            elif kind == "node":
                graph.add_node(record["id"], **record.get("attrs", {}))
            elif kind == "edge":
                graph.add_edge(record["source"], record["target"], **record.get("attrs", {}))
            else:
                raise KeyError(kind)
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise RecordError(line_no, f"bad graph record ({exc})") from exc
    return graph


__all__ = ["canonical_graph", "to_dot", "write_graph", "read_jsonl_graph"]
