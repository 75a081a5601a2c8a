"""Weighted graph container shared by the citation and semantic layers.

Node ids are opaque strings mapped to dense integers on insertion. Inserting
an edge that already exists adds to its weight instead of replacing it, so
co-occurrence counting can be written as repeated ``add_edge`` calls.
"""
from __future__ import annotations

import csv
import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping

import numpy as np

from . import __version__
from ._meta import header_lines, read_header_params, strip_comments

FORMATS = ("gexf", "graphml", "edge-csv")
GEXF_NS = "http://www.gexf.net/1.2draft"
GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


class GraphError(ValueError):
    pass


class Graph:
    def __init__(self, directed: bool = False):
        self.directed = directed
        self.meta: dict[str, Any] = {}
        self._ids: list[str] = []
        self._index: dict[str, int] = {}
        self._labels: list[str] = []
        self._attrs: list[dict[str, Any]] = []
        self._succ: list[dict[int, float]] = []
        self._pred: list[dict[int, float]] = []
        self._num_edges = 0

    # -- construction -------------------------------------------------------

    def add_node(self, node: str, label: str | None = None, **attrs: Any) -> int:
        node = str(node)
        i = self._index.get(node)
        if i is None:
            i = len(self._ids)
            self._index[node] = i
            self._ids.append(node)
            self._labels.append(node if label is None else label)
            self._attrs.append({})
            succ: dict[int, float] = {}
            self._succ.append(succ)
            self._pred.append({} if self.directed else succ)
        elif label is not None:
            self._labels[i] = label
        self._attrs[i].update(attrs)
        return i

    def add_edge(self, u: str, v: str, weight: float = 1.0) -> None:
        if not (weight > 0 and math.isfinite(weight)):
            raise GraphError(f"edge weight must be positive and finite, got {weight!r}")
        if u == v:
            raise GraphError(f"self-loop on {u!r} not allowed")
        i = self.add_node(u)
        j = self.add_node(v)
        succ = self._succ[i]
        if j in succ:
            succ[j] += weight
            if self.directed:
                self._pred[j][i] += weight
            else:
                self._succ[j][i] = succ[j]
        else:
            succ[j] = weight
            if self.directed:
                self._pred[j][i] = weight
            else:
                self._succ[j][i] = weight
            self._num_edges += 1

    def set_attr(self, node: str, key: str, value: Any) -> None:
        self._attrs[self.index(node)][key] = value

    # -- queries ------------------------------------------------------------

    @property
    def nodes(self) -> list[str]:
        return list(self._ids)

    def number_of_nodes(self) -> int:
        return len(self._ids)

    def number_of_edges(self) -> int:
        return self._num_edges

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, node: object) -> bool:
        return node in self._index

    def index(self, node: str) -> int:
        try:
            return self._index[node]
        except KeyError:
            raise GraphError(f"unknown node {node!r}") from None

    def node_id(self, i: int) -> str:
        return self._ids[i]

    def label(self, node: str) -> str:
        return self._labels[self.index(node)]

    def attrs(self, node: str) -> dict[str, Any]:
        return dict(self._attrs[self.index(node)])

    def has_edge(self, u: str, v: str) -> bool:
        return u in self._index and v in self._index and self._index[v] in self._succ[self._index[u]]

    def weight(self, u: str, v: str) -> float:
        return self._succ[self.index(u)].get(self.index(v), 0.0)

    def edges(self) -> Iterator[tuple[str, str, float]]:
        """Edges in insertion order of their source node; undirected edges once."""
        for i, succ in enumerate(self._succ):
            for j in sorted(succ):
                if self.directed or i < j:
                    yield self._ids[i], self._ids[j], succ[j]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        src, dst, w = [], [], []
        for i, succ in enumerate(self._succ):
            for j, wt in succ.items():
                if self.directed or i < j:
                    src.append(i)
                    dst.append(j)
                    w.append(wt)
        return (np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64),
                np.asarray(w, dtype=float))

    def successors(self, node: str) -> list[str]:
        return [self._ids[j] for j in sorted(self._succ[self.index(node)])]

    def predecessors(self, node: str) -> list[str]:
        return [self._ids[j] for j in sorted(self._pred[self.index(node)])]

    def neighbors(self, node: str) -> list[str]:
        i = self.index(node)
        nbrs = set(self._succ[i]) | set(self._pred[i])
        return [self._ids[j] for j in sorted(nbrs)]

    def degree(self, node: str, mode: str = "total", weighted: bool = False) -> float:
        """Unweighted degree as an int, weighted degree (strength) as a float.

        ``in``/``out`` only exist for directed graphs; ``total`` is in + out
        there and the neighbour count for undirected graphs.
        """
        i = self.index(node)
        if mode not in ("in", "out", "total"):
            raise GraphError(f"unknown degree mode {mode!r}")
        if mode != "total" and not self.directed:
            raise GraphError(f"{mode}-degree is undefined on an undirected graph")
        parts = []
        if mode in ("out", "total"):
            parts.append(self._succ[i])
        if mode in ("in", "total") and self.directed:
            parts.append(self._pred[i])
        if weighted:
            return float(sum(sum(p.values()) for p in parts))
        return sum(len(p) for p in parts)

    def in_degrees(self) -> np.ndarray:
        return np.array([len(p) for p in self._pred], dtype=np.int64)

    def out_degrees(self) -> np.ndarray:
        return np.array([len(s) for s in self._succ], dtype=np.int64)

    # -- derived graphs -----------------------------------------------------

    def subgraph(self, nodes: Iterable[str]) -> "Graph":
        keep = {self.index(n) for n in nodes}
        sub = Graph(self.directed)
        sub.meta = dict(self.meta)
        for i in sorted(keep):
            sub.add_node(self._ids[i], self._labels[i], **self._attrs[i])
        for i in sorted(keep):
            for j in sorted(self._succ[i]):
                if j in keep and (self.directed or i < j):
                    sub.add_edge(self._ids[i], self._ids[j], self._succ[i][j])
        return sub

    def to_undirected(self) -> "Graph":
        """Symmetrize: the undirected weight is the sum of both directions."""
        g = Graph(directed=False)
        g.meta = dict(self.meta)
        for i, node in enumerate(self._ids):
            g.add_node(node, self._labels[i], **self._attrs[i])
        for u, v, w in self.edges():
            g.add_edge(u, v, w)
        return g


@dataclass
class Partition:
    """Total node -> community assignment with dense ids 0..C-1."""

    assignment: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        labels = set(self.assignment.values())
        if labels != set(range(len(labels))):
            raise GraphError("community ids must be dense in 0..C-1")

    @classmethod
    def from_labels(cls, mapping: Mapping[str, Any]) -> "Partition":
        """Relabel arbitrary community labels densely, by first appearance in sorted node order."""
        dense: dict[Any, int] = {}
        out = {}
        for node in sorted(mapping):
            out[node] = dense.setdefault(mapping[node], len(dense))
        return cls(out)

    @property
    def num_communities(self) -> int:
        return len(set(self.assignment.values()))

    def sizes(self) -> list[int]:
        counts = [0] * self.num_communities
        for c in self.assignment.values():
            counts[c] += 1
        return counts

    def members(self) -> list[list[str]]:
        groups: list[list[str]] = [[] for _ in range(self.num_communities)]
        for node in sorted(self.assignment):
            groups[self.assignment[node]].append(node)
        return groups

    def __getitem__(self, node: str) -> int:
        return self.assignment[node]

    def __contains__(self, node: object) -> bool:
        return node in self.assignment

    def __len__(self) -> int:
        return len(self.assignment)

    def check_total(self, graph: Graph) -> None:
        for node in graph.nodes:
            if node not in self.assignment:
                raise GraphError(f"partition does not assign node {node!r}")


def degree(graph: Graph, node: str, mode: str = "total", weighted: bool = False) -> float:
    return graph.degree(node, mode, weighted)


# -- export / import ---------------------------------------------------------

def _attr_type(values: list[Any], gexf: bool) -> str:
    kinds = {type(v) for v in values}
    if kinds <= {bool}:
        return "boolean"
    if kinds <= {int}:
        return "integer" if gexf else "long"
    if kinds <= {int, float}:
        return "double"
    return "string"


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(value: str, kind: str) -> Any:
    if kind == "boolean":
        return value.lower() == "true"
    if kind in ("integer", "long", "int"):
        return int(value)
    if kind in ("double", "float"):
        return float(value)
    return value


def _xml_comment(seed, params) -> str:
    text = " | ".join(line[2:] for line in header_lines(seed, params))
    return "<!-- " + text.replace("--", "- -") + " -->\n"


def _node_attrs(graph: Graph, i: int, partition: Partition | None) -> dict[str, Any]:
    attrs = {k: v for k, v in graph._attrs[i].items() if v is not None}
    if partition is not None:
        attrs["community"] = partition[graph._ids[i]]
    return attrs


def _schema(graph: Graph, partition: Partition | None, gexf: bool) -> list[tuple[str, str]]:
    values: dict[str, list[Any]] = {}
    for i in range(len(graph)):
        for k, v in _node_attrs(graph, i, partition).items():
            values.setdefault(k, []).append(v)
    return [(k, _attr_type(values[k], gexf)) for k in sorted(values)]


def _write_gexf(graph: Graph, partition, path: Path, seed, params) -> None:
    root = ET.Element("gexf", {"xmlns": GEXF_NS, "version": "1.2"})
    meta = ET.SubElement(root, "meta")
    ET.SubElement(meta, "creator").text = f"scholnet {__version__}"
    if graph.meta:
        ET.SubElement(meta, "description").text = json.dumps(graph.meta, sort_keys=True, default=str)
    g = ET.SubElement(root, "graph", {
        "defaultedgetype": "directed" if graph.directed else "undirected", "mode": "static"})
    schema = _schema(graph, partition, gexf=True)
    ids = {k: str(n) for n, (k, _) in enumerate(schema)}
    if schema:
        attrs_el = ET.SubElement(g, "attributes", {"class": "node"})
        for k, kind in schema:
            ET.SubElement(attrs_el, "attribute", {"id": ids[k], "title": k, "type": kind})
    nodes_el = ET.SubElement(g, "nodes")
    for i, node in enumerate(graph._ids):
        n_el = ET.SubElement(nodes_el, "node", {"id": node, "label": graph._labels[i]})
        attrs = _node_attrs(graph, i, partition)
        if attrs:
            av = ET.SubElement(n_el, "attvalues")
            for k, _ in schema:
                if k in attrs:
                    ET.SubElement(av, "attvalue", {"for": ids[k], "value": _fmt(attrs[k])})
    edges_el = ET.SubElement(g, "edges")
    for n, (u, v, w) in enumerate(graph.edges()):
        ET.SubElement(edges_el, "edge", {"id": str(n), "source": u, "target": v, "weight": repr(float(w))})
    _write_xml(root, path, seed, params)


def _write_graphml(graph: Graph, partition, path: Path, seed, params) -> None:
    root = ET.Element("graphml", {"xmlns": GRAPHML_NS})
    schema = _schema(graph, partition, gexf=False)
    ET.SubElement(root, "key", {"id": "label", "for": "node", "attr.name": "label", "attr.type": "string"})
    for k, kind in schema:
        ET.SubElement(root, "key", {"id": f"n_{k}", "for": "node", "attr.name": k, "attr.type": kind})
    ET.SubElement(root, "key", {"id": "weight", "for": "edge", "attr.name": "weight", "attr.type": "double"})
    g = ET.SubElement(root, "graph", {"id": "G", "edgedefault": "directed" if graph.directed else "undirected"})
    if graph.meta:
        ET.SubElement(g, "desc").text = json.dumps(graph.meta, sort_keys=True, default=str)
    for i, node in enumerate(graph._ids):
        n_el = ET.SubElement(g, "node", {"id": node})
        ET.SubElement(n_el, "data", {"key": "label"}).text = graph._labels[i]
        attrs = _node_attrs(graph, i, partition)
        for k, _ in schema:
            if k in attrs:
                ET.SubElement(n_el, "data", {"key": f"n_{k}"}).text = _fmt(attrs[k])
    for u, v, w in graph.edges():
        e_el = ET.SubElement(g, "edge", {"source": u, "target": v})
        ET.SubElement(e_el, "data", {"key": "weight"}).text = repr(float(w))
    _write_xml(root, path, seed, params)


def _write_xml(root: ET.Element, path: Path, seed, params) -> None:
    ET.indent(root)
    body = ET.tostring(root, encoding="unicode")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write('<?xml version="1.0" encoding="UTF-8"?>\n')
        fh.write(_xml_comment(seed, params))
        fh.write(body + "\n")


def _write_edge_csv(graph: Graph, path: Path, seed, params) -> None:
    params = dict(params or {}, directed=graph.directed)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines(seed, params):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source", "target", "weight"])
        for u, v, w in graph.edges():
            writer.writerow([u, v, repr(float(w))])


def export(graph: Graph, path, fmt: str | None = None, partition: Partition | None = None,
           seed: int | None = None, params: dict | None = None) -> Path:
    """Write ``graph`` as GEXF 1.2, GraphML or an edge CSV.

    With a partition every node gets a ``community`` attribute (edge CSV
    carries no node attributes and ignores it).
    """
    path = Path(path)
    fmt = fmt or _guess_format(path)
    if partition is not None:
        partition.check_total(graph)
    if fmt == "gexf":
        _write_gexf(graph, partition, path, seed, params)
    elif fmt == "graphml":
        _write_graphml(graph, partition, path, seed, params)
    elif fmt == "edge-csv":
        _write_edge_csv(graph, path, seed, params)
    else:
        raise GraphError(f"unknown graph format {fmt!r}; expected one of {FORMATS}")
    return path


def _guess_format(path: Path) -> str:
    suffix = path.suffix.lower()
    return {".gexf": "gexf", ".graphml": "graphml", ".csv": "edge-csv"}.get(suffix, "gexf")


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _children(el: ET.Element, name: str) -> list[ET.Element]:
    return [c for c in el if _local(c.tag) == name]


def _read_gexf(path: Path) -> Graph:
    root = ET.parse(path).getroot()
    (g_el,) = _children(root, "graph")
    graph = Graph(directed=g_el.get("defaultedgetype", "undirected") == "directed")
    for meta in _children(root, "meta"):
        for desc in _children(meta, "description"):
            if desc.text:
                graph.meta = json.loads(desc.text)
    kinds: dict[str, tuple[str, str]] = {}
    for attrs_el in _children(g_el, "attributes"):
        if attrs_el.get("class") == "node":
            for a in _children(attrs_el, "attribute"):
                kinds[a.get("id")] = (a.get("title"), a.get("type", "string"))
    for nodes_el in _children(g_el, "nodes"):
        for n_el in _children(nodes_el, "node"):
            attrs = {}
            for av in _children(n_el, "attvalues"):
                for a in _children(av, "attvalue"):
                    title, kind = kinds[a.get("for")]
                    attrs[title] = _parse(a.get("value"), kind)
            graph.add_node(n_el.get("id"), n_el.get("label"), **attrs)
    for edges_el in _children(g_el, "edges"):
        for e_el in _children(edges_el, "edge"):
            graph.add_edge(e_el.get("source"), e_el.get("target"), float(e_el.get("weight", "1.0")))
    return graph


def _read_graphml(path: Path) -> Graph:
    root = ET.parse(path).getroot()
    keys = {k.get("id"): (k.get("attr.name"), k.get("attr.type", "string")) for k in _children(root, "key")}
    (g_el,) = _children(root, "graph")
    graph = Graph(directed=g_el.get("edgedefault") == "directed")
    for desc in _children(g_el, "desc"):
        if desc.text:
            graph.meta = json.loads(desc.text)
    for n_el in _children(g_el, "node"):
        label, attrs = None, {}
        for d in _children(n_el, "data"):
            name, kind = keys[d.get("key")]
            if name == "label":
                label = d.text or ""
            else:
                attrs[name] = _parse(d.text or "", kind)
        graph.add_node(n_el.get("id"), label, **attrs)
    for e_el in _children(g_el, "edge"):
        w = 1.0
        for d in _children(e_el, "data"):
            if keys[d.get("key")][0] == "weight":
                w = float(d.text)
        graph.add_edge(e_el.get("source"), e_el.get("target"), w)
    return graph


def _read_edge_csv(path: Path) -> Graph:
    directed = bool(read_header_params(path).get("directed", False))
    graph = Graph(directed=directed)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(strip_comments(fh))
        for row in reader:
            graph.add_edge(row["source"], row["target"], float(row.get("weight") or 1.0))
    return graph


def import_graph(path, fmt: str | None = None) -> Graph:
    path = Path(path)
    fmt = fmt or _guess_format(path)
    if fmt == "gexf":
        return _read_gexf(path)
    if fmt == "graphml":
        return _read_graphml(path)
    if fmt == "edge-csv":
        return _read_edge_csv(path)
    raise GraphError(f"unknown graph format {fmt!r}; expected one of {FORMATS}")


def partition_from_graph(graph: Graph, key: str = "community") -> Partition | None:
    """Recover a partition stored as a node attribute, if every node has one."""
    labels = {}
    for node in graph.nodes:
        value = graph._attrs[graph.index(node)].get(key)
        if value is None:
            return None
        labels[node] = value
    return Partition.from_labels(labels) if labels else None


def write_partition_csv(partition: Partition, path, seed=None, params=None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines(seed, params):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_id", "community"])
        for node in sorted(partition.assignment):
            writer.writerow([node, partition[node]])


def read_partition_csv(path) -> Partition:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(strip_comments(fh)))
    return Partition({r["node_id"]: int(r["community"]) for r in rows})
