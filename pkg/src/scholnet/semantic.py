"""Keyword co-occurrence network, its four-parameter filter and semantic communities."""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp

from .community import CommunityResult, louvain
from .graph import Graph
from .keywords.scoring import KeywordIndex

REFERENCE_SCALE_DOCS = 210_000
FILTER_ORDER = ("doc_freq_window", "min_edge_weight", "max_degree", "isolates")


@dataclass(frozen=True)
class FilterParams:
    k_max: int = 1200
    theta_w: int = 100
    f_min: int = 50
    f_max: int = 10_000

    def __post_init__(self):
        for name in ("k_max", "theta_w", "f_min", "f_max"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.f_min > self.f_max:
            raise ValueError(f"f_min={self.f_min} exceeds f_max={self.f_max}")

    @classmethod
    def scaled(cls, num_docs: int, reference_docs: int = REFERENCE_SCALE_DOCS) -> "FilterParams":
        """Default thresholds rescaled to a corpus of ``num_docs`` documents.

        The two lower bounds (edge weight, document frequency) are counts
        and shrink linearly with corpus size, floored at 1. The two caps are
        kept absolute, bounded by the corpus size for f_max, so a small
        corpus is not stripped of everything above a handful of documents.
        """
        d = cls()
        ratio = num_docs / reference_docs
        f_min = max(1, round(d.f_min * ratio))
        return cls(
            k_max=d.k_max,
            theta_w=max(1, round(d.theta_w * ratio)),
            f_min=f_min,
            f_max=max(f_min, min(d.f_max, num_docs)),
        )


@dataclass
class CooccurrenceMatrix:
    keys: list[str]
    counts: sp.csr_matrix
    doc_freq: np.ndarray

    def __len__(self) -> int:
        return len(self.keys)

    def get(self, a: str, b: str) -> int:
        i, j = self.keys.index(a), self.keys.index(b)
        return int(self.counts[i, j])


@dataclass
class SemanticCommunities:
    result: CommunityResult
    top_keywords: dict[int, list[str]]
    noise: set[int] = field(default_factory=set)


def build_cooccurrence(index: KeywordIndex) -> CooccurrenceMatrix:
    """Pair counts: number of documents containing both keywords; zero diagonal."""
    if not index.keywords:
        raise ValueError("keyword index is empty")
    keys = sorted(kw.key for kw in index.keywords)
    position = {k: i for i, k in enumerate(keys)}
    docs: dict[str, list[int]] = {}
    for kw in index.keywords:
        for d in index.postings[kw.stems]:
            docs.setdefault(d, []).append(position[kw.key])
    doc_ids = sorted(docs)
    rows = np.repeat(np.arange(len(doc_ids)), [len(docs[d]) for d in doc_ids])
    cols = np.fromiter((c for d in doc_ids for c in docs[d]), dtype=np.int64, count=len(rows))
    x = sp.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(len(doc_ids), len(keys)))
    counts = (x.T @ x).tocsr()
    counts.setdiag(0)
    counts.eliminate_zeros()
    by_key = index.by_key()
    doc_freq = np.array([by_key[k].doc_freq for k in keys], dtype=np.int64)
    return CooccurrenceMatrix(keys, counts, doc_freq)


def filter_network(matrix: CooccurrenceMatrix, index: KeywordIndex, params: FilterParams) -> Graph:
    """Apply, in order: doc-frequency window, minimum edge weight, maximum
    unweighted degree, removal of isolated vertices.

    An empty result is returned as an empty graph with ``meta["empty"]`` set
    (and a warning), since sweeps legitimately produce them.
    """
    df = matrix.doc_freq
    in_window = (df >= params.f_min) & (df <= params.f_max)
    coo = matrix.counts.tocoo()
    upper = coo.row < coo.col
    keep = upper & in_window[coo.row] & in_window[coo.col] & (coo.data >= params.theta_w)
    rows, cols, data = coo.row[keep], coo.col[keep], coo.data[keep]

    degree = np.bincount(rows, minlength=len(df)) + np.bincount(cols, minlength=len(df))
    ok = degree <= params.k_max
    keep = ok[rows] & ok[cols]
    rows, cols, data = rows[keep], cols[keep], data[keep]

    by_key = index.by_key()
    g = Graph(directed=False)
    g.meta = {"filter_order": list(FILTER_ORDER), "params": asdict(params)}
    present = np.unique(np.concatenate([rows, cols]))
    for i in present.tolist():
        kw = by_key[matrix.keys[i]]
        g.add_node(kw.key, kw.surface, doc_freq=kw.doc_freq, score=kw.score, lang=kw.language)
    for i, j, w in zip(rows.tolist(), cols.tolist(), data.tolist()):
        g.add_edge(matrix.keys[i], matrix.keys[j], float(w))
    if g.number_of_nodes() == 0:
        g.meta["empty"] = True
        warnings.warn(f"filtered semantic network is empty for {params}", stacklevel=2)
    return g


def semantic_communities(graph: Graph, seed: int = 0, top_n: int = 10, noise_floor: int = 4
                         ) -> SemanticCommunities:
    """Louvain on the filtered network plus the best-scored keywords of each community.

    Communities with fewer than ``noise_floor`` keywords are flagged as noise.
    """
    result = louvain(graph, seed)
    top: dict[int, list[str]] = {}
    for c, members in enumerate(result.partition.members()):
        ranked = sorted(members, key=lambda k: (-graph.attrs(k).get("score", 0.0), k))
        top[c] = ranked[:top_n]
    noise = {c for c, size in enumerate(result.community_sizes) if size < noise_floor}
    return SemanticCommunities(result, top, noise)
