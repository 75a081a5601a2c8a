"""Citation graph construction and its descriptive analytics."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .corpus import Corpus
from .graph import Graph, GraphError


class InsufficientDataError(ValueError):
    pass


@dataclass
class NetworkStats:
    num_nodes: int
    num_edges: int
    mean_in_degree_all: float | None
    mean_in_degree_seed: float | None
    has_citations: bool
    num_cited: int = 0
    num_seeds: int = 0


@dataclass
class Regime:
    rank_start: int
    rank_end: int
    alpha: float
    intercept: float
    r2: float
    mean_year: float | None = None

    @property
    def num_points(self) -> int:
        return self.rank_end - self.rank_start + 1


@dataclass
class RankSizeFit:
    regimes: list[Regime]
    ranks: np.ndarray = field(repr=False)
    citations: np.ndarray = field(repr=False)
    node_ids: list[str] = field(default_factory=list, repr=False)
    sse: float = 0.0

    def regime_of(self, rank: int) -> int:
        for k, reg in enumerate(self.regimes):
            if reg.rank_start <= rank <= reg.rank_end:
                return k
        raise IndexError(rank)

    def fitted(self) -> np.ndarray:
        out = np.empty(len(self.ranks))
        for reg in self.regimes:
            sl = slice(reg.rank_start - 1, reg.rank_end)
            out[sl] = np.exp(reg.intercept - reg.alpha * np.log(self.ranks[sl]))
        return out


def build_citation_graph(corpus: Corpus) -> Graph:
    if not corpus.references:
        raise ValueError("cannot build a citation graph from an empty corpus")
    g = Graph(directed=True)
    for rid in sorted(corpus.references):
        ref = corpus.references[rid]
        attrs = {"seed": rid in corpus.seed_ids}
        if ref.year is not None:
            attrs["year"] = ref.year
        g.add_node(rid, ref.title, **attrs)
    for citing, cited in corpus.links:
        g.add_edge(citing, cited, 1.0)
    return g


def core_filter(graph: Graph) -> Graph:
    """Keep nodes cited at least once or citing at least two others.

    Degrees are read on the input graph in a single pass; the result is not
    re-filtered, so a kept citer whose targets were dropped stays in.
    """
    if not graph.directed:
        raise GraphError("core filter needs a directed citation graph")
    ind = graph.in_degrees()
    outd = graph.out_degrees()
    keep = [graph.node_id(i) for i in range(len(graph)) if ind[i] >= 1 or outd[i] >= 2]
    return graph.subgraph(keep)


def network_stats(graph: Graph, seed_ids: Iterable[str] = ()) -> NetworkStats:
    ind = graph.in_degrees()
    cited = ind[ind >= 1]
    seeds = [s for s in seed_ids if s in graph]
    seed_mean = None
    if seeds:
        seed_mean = float(np.mean([ind[graph.index(s)] for s in seeds]))
    return NetworkStats(
        num_nodes=graph.number_of_nodes(),
        num_edges=graph.number_of_edges(),
        mean_in_degree_all=float(cited.mean()) if len(cited) else None,
        mean_in_degree_seed=seed_mean,
        has_citations=bool(len(cited)),
        num_cited=int(len(cited)),
        num_seeds=len(seeds),
    )


# -- rank-size ----------------------------------------------------------------

def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Slope, intercept and R^2 of y on x."""
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    sxy = float(((x - xm) * (y - ym)).sum())
    syy = float(((y - ym) ** 2).sum())
    slope = sxy / sxx if sxx > 0 else 0.0
    intercept = ym - slope * xm
    if syy == 0:
        r2 = 1.0
    else:
        resid = y - (intercept + slope * x)
        r2 = 1.0 - float((resid ** 2).sum()) / syy
    return slope, float(intercept), r2


class _SegmentCost:
    """O(1) least-squares residual of any contiguous segment via prefix sums."""

    def __init__(self, x: np.ndarray, y: np.ndarray):
        z = np.zeros(1)
        self.n = np.arange(len(x) + 1, dtype=float)
        self.sx = np.concatenate([z, np.cumsum(x)])
        self.sy = np.concatenate([z, np.cumsum(y)])
        self.sxx = np.concatenate([z, np.cumsum(x * x)])
        self.sxy = np.concatenate([z, np.cumsum(x * y)])
        self.syy = np.concatenate([z, np.cumsum(y * y)])

    def __call__(self, a: int, b: int) -> float:
        """Residual sum of squares on points a..b-1 (0-based, half-open)."""
        n = b - a
        sx = self.sx[b] - self.sx[a]
        sy = self.sy[b] - self.sy[a]
        cxx = (self.sxx[b] - self.sxx[a]) - sx * sx / n
        cxy = (self.sxy[b] - self.sxy[a]) - sx * sy / n
        cyy = (self.syy[b] - self.syy[a]) - sy * sy / n
        if cxx <= 0:
            return max(cyy, 0.0)
        return max(cyy - cxy * cxy / cxx, 0.0)


def _best_split(cost: _SegmentCost, starts: Sequence[int], n: int, k: int, min_points: int
                ) -> tuple[float, list[int]]:
    """Exhaustive optimum over segment starts drawn from ``starts`` (dynamic programming).

    Returns the total residual and the k-1 interior breakpoints (0-based
    start index of each segment after the first).
    """
    cands = sorted(set(s for s in starts if min_points <= s <= n - min_points))
    cand_set = set(cands)
    # best[j][s]: minimal cost covering 0..s-1 with j segments; s in cands or n
    ends = cands + [n]
    best: list[dict[int, tuple[float, int]]] = [dict() for _ in range(k + 1)]
    for s in ends:
        if s >= min_points:
            best[1][s] = (cost(0, s), 0)
    for j in range(2, k + 1):
        for s in ends:
            opt = None
            for p, (c_prev, _) in best[j - 1].items():
                if p in cand_set and s - p >= min_points:
                    c = c_prev + cost(p, s)
                    if opt is None or c < opt[0]:
                        opt = (c, p)
            if opt is not None:
                best[j][s] = opt
    if n not in best[k]:
        raise InsufficientDataError("no valid segmentation")
    breaks = []
    s, j = n, k
    while j > 1:
        _, p = best[j][s]
        breaks.append(p)
        s, j = p, j - 1
    return best[k][n][0], sorted(breaks)


def fit_rank_size(values: Sequence[float], num_regimes: int = 1, min_points: int = 10,
                  max_candidates: int = 200, years: Sequence[float | None] | None = None,
                  node_ids: Sequence[str] | None = None) -> RankSizeFit:
    """Piecewise log-log OLS of ``values`` (already sorted descending) on rank.

    Breakpoints are searched exhaustively over about ``max_candidates``
    log-spaced ranks, then each one is refined rank-by-rank between its
    neighbouring candidates until no move lowers the total residual.
    """
    y_raw = np.asarray(values, dtype=float)
    n = len(y_raw)
    if num_regimes < 1 or min_points < 1:
        raise ValueError("num_regimes and min_points must be positive")
    need = num_regimes * min_points
    if n < need:
        raise InsufficientDataError(
            f"rank-size fit with {num_regimes} regimes of >= {min_points} points needs "
            f">= {need} cited nodes, got {n}")
    if np.any(y_raw <= 0):
        raise ValueError("rank-size values must be positive")
    ranks = np.arange(1, n + 1, dtype=float)
    x = np.log(ranks)
    y = np.log(y_raw)
    cost = _SegmentCost(x, y)

    if num_regimes == 1:
        breaks: list[int] = []
    else:
        grid = np.unique(np.round(np.geomspace(1, n, max_candidates)).astype(int))
        if n <= max_candidates:
            grid = np.arange(n)
        _, breaks = _best_split(cost, grid.tolist(), n, num_regimes, min_points)
        breaks = _refine(cost, breaks, grid.tolist(), n, min_points)

    bounds = [0] + breaks + [n]
    regimes = []
    total = 0.0
    for a, b in zip(bounds[:-1], bounds[1:]):
        slope, intercept, r2 = _ols(x[a:b], y[a:b])
        total += cost(a, b)
        mean_year = None
        if years is not None:
            ys = [yr for yr in years[a:b] if yr is not None]
            mean_year = float(np.mean(ys)) if ys else None
        regimes.append(Regime(a + 1, b, -slope, intercept, r2, mean_year))
    return RankSizeFit(regimes, ranks, y_raw, list(node_ids or []), total)


def _refine(cost: _SegmentCost, breaks: list[int], grid: list[int], n: int, min_points: int) -> list[int]:
    grid = sorted(set(grid) | {0, n})
    breaks = list(breaks)

    def total(bs):
        bounds = [0] + bs + [n]
        return sum(cost(a, b) for a, b in zip(bounds[:-1], bounds[1:]))

    improved = True
    current = total(breaks)
    while improved:
        improved = False
        for k, b in enumerate(breaks):
            pos = np.searchsorted(grid, b)
            lo = grid[max(pos - 1, 0)]
            hi = grid[min(pos + 1, len(grid) - 1)]
            left = breaks[k - 1] if k > 0 else 0
            right = breaks[k + 1] if k + 1 < len(breaks) else n
            lo = max(lo, left + min_points)
            hi = min(hi, right - min_points)
            for cand in range(lo, hi + 1):
                if cand == breaks[k]:
                    continue
                trial = breaks[:k] + [cand] + breaks[k + 1:]
                c = total(trial)
                if c < current - 1e-12:
                    breaks, current, improved = trial, c, True
    return breaks


def rank_size_fit(graph: Graph, num_regimes: int = 3, min_points: int = 10,
                  max_candidates: int = 200) -> RankSizeFit:
    """Fit citation regimes on nodes with at least one citation.

    Nodes are ranked by in-degree descending, ties by id ascending.
    """
    ind = graph.in_degrees()
    order = sorted((i for i in range(len(graph)) if ind[i] >= 1),
                   key=lambda i: (-ind[i], graph.node_id(i)))
    values = [int(ind[i]) for i in order]
    ids = [graph.node_id(i) for i in order]
    years = [graph.attrs(nid).get("year") for nid in ids]
    if not any(yr is not None for yr in years):
        years = None
    return fit_rank_size(values, num_regimes, min_points, max_candidates, years, ids)


# -- cliques ------------------------------------------------------------------

def _undirected_adjacency(graph: Graph) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(len(graph))]
    src, dst, _ = graph.edge_arrays()
    for i, j in zip(src.tolist(), dst.tolist()):
        adj[i].add(j)
        adj[j].add(i)
    return adj


def _degeneracy_order(adj: list[set[int]]) -> list[int]:
    """Repeatedly remove a minimum-degree vertex (smallest index on ties)."""
    deg = [len(a) for a in adj]
    heap = [(d, v) for v, d in enumerate(deg)]
    heapq.heapify(heap)
    removed = [False] * len(adj)
    order = []
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        removed[v] = True
        order.append(v)
        for u in adj[v]:
            if not removed[u]:
                deg[u] -= 1
                heapq.heappush(heap, (deg[u], u))
    return order


def _bron_kerbosch(adj, r: list[int], p: set[int], x: set[int], out: list[list[int]], min_size: int) -> None:
    if not p and not x:
        if len(r) >= min_size:
            out.append(list(r))
        return
    if len(r) + len(p) < min_size:
        return
    pivot = max(p | x, key=lambda u: (len(adj[u] & p), -u))
    for v in sorted(p - adj[pivot]):
        r.append(v)
        _bron_kerbosch(adj, r, p & adj[v], x & adj[v], out, min_size)
        r.pop()
        p.remove(v)
        x.add(v)


def maximal_cliques(graph: Graph, min_size: int = 3) -> list[list[str]]:
    """All maximal cliques of the undirected symmetrization with at least ``min_size`` nodes.

    Each clique is sorted, and the list is ordered by size descending then
    lexicographically.
    """
    if min_size < 1:
        raise ValueError("min_size must be positive")
    adj = _undirected_adjacency(graph)
    order = _degeneracy_order(adj)
    position = {v: k for k, v in enumerate(order)}
    found: list[list[int]] = []
    for v in order:
        later = {u for u in adj[v] if position[u] > position[v]}
        earlier = {u for u in adj[v] if position[u] < position[v]}
        _bron_kerbosch(adj, [v], later, earlier, found, min_size)
    cliques = [sorted(graph.node_id(i) for i in c) for c in found]
    cliques.sort(key=lambda c: (-len(c), c))
    return cliques
