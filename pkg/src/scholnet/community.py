"""Modularity, Louvain community detection and rewiring-based significance.

Directed graphs are symmetrized (sum of both directions) before any
modularity computation. Randomness comes from ``numpy.random.PCG64``
seeded with plain integers, so a given seed reproduces across platforms.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._meta import RNG_ALGORITHM
from .graph import Graph, GraphError, Partition


class EmptyGraphError(GraphError):
    pass


class RewiringError(GraphError):
    pass


@dataclass
class CommunityResult:
    partition: Partition
    modularity: float
    community_sizes: list[int]
    seed: int
    rng: str = RNG_ALGORITHM
    levels: int = 0

    @property
    def num_communities(self) -> int:
        return len(self.community_sizes)


@dataclass
class BootstrapResult:
    sample_modularities: list[float]
    mean: float
    std: float
    num_samples: int
    mode: str = "uniform"
    seed: int = 0
    rng: str = RNG_ALGORITHM


@dataclass
class _Symmetric:
    """Undirected edge arrays (each edge once) over dense node indices."""

    n: int
    src: np.ndarray
    dst: np.ndarray
    w: np.ndarray
    ids: list[str] = field(default_factory=list)


def _symmetric(graph: Graph) -> _Symmetric:
    src, dst, w = graph.edge_arrays()
    if graph.directed and len(src):
        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        key = lo * len(graph) + hi
        uniq, inv = np.unique(key, return_inverse=True)
        w = np.bincount(inv, weights=w)
        src, dst = uniq // len(graph), uniq % len(graph)
    return _Symmetric(len(graph), src, dst, w, graph.nodes)


def _labels(graph: Graph, partition: Partition) -> np.ndarray:
    labels = np.empty(len(graph), dtype=np.int64)
    for i, node in enumerate(graph.nodes):
        try:
            labels[i] = partition.assignment[node]
        except KeyError:
            raise GraphError(f"partition does not assign node {node!r}") from None
    return labels


def _modularity_arrays(n: int, src, dst, w, labels: np.ndarray) -> float:
    m = float(w.sum())
    if m <= 0:
        raise EmptyGraphError("modularity is undefined on a graph without edges")
    strength = np.bincount(src, weights=w, minlength=n) + np.bincount(dst, weights=w, minlength=n)
    ncom = int(labels.max()) + 1 if n else 0
    internal = np.bincount(labels[src], weights=w * (labels[src] == labels[dst]), minlength=ncom)
    total = np.bincount(labels, weights=strength, minlength=ncom)
    return float(internal.sum() / m - ((total / (2.0 * m)) ** 2).sum())


def evaluate_modularity(graph: Graph, partition: Partition) -> float:
    """Q = (1/2m) sum_ij (A_ij - k_i k_j / 2m) delta(c_i, c_j) on the symmetrized graph."""
    sym = _symmetric(graph)
    labels = _labels(graph, partition)
    return _modularity_arrays(sym.n, sym.src, sym.dst, sym.w, labels)


# -- Louvain ------------------------------------------------------------------

def _one_level(n: int, adj: list[dict[int, float]], loops: np.ndarray, m2: float,
               rng: np.random.Generator) -> tuple[np.ndarray, bool]:
    """Local moving phase. ``adj`` excludes self-loops; ``loops`` holds their weight."""
    k = np.array([sum(a.values()) for a in adj]) + 2.0 * loops
    comm = np.arange(n)
    tot = k.copy()
    moved_any = False
    while True:
        moved = 0
        for i in rng.permutation(n).tolist():
            ci = comm[i]
            ki = k[i]
            links: dict[int, float] = {}
            for j, wij in adj[i].items():
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + wij
            tot[ci] -= ki
            best_c = ci
            best_gain = links.get(ci, 0.0) - tot[ci] * ki / m2
            for c in sorted(links):
                gain = links[c] - tot[c] * ki / m2
                # ascending scan: an equal gain later never displaces a smaller id
                if gain > best_gain + 1e-12:
                    best_c, best_gain = c, gain
            tot[best_c] += ki
            if best_c != ci:
                comm[i] = best_c
                moved += 1
        if moved == 0:
            break
        moved_any = True
    return comm, moved_any


def _aggregate(adj: list[dict[int, float]], loops: np.ndarray, comm: np.ndarray
               ) -> tuple[list[dict[int, float]], np.ndarray, np.ndarray]:
    _, dense = np.unique(comm, return_inverse=True)
    nc = int(dense.max()) + 1
    new_adj: list[dict[int, float]] = [dict() for _ in range(nc)]
    new_loops = np.zeros(nc)
    np.add.at(new_loops, dense, loops)
    for i, nbrs in enumerate(adj):
        ci = dense[i]
        row = new_adj[ci]
        for j, w in nbrs.items():
            cj = dense[j]
            if ci == cj:
                new_loops[ci] += w / 2.0  # each internal edge is seen from both ends
            else:
                row[cj] = row.get(cj, 0.0) + w
    return new_adj, new_loops, dense


def louvain(graph: Graph, seed: int = 0) -> CommunityResult:
    """Two-phase Louvain optimization at resolution 1.

    Node visit order in every local-moving sweep is a seeded permutation;
    a node only leaves its community for a strictly better gain, and equal
    best gains go to the smallest community id. Final communities are
    numbered by decreasing size, ties by their smallest member id.
    """
    sym = _symmetric(graph)
    if len(sym.w) == 0:
        raise EmptyGraphError("louvain needs at least one edge")
    n = sym.n
    adj: list[dict[int, float]] = [dict() for _ in range(n)]
    for i, j, w in zip(sym.src.tolist(), sym.dst.tolist(), sym.w.tolist()):
        adj[i][j] = adj[i].get(j, 0.0) + w
        adj[j][i] = adj[j].get(i, 0.0) + w
    loops = np.zeros(n)
    m2 = 2.0 * float(sym.w.sum())
    rng = np.random.Generator(np.random.PCG64(seed))

    membership = np.arange(n)
    levels = 0
    while True:
        comm, moved = _one_level(len(adj), adj, loops, m2, rng)
        if not moved:
            break
        adj, loops, dense = _aggregate(adj, loops, comm)
        membership = dense[membership]
        levels += 1
        if len(adj) == 1:
            break

    members: dict[int, list[int]] = {}
    for i, c in enumerate(membership.tolist()):
        members.setdefault(c, []).append(i)
    ordered = sorted(members.values(), key=lambda ms: (-len(ms), min(sym.ids[i] for i in ms)))
    assignment = {}
    for new_c, ms in enumerate(ordered):
        for i in ms:
            assignment[sym.ids[i]] = new_c
    partition = Partition(assignment)
    q = evaluate_modularity(graph, partition)
    return CommunityResult(partition, q, partition.sizes(), seed, levels=levels)


# -- bootstrap ----------------------------------------------------------------

def _rewire_uniform(n: int, m: int, rng: np.random.Generator, max_rounds: int = 100
                    ) -> tuple[np.ndarray, np.ndarray]:
    if m > n * (n - 1) // 2:
        raise RewiringError(f"cannot place {m} simple edges on {n} nodes")
    seen: set[int] = set()
    src = np.empty(m, dtype=np.int64)
    dst = np.empty(m, dtype=np.int64)
    filled = 0
    for _ in range(max_rounds):
        need = m - filled
        if need == 0:
            break
        a = rng.integers(0, n, size=need * 2)
        b = rng.integers(0, n, size=need * 2)
        for u, v in zip(a.tolist(), b.tolist()):
            if u == v:
                continue
            lo, hi = (u, v) if u < v else (v, u)
            key = lo * n + hi
            if key in seen:
                continue
            seen.add(key)
            src[filled], dst[filled] = lo, hi
            filled += 1
            if filled == m:
                break
    if filled < m:
        raise RewiringError(f"graph too dense to rewire without duplicates after {max_rounds} rounds")
    return src, dst


def _rewire_degree_preserving(src: np.ndarray, dst: np.ndarray, n: int, rng: np.random.Generator,
                              swaps_per_edge: int = 10, max_tries_factor: int = 100
                              ) -> tuple[np.ndarray, np.ndarray]:
    src, dst = src.copy(), dst.copy()
    m = len(src)
    if m < 2:
        return src, dst
    keys = {min(u, v) * n + max(u, v) for u, v in zip(src.tolist(), dst.tolist())}
    target = swaps_per_edge * m
    done = tries = 0
    while done < target:
        tries += 1
        if tries > max_tries_factor * target:
            raise RewiringError("degree-preserving rewiring stalled; graph too dense")
        e1, e2 = rng.integers(0, m, size=2).tolist()
        if e1 == e2:
            continue
        a, b = int(src[e1]), int(dst[e1])
        c, d = int(src[e2]), int(dst[e2])
        if rng.random() < 0.5:
            c, d = d, c
        if len({a, b, c, d}) < 4:
            continue
        k1 = min(a, d) * n + max(a, d)
        k2 = min(c, b) * n + max(c, b)
        if k1 in keys or k2 in keys:
            continue
        keys.discard(min(a, b) * n + max(a, b))
        keys.discard(min(c, d) * n + max(c, d))
        keys.add(k1)
        keys.add(k2)
        src[e1], dst[e1] = a, d
        src[e2], dst[e2] = c, b
        done += 1
    return src, dst


def _bootstrap_sample(sym: _Symmetric, labels: np.ndarray, seed: int, mode: str) -> float:
    rng = np.random.Generator(np.random.PCG64(seed))
    if mode == "uniform":
        src, dst = _rewire_uniform(sym.n, len(sym.w), rng)
        w = sym.w
    elif mode == "degree":
        src, dst = _rewire_degree_preserving(sym.src, sym.dst, sym.n, rng)
        w = sym.w
    else:
        raise ValueError(f"unknown rewiring mode {mode!r}")
    return _modularity_arrays(sym.n, src, dst, w, labels)


def bootstrap_significance(graph: Graph, partition: Partition, num_samples: int = 100,
                           seed: int = 0, mode: str = "uniform", threads: int = 1) -> BootstrapResult:
    """Modularity of a fixed partition on randomly rewired copies of the graph.

    Sample ``s`` uses seed ``seed + s``. ``uniform`` resamples both endpoints
    of every edge uniformly (node and edge counts kept, no self-loops or
    duplicates, weights carried over); ``degree`` does double-edge swaps.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be positive")
    sym = _symmetric(graph)
    if len(sym.w) == 0:
        raise EmptyGraphError("bootstrap needs at least one edge")
    labels = _labels(graph, partition)
    seeds = [seed + s for s in range(num_samples)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(lambda sd: _bootstrap_sample(sym, labels, sd, mode), seeds))
    else:
        samples = [_bootstrap_sample(sym, labels, sd, mode) for sd in seeds]
    arr = np.asarray(samples)
    std = float(arr.std(ddof=1)) if num_samples > 1 else math.nan
    return BootstrapResult(samples, float(arr.mean()), std, num_samples, mode, seed)
