"""Independent reference computations used as test oracles.

Nothing here imports the algorithm under test; each oracle works straight
from a definition, by brute force or with exact rational arithmetic.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


# -- modularity ----------------------------------------------------------------

def adjacency(n: int, edges: list[tuple[int, int, float]], directed: bool = False) -> np.ndarray:
    """Symmetric weight matrix; a directed edge contributes to both A[u,v] and A[v,u]."""
    a = np.zeros((n, n))
    for u, v, w in edges:
        a[u, v] += w
        a[v, u] += w
    return a


def modularity_direct(a: np.ndarray, labels) -> float:
    """Q = 1/2m sum_ij (A_ij - k_i k_j / 2m) delta(c_i, c_j), as a literal double loop."""
    n = len(a)
    k = a.sum(axis=1)
    two_m = a.sum()
    total = 0.0
    for i in range(n):
        for j in range(n):
            if labels[i] == labels[j]:
                total += a[i, j] - k[i] * k[j] / two_m
    return total / two_m


def restricted_growth_strings(n: int) -> np.ndarray:
    """Every set partition of n items, one row per partition."""
    out = []

    def rec(prefix, top):
        if len(prefix) == n:
            out.append(list(prefix))
            return
        for c in range(top + 2):
            rec(prefix + [c], max(top, c))

    rec([0], 0) if n else out.append([])
    return np.array(out, dtype=np.int64)


def optimal_modularity(a: np.ndarray) -> float:
    """Exhaustive maximum of Q over all set partitions (vectorized over partitions)."""
    n = len(a)
    k = a.sum(axis=1)
    two_m = a.sum()
    b = a - np.outer(k, k) / two_m
    parts = restricted_growth_strings(n)
    same = parts[:, :, None] == parts[:, None, :]
    q = (same * b[None, :, :]).sum(axis=(1, 2)) / two_m
    return float(q.max())


# -- cliques -------------------------------------------------------------------

def brute_force_cliques(nodes: list[str], edges: set[frozenset], min_size: int) -> list[list[str]]:
    """All maximal cliques by checking every vertex subset."""
    def is_clique(sub):
        return all(frozenset((u, v)) in edges for u, v in itertools.combinations(sub, 2))

    cliques = []
    for r in range(1, len(nodes) + 1):
        for sub in itertools.combinations(nodes, r):
            if not is_clique(sub):
                continue
            if any(is_clique(sub + (x,)) for x in nodes if x not in sub):
                continue
            if r >= min_size:
                cliques.append(sorted(sub))
    return sorted(cliques, key=lambda c: (-len(c), c))


# -- keyword scores ------------------------------------------------------------

def keyword_scores(docs: list[set]) -> dict:
    """score(t) = log(1+f_t) * sum_{t' != t} (c(t,t')/f_t - f_t'/D)^2 with exact fractions."""
    vocab = sorted(set().union(*docs))
    d = len(docs)
    freq = {t: sum(t in doc for doc in docs) for t in vocab}
    out = {}
    for t in vocab:
        acc = Fraction(0)
        for u in vocab:
            if u == t:
                continue
            c = sum(t in doc and u in doc for doc in docs)
            acc += (Fraction(c, freq[t]) - Fraction(freq[u], d)) ** 2
        out[t] = math.log1p(freq[t]) * float(acc)
    return out


def cooccurrence(postings: dict[str, set]) -> dict[tuple[str, str], int]:
    """Pairwise document-set intersections for every ordered pair of distinct keys."""
    return {(a, b): len(postings[a] & postings[b])
            for a in postings for b in postings if a != b}


# -- Pareto --------------------------------------------------------------------

def pareto_indices(objectives: list[tuple]) -> set[int]:
    """Indices not dominated by any other point (all objectives maximized)."""
    front = set()
    for i, oi in enumerate(objectives):
        dominated = False
        for j, oj in enumerate(objectives):
            if i != j and all(x >= y for x, y in zip(oj, oi)) and any(x > y for x, y in zip(oj, oi)):
                dominated = True
                break
        if not dominated:
            front.add(i)
    return front


# -- statistics ----------------------------------------------------------------

def pearson_exact(x, y) -> float:
    """Closed-form Pearson r from raw sums, in exact rationals."""
    x = [Fraction(v) for v in x]
    y = [Fraction(v) for v in y]
    n = len(x)
    sx, sy = sum(x), sum(y)
    sxx = sum(v * v for v in x)
    syy = sum(v * v for v in y)
    sxy = sum(a * b for a, b in zip(x, y))
    num = n * sxy - sx * sy
    den2 = (n * sxx - sx * sx) * (n * syy - sy * sy)
    return float(num) / math.sqrt(float(den2))


def mean(values) -> float:
    return math.fsum(values) / len(values)
