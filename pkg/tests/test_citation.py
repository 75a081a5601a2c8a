import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from scholnet.citation import (InsufficientDataError, build_citation_graph, core_filter, fit_rank_size,
                               maximal_cliques, network_stats, rank_size_fit)
from scholnet.cli import bundled_minicorpus
from scholnet.corpus import Reference, build_corpus
from scholnet.graph import Graph


def test_build_citation_graph(small_corpus):
    g = build_citation_graph(small_corpus)
    assert g.directed and g.number_of_nodes() == 4 and g.number_of_edges() == 4
    assert all(w == 1.0 for _, _, w in g.edges())
    assert g.attrs("a")["seed"] is True and g.label("c") == "Transport networks"


def test_minicorpus_counts_match_manifest(minicorpus):
    manifest = json.loads((bundled_minicorpus() / "manifest.json").read_text())
    g = build_citation_graph(minicorpus)
    assert g.number_of_nodes() == manifest["num_references"]
    assert g.number_of_edges() == manifest["num_links"]
    assert len(minicorpus.seed_ids) == manifest["num_seeds"]


def test_core_filter_rule():
    g = Graph(directed=True)
    for node in "abcdefg":
        g.add_node(node)
    g.add_edge("a", "b")          # a: in 0, out 1 -> dropped
    g.add_edge("c", "d")
    g.add_edge("c", "e")          # c: in 0, out 2 -> kept (bridge)
    kept = set(core_filter(g).nodes)
    assert "a" not in kept and "c" in kept
    assert {"b", "d", "e"} <= kept     # cited at least once
    assert not {"f", "g"} & kept


def test_core_filter_is_single_pass():
    # b is cited only by a, which is dropped; b stays because the rule reads original degrees
    g = Graph(directed=True)
    g.add_edge("a", "b")
    assert core_filter(g).nodes == ["b"]


def test_network_stats():
    g = Graph(directed=True)
    for node in "abcxyz":
        g.add_node(node)
    for src, dst in [("x", "a"), ("y", "a"), ("x", "b"), ("y", "b"), ("z", "b"), ("z", "a")]:
        g.add_edge(src, dst)
    stats = network_stats(g, ["a", "b", "c"])
    assert stats.mean_in_degree_seed == 2.0
    assert stats.mean_in_degree_all == 3.0
    empty = Graph(directed=True)
    empty.add_node("q")
    s = network_stats(empty)
    assert s.mean_in_degree_all is None and s.mean_in_degree_seed is None and not s.has_citations


def test_rank_size_single_regime_is_plain_ols():
    rng = np.random.default_rng(0)
    y = np.sort(rng.pareto(1.2, 300) * 10 + 1)[::-1]
    fit = fit_rank_size(y, 1)
    r = np.arange(1, 301)
    slope, intercept = np.polyfit(np.log(r), np.log(y), 1)
    assert fit.regimes[0].alpha == pytest.approx(-slope, abs=1e-9)
    assert fit.regimes[0].intercept == pytest.approx(intercept, abs=1e-9)


def test_rank_size_constant():
    fit = fit_rank_size(np.full(50, 7.0), 1)
    assert abs(fit.regimes[0].alpha) < 1e-9


def test_rank_size_regimes_cover_and_respect_min_points():
    rng = np.random.default_rng(1)
    y = np.sort(rng.integers(1, 500, 400))[::-1].astype(float)
    fit = fit_rank_size(y, 3, min_points=20)
    assert fit.regimes[0].rank_start == 1 and fit.regimes[-1].rank_end == 400
    for prev, nxt in zip(fit.regimes, fit.regimes[1:]):
        assert nxt.rank_start == prev.rank_end + 1
    assert all(reg.num_points >= 20 for reg in fit.regimes)


def test_rank_size_insufficient():
    with pytest.raises(InsufficientDataError, match="30"):
        fit_rank_size(np.arange(20, 0, -1.0), 3, min_points=10)


def test_rank_size_graph_ties_by_id():
    refs = [Reference(i, i, year=2000 + k) for k, i in enumerate(["b", "a", "c", "x", "y", "z"])]
    links = [("x", "a"), ("y", "a"), ("x", "b"), ("y", "b"), ("z", "c")]
    g = build_citation_graph(build_corpus(refs, links)[0])
    fit = rank_size_fit(g, num_regimes=1, min_points=2)
    assert fit.node_ids == ["a", "b", "c"]
    assert fit.regimes[0].mean_year is not None


def test_cliques_on_path():
    g = Graph(directed=False)
    g.add_edge("a", "b")
    g.add_edge("b", "c")
    assert maximal_cliques(g, 2) == [["a", "b"], ["b", "c"]]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10), st.floats(0.1, 0.9), st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_cliques_match_brute_force(n, p, seed, min_size):
    rng = np.random.default_rng(seed)
    nodes = [f"v{i}" for i in range(n)]
    g = Graph(directed=True)
    for v in nodes:
        g.add_node(v)
    edges = set()
    for u, v in itertools.combinations(nodes, 2):
        if rng.random() < p:
            g.add_edge(u, v) if rng.random() < 0.5 else g.add_edge(v, u)
            edges.add(frozenset((u, v)))
    assert maximal_cliques(g, min_size) == oracles.brute_force_cliques(nodes, edges, min_size)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), max_size=40))
def test_core_filter_invariant(pairs):
    g = Graph(directed=True)
    for i in range(10):
        g.add_node(str(i))
    for u, v in pairs:
        if u != v:
            g.add_edge(str(u), str(v))
    core = core_filter(g)
    for v in core.nodes:
        assert g.degree(v, "in") >= 1 or g.degree(v, "out") >= 2
    for v in g.nodes:
        if g.degree(v, "in") >= 1 or g.degree(v, "out") >= 2:
            assert v in core
