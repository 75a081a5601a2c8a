import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.metrics import adjusted_rand_score

import oracles
from scholnet.keywords import score_keywords, select_top
from scholnet.keywords.scoring import Keyword, KeywordIndex
from scholnet.keywords.tagging import stem
from scholnet.semantic import FilterParams, build_cooccurrence, filter_network, semantic_communities
from scholnet.synthetic import planted_topic_corpus

UNBOUNDED = 10**9


def make_index(postings: dict[str, set]) -> KeywordIndex:
    keywords = [Keyword((k,), k, "en", len(docs), float(len(docs))) for k, docs in postings.items() if docs]
    return KeywordIndex(keywords, {kw.stems: frozenset(postings[kw.key]) for kw in keywords},
                        len(set().union(*postings.values())))


def filtered(postings, params):
    index = make_index(postings)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return filter_network(build_cooccurrence(index), index, params)


postings_strategy = st.dictionaries(st.sampled_from("abcdefghij"), st.sets(st.integers(0, 14), min_size=1),
                                    min_size=2, max_size=10)


@settings(max_examples=80, deadline=None)
@given(postings_strategy)
def test_cooccurrence_matches_set_intersections(postings):
    matrix = build_cooccurrence(make_index(postings))
    expected = oracles.cooccurrence(postings)
    for (a, b), c in expected.items():
        assert matrix.get(a, b) == c
        assert c <= min(len(postings[a]), len(postings[b]))
    assert all(matrix.get(k, k) == 0 for k in postings)
    assert (matrix.counts != matrix.counts.T).nnz == 0


def test_scaled_params():
    assert FilterParams.scaled(210_000) == FilterParams()
    small = FilterParams.scaled(300)
    assert small == FilterParams(k_max=1200, theta_w=1, f_min=1, f_max=300)
    with pytest.raises(ValueError):
        FilterParams(f_min=10, f_max=5)
    with pytest.raises(ValueError):
        FilterParams(theta_w=0)


def test_permissive_filter_is_identity():
    postings = {"a": {1, 2, 3}, "b": {2, 3}, "c": {3, 4}, "d": {9}}
    g = filtered(postings, FilterParams(UNBOUNDED, 1, 1, UNBOUNDED))
    pairs = {(a, b): c for (a, b), c in oracles.cooccurrence(postings).items() if a < b and c > 0}
    assert sorted((u, v) if u < v else (v, u) for u, v, _ in g.edges()) == sorted(pairs)
    assert all(w == pairs[tuple(sorted((u, v)))] for u, v, w in g.edges())
    assert "d" not in g.nodes        # isolated


def test_hand_filtered_toy():
    postings = {"a": {1, 2, 3, 4}, "b": {1, 2, 3}, "c": {3, 4}, "d": {1, 3}, "e": {5, 6, 7, 8, 9}}
    # window [2, 4] drops e; theta 2 keeps a-b (3), a-c (2), a-d (2), b-d (2); k_max 2 drops a (degree 3)
    g = filtered(postings, FilterParams(k_max=2, theta_w=2, f_min=2, f_max=4))
    assert sorted(g.nodes) == ["b", "d"]
    assert g.weight("b", "d") == 2.0


def test_binding_degree_cap_can_shrink_network_when_window_widens():
    # widening f_max admits c, which pushes a over k_max and strands b
    postings = {"a": {1, 2}, "b": {1}, "c": {2, 3, 4}}
    narrow = filtered(postings, FilterParams(k_max=1, theta_w=1, f_min=1, f_max=2))
    wide = filtered(postings, FilterParams(k_max=1, theta_w=1, f_min=1, f_max=3))
    assert narrow.number_of_nodes() == 2 and wide.number_of_nodes() == 0
    assert wide.meta["empty"]


def test_empty_network_warns():
    index = make_index({"a": {1}, "b": {1}})
    with pytest.warns(UserWarning, match="empty"):
        g = filter_network(build_cooccurrence(index), index, FilterParams(1, 5, 1, 5))
    assert g.number_of_nodes() == 0


@settings(max_examples=80, deadline=None)
@given(postings_strategy, st.integers(1, 4), st.integers(1, 3), st.integers(1, 8), st.integers(1, 8))
def test_filter_invariants(postings, k_max, theta, f_min, span):
    params = FilterParams(k_max, theta, f_min, f_min + span)
    g = filtered(postings, params)
    for v in g.nodes:
        assert 1 <= g.degree(v) <= k_max
        assert f_min <= len(postings[v]) <= f_min + span
    assert all(w >= theta for _, _, w in g.edges())


@settings(max_examples=80, deadline=None)
@given(postings_strategy, st.integers(1, 3), st.integers(0, 2), st.integers(1, 4), st.integers(0, 2),
       st.integers(2, 8), st.integers(0, 4))
def test_monotone_without_degree_cap(postings, theta, dtheta, f_min, dfmin, f_max, dfmax):
    tight = FilterParams(UNBOUNDED, theta + dtheta, f_min + dfmin, max(f_min + dfmin, f_max))
    loose = FilterParams(UNBOUNDED, theta, f_min, max(f_min + dfmin, f_max) + dfmax)
    assert set(filtered(postings, tight).nodes) <= set(filtered(postings, loose).nodes)


def test_planted_topics_recovered():
    planted = planted_topic_corpus(num_docs=240, seed=3)
    index = select_top(score_keywords(planted.corpus))
    graph = filtered_from(index, FilterParams.scaled(len(planted.corpus.references)))
    sc = semantic_communities(graph, seed=0)
    truth = {stem(w): topic for topic, words in planted.vocabularies.items() for w in words}
    common = [k for k in graph.nodes if k in truth]
    assert len(common) >= 30
    ari = adjusted_rand_score([truth[k] for k in common], [sc.result.partition[k] for k in common])
    assert ari > 0.9
    assert all(len(words) <= 10 for words in sc.top_keywords.values())


def filtered_from(index, params):
    return filter_network(build_cooccurrence(index), index, params)


def test_semantic_communities_noise_flag():
    postings = {"a": {1, 2}, "b": {1, 2}, "c": {1, 2}, "d": {1, 2}, "x": {5, 6}, "y": {5, 6}}
    g = filtered(postings, FilterParams(UNBOUNDED, 1, 1, UNBOUNDED))
    sc = semantic_communities(g, seed=0, noise_floor=3)
    assert sc.result.community_sizes == [4, 2]
    assert sc.noise == {1}
    # two disjoint cliques: Q = 1 - sum (d_c / 2m)^2
    assert sc.result.modularity == pytest.approx(1 - (24 / 28) ** 2 - (4 / 28) ** 2, abs=1e-12)
