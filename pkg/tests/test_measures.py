import json

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracles
from scholnet.corpus import Reference, build_corpus
from scholnet.graph import Partition
from scholnet.keywords.scoring import Keyword, KeywordIndex
from scholnet.measures import (ClassProbabilities, citation_probabilities, composition, correlation_matrix,
                               one_hot_citation, originality, originality_distributions, originality_value,
                               semantic_probabilities, write_measures)


def test_originality_examples():
    assert originality_value(np.array([0.5, 0.5])) == 0.5
    assert originality_value(np.array([0.0, 1.0, 0.0])) == 0.0
    assert originality_value(np.full(4, 0.25)) == 0.75


def _index(postings):
    kws = [Keyword((k,), k, "en", len(d), 1.0) for k, d in postings.items()]
    return KeywordIndex(kws, {kw.stems: frozenset(postings[kw.key]) for kw in kws}, 10)


def test_semantic_probabilities_half_and_half():
    index = _index({"a1": {"r"}, "a2": {"r"}, "b1": {"r", "s"}, "b2": {"r"}, "z": {"q"}})
    part = Partition({"a1": 0, "a2": 0, "b1": 1, "b2": 1, "c": 2})
    probs = semantic_probabilities(["r", "s", "q"], index, part)
    assert probs.vectors["r"].tolist() == [0.5, 0.5, 0.0]
    assert probs.vectors["s"].tolist() == [0.0, 1.0, 0.0]
    assert probs.vectors["q"] is None and probs.num_undefined == 1
    assert originality(probs).values["r"] == 0.5


def test_citation_probabilities():
    refs = [Reference(i, i) for i in "abcxy"]
    corpus = build_corpus(refs, [("a", "x"), ("b", "x"), ("c", "x"), ("a", "y")])[0]
    part = Partition({"a": 0, "b": 0, "c": 1, "x": 1, "y": 0})
    probs = citation_probabilities(corpus, part)
    assert np.allclose(probs.vectors["x"], [2 / 3, 1 / 3])
    assert probs.vectors["y"].tolist() == [1.0, 0.0]
    assert probs.vectors["a"] is None and probs.num_undefined == 3
    assert originality(probs).values["y"] == 0.0


def test_invalid_vectors_rejected():
    with pytest.raises(ValueError):
        ClassProbabilities("x", 2, {"r": np.array([0.7, 0.7])})
    with pytest.raises(ValueError):
        ClassProbabilities("x", 3, {"r": np.array([0.5, 0.5])})


probability_vectors = st.lists(st.integers(0, 20), min_size=1, max_size=8).filter(sum).map(
    lambda xs: np.array(xs, dtype=float) / sum(xs))


@settings(max_examples=100, deadline=None)
@given(probability_vectors, st.data())
def test_originality_bounds_and_relabeling(p, data):
    o = originality_value(p)
    assert -1e-12 <= o <= 1 - 1 / len(p) + 1e-12
    perm = data.draw(st.permutations(range(len(p))))
    assert originality_value(p[list(perm)]) == pytest.approx(o, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(probability_vectors, st.data())
def test_robin_hood_transfer_never_lowers_originality(p, data):
    assume(len(p) >= 2)
    i, j = int(np.argmax(p)), int(np.argmin(p))
    assume(p[i] > p[j])
    t = data.draw(st.floats(0, 1)) * (p[i] - p[j]) / 2
    q = p.copy()
    q[i] -= t
    q[j] += t
    assert originality_value(q) >= originality_value(p) - 1e-12


def _fixture():
    sem = ClassProbabilities("semantic", 2, {
        "r1": np.array([1.0, 0.0]), "r2": np.array([0.75, 0.25]),
        "r3": np.array([0.25, 0.75]), "r4": np.array([0.5, 0.5]), "r5": None})
    part = Partition({"r1": 0, "r2": 0, "r3": 1, "r4": 1, "r6": 1})
    return sem, part


def test_correlation_matches_closed_form():
    sem, part = _fixture()
    corr = correlation_matrix(sem, one_hot_citation(part))
    assert corr.num_common == 4
    common = ["r1", "r2", "r3", "r4"]
    for k in range(2):
        for kk in range(2):
            x = [sem.vectors[r][k] for r in common]
            y = [1.0 if part[r] == kk else 0.0 for r in common]
            assert corr.values[k, kk] == pytest.approx(oracles.pearson_exact(x, y), abs=1e-12)


def test_identical_column_correlates_perfectly():
    part = Partition({"a": 0, "b": 1, "c": 0})
    sem = ClassProbabilities("semantic", 2, {r: np.eye(2)[part[r]] for r in "abc"})
    corr = correlation_matrix(sem, one_hot_citation(part))
    assert corr.values[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert corr.values[0, 1] == pytest.approx(-1.0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 9), min_size=8, max_size=8), st.floats(0.1, 10), st.floats(-5, 5))
def test_correlation_affine_invariance(raw, scale, shift):
    part = Partition({f"r{i}": i % 2 for i in range(4)})
    vecs = {f"r{i}": np.array([raw[2 * i], raw[2 * i + 1]], float) / (raw[2 * i] + raw[2 * i + 1])
            for i in range(4)}
    base = correlation_matrix(ClassProbabilities("semantic", 2, vecs), one_hot_citation(part)).values
    moved = {r: v * scale + shift for r, v in vecs.items()}
    stub = ClassProbabilities.__new__(ClassProbabilities)
    stub.classification, stub.num_classes, stub.vectors = "semantic", 2, moved
    again = correlation_matrix(stub, one_hot_citation(part)).values
    assert np.allclose(np.nan_to_num(base, nan=9), np.nan_to_num(again, nan=9), atol=1e-12)


def test_zero_variance_is_nan_and_counted():
    part = Partition({"a": 0, "b": 0, "c": 0})
    sem = ClassProbabilities("semantic", 2, {"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0]),
                                             "c": np.array([0.5, 0.5])})
    corr = correlation_matrix(sem, one_hot_citation(part))
    assert np.isnan(corr.values).all()
    assert corr.summary["num_defined"] == 0 and corr.summary["num_undefined"] == 2


def test_correlation_needs_two_common():
    sem = ClassProbabilities("semantic", 1, {"a": np.array([1.0])})
    with pytest.raises(ValueError, match=">= 2"):
        correlation_matrix(sem, one_hot_citation(Partition({"a": 0})))


def test_composition_rows_sum_to_one():
    sem, part = _fixture()
    comp = composition(sem, part)
    assert comp.counts == {0: 2, 1: 2}
    for row in comp.rows.values():
        assert abs(row.sum() - 1) < 1e-9
    assert np.allclose(comp.rows[0], [0.875, 0.125])


def test_composition_warns_on_empty_class():
    sem, _ = _fixture()
    with pytest.warns(UserWarning, match="omitted"):
        comp = composition(sem, Partition({"r1": 0, "r2": 0, "z": 1}))
    assert comp.omitted == [1]


def test_distribution_means_and_density():
    sem, part = _fixture()
    table = originality(sem, part)
    dists = originality_distributions(table)
    for c, dens in dists.items():
        members = [v for r, v in table.values.items() if table.labels[r] == c]
        assert dens.mean == pytest.approx(oracles.mean(members), abs=1e-15)
        grid = np.linspace(0, 1, len(dens.density))
        assert 0.01 <= dens.bandwidth <= 0.2
        assert np.all(dens.density >= 0) and np.trapezoid(dens.density, grid) <= 1 + 1e-9


def test_write_measures(tmp_path):
    sem, part = _fixture()
    cit = one_hot_citation(part)
    write_measures(tmp_path, originality(sem, part), originality(cit, part), composition(sem, part),
                   correlation_matrix(sem, cit), seed=1)
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["composition.csv", "correlation.csv", "densities.csv", "originality_citation.csv",
                     "originality_semantic.csv", "summary.json"]
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["correlation"]["num_common"] == 4
    assert summary["originality"]["semantic"]["num_undefined"] == 1
