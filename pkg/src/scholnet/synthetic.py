"""Seeded synthetic data with known ground truth.

Used by the bundled mini-corpus, the test suite and the demo scripts.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus, Reference, build_corpus
from .graph import Graph

TOPICS: dict[str, list[str]] = {
    "urban": ["urban", "density", "segregation", "metropolitan", "regions", "mobility",
              "housing", "commuting", "suburbs", "cities", "zoning", "sprawl"],
    "biochem": ["protein", "folding", "molecular", "binding", "enzymes", "peptide",
                "ligand", "kinase", "membrane", "receptor", "catalysis", "residues"],
    "learning": ["neural", "gradient", "training", "image", "classification", "convolutional",
                 "layers", "optimizer", "dropout", "embedding", "backpropagation", "tensor"],
}
# filler tagged OTHER by the built-in tagger, so it never becomes a keyword
VERBS = ["examine", "describe", "compare", "consider", "propose", "discuss", "observe"]
TEMPLATES = [
    "We {v} {a} {b} in {c} {d}.",
    "We {v} the {a} of {b} {c}.",
    "Here we {v} {a} {b} and {c}.",
    "Moreover we {v} {a} with {b} {c} {d}.",
    "They {v} how {a} {b} can {v2} {c}.",
]


@dataclass
class PlantedCorpus:
    corpus: Corpus
    topic_of: dict[str, str]
    vocabularies: dict[str, list[str]]
    manifest: dict = field(default_factory=dict)


def _sentence(rng: np.random.Generator, words: list[str]) -> str:
    tpl = TEMPLATES[rng.integers(len(TEMPLATES))]
    picks = rng.choice(len(words), size=4, replace=False)
    v, v2 = rng.choice(VERBS, size=2, replace=False)
    text = tpl.format(v=v, v2=v2, a=words[picks[0]], b=words[picks[1]], c=words[picks[2]],
                      d=words[picks[3]])
    return text[0].upper() + text[1:]


def planted_topic_corpus(num_docs: int = 300, num_title_only: int = 40, sentences: int = 6,
                         p_in: float = 0.08, p_out: float = 0.003, num_seeds: int = 30,
                         mix: float = 0.15, seed: int = 7) -> PlantedCorpus:
    """Corpus with three disjoint topic vocabularies and topic-aligned citation blocks.

    Each abstract is written in its own topic, except that with probability
    ``mix`` one sentence is borrowed from another topic. References without
    an abstract stand in for titles only known through citations.
    """
    rng = np.random.default_rng(seed)
    names = sorted(TOPICS)
    refs: list[Reference] = []
    topic_of: dict[str, str] = {}
    total = num_docs + num_title_only
    for i in range(total):
        rid = f"R{i:04d}"
        topic = names[i % len(names)]
        words = TOPICS[topic]
        title_words = rng.choice(words, size=3, replace=False)
        title = f"On {title_words[0]} {title_words[1]} and {title_words[2]} ({rid})"
        abstract = None
        if i < num_docs:
            parts = [_sentence(rng, words) for _ in range(sentences)]
            if rng.random() < mix:
                other = names[(names.index(topic) + 1 + rng.integers(len(names) - 1)) % len(names)]
                parts[-1] = _sentence(rng, TOPICS[other])
            abstract = " ".join(parts)
        year = int(1990 + rng.integers(30))
        refs.append(Reference(rid, title, abstract, year, (f"Author {int(rng.integers(50))}",), "en", "synthetic"))
        topic_of[rid] = topic

    ids = [r.id for r in refs]
    labels = np.array([names.index(topic_of[r]) for r in ids])
    same = labels[:, None] == labels[None, :]
    prob = np.where(same, p_in, p_out)
    draw = rng.random((total, total)) < prob
    np.fill_diagonal(draw, False)
    links = [(ids[i], ids[j]) for i, j in zip(*np.nonzero(draw))]
    seed_ids = sorted(rng.choice(ids[:num_docs], size=num_seeds, replace=False).tolist())

    corpus, diag = build_corpus(refs, links, seed_ids)
    manifest = {
        "generator": "planted_topic_corpus",
        "seed": seed,
        "num_references": total,
        "num_with_abstract": num_docs,
        "num_links": diag.num_links,
        "num_seeds": num_seeds,
        "topics": names,
        "vocabularies": {t: TOPICS[t] for t in names},
        "topic_of": topic_of,
        "p_in": p_in,
        "p_out": p_out,
        "mix": mix,
    }
    return PlantedCorpus(corpus, topic_of, {t: TOPICS[t] for t in names}, manifest)


def planted_partition_graph(num_blocks: int = 4, block_size: int = 25, p_in: float = 0.3,
                            p_out: float = 0.01, seed: int = 0) -> tuple[Graph, dict[str, int]]:
    """Undirected stochastic block model; returns the graph and the planted labels."""
    rng = np.random.default_rng(seed)
    n = num_blocks * block_size
    labels = np.repeat(np.arange(num_blocks), block_size)
    g = Graph(directed=False)
    ids = [f"n{i:03d}" for i in range(n)]
    for node in ids:
        g.add_node(node)
    prob = np.where(labels[:, None] == labels[None, :], p_in, p_out)
    draw = np.triu(rng.random((n, n)) < prob, k=1)
    for i, j in zip(*np.nonzero(draw)):
        g.add_edge(ids[i], ids[j])
    return g, {ids[i]: int(labels[i]) for i in range(n)}


def random_graph(num_nodes: int, num_edges: int, seed: int = 0, directed: bool = False) -> Graph:
    """Uniform simple graph with exactly ``num_edges`` edges."""
    rng = np.random.default_rng(seed)
    g = Graph(directed=directed)
    ids = [f"v{i:05d}" for i in range(num_nodes)]
    for node in ids:
        g.add_node(node)
    seen: set[tuple[int, int]] = set()
    while len(seen) < num_edges:
        u, v = (int(x) for x in rng.integers(num_nodes, size=2))
        if u == v:
            continue
        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        g.add_edge(ids[key[0]], ids[key[1]])
    return g


def _pseudo_words(rng: np.random.Generator, count: int) -> list[str]:
    consonants, vowels = "bdfgklmnprstvz", "aeiou"
    words: set[str] = set()
    while len(words) < count:
        syl = rng.integers(2, 4)
        w = "".join(consonants[rng.integers(len(consonants))] + vowels[rng.integers(len(vowels))]
                    for _ in range(syl)) + consonants[rng.integers(len(consonants))]
        words.add(w)
    return sorted(words)


def scale_corpus(num_docs: int = 10_000, vocabulary: int = 3000, num_topics: int = 20,
                 words_per_doc: int = 120, seed: int = 11) -> Corpus:
    """Large English-looking corpus for throughput checks.

    Content words are pronounceable pseudo-words (tagged as nouns by the
    suffix fallback) drawn Zipf-like from topic-specific slices, interleaved
    with stop words so language detection and n-gram windows behave as on
    real abstracts.
    """
    rng = np.random.default_rng(seed)
    vocab = _pseudo_words(rng, vocabulary)
    glue = ["the", "of", "and", "in", "to", "with", "for", "on", "we", "this"]
    slice_size = vocabulary // num_topics
    ranks = np.arange(1, slice_size + 1)
    zipf = 1.0 / ranks
    zipf /= zipf.sum()
    refs = []
    for i in range(num_docs):
        topic = i % num_topics
        pool = vocab[topic * slice_size:(topic + 1) * slice_size]
        content = rng.choice(slice_size, size=words_per_doc, p=zipf)
        gaps = rng.random(words_per_doc) < 0.35
        tokens: list[str] = []
        for k, (idx, gap) in enumerate(zip(content, gaps)):
            tokens.append(pool[idx])
            if gap:
                tokens.append(glue[rng.integers(len(glue))])
            if k % 15 == 14:
                tokens[-1] += "."
        text = " ".join(tokens)
        refs.append(Reference(f"S{i:06d}", f"Synthetic document {i}", text, 2000, (), "en", "synthetic"))
    corpus, _ = build_corpus(refs, [])
    return corpus
