"""Relevance scoring of candidate n-grams and top-K selection.

``score_v1`` for a candidate t with document frequency f_t, over D documents::

    score(t) = log(1 + f_t) * sum_{t' != t} (c(t, t') / f_t - f_t' / D) ** 2

where c(t, t') counts documents containing both. Everything is document
level and binary. The sum is evaluated exactly in integers as
``sum (c D - f_t' f_t)^2 / (f_t D)^2`` so a profile equal to the background
scores exactly zero.
"""
from __future__ import annotations

import csv
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

from .._meta import header_lines, read_header_params, strip_comments
from ..corpus import Corpus
from .extract import candidate_windows
from .tagging import ExternalTagger, tag_sentences
from .text import UNKNOWN, detect_language

SCORER = "score_v1"
DEFAULT_KW = 50_000
DEFAULT_MIN_FREQ = 3


class NoCandidatesError(ValueError):
    pass


@dataclass(frozen=True)
class Keyword:
    stems: tuple[str, ...]
    surface: str
    language: str
    doc_freq: int
    score: float

    def __post_init__(self):
        if not 1 <= len(self.stems) <= 4:
            raise ValueError(f"keyword must have 1-4 stems, got {self.stems!r}")

    @property
    def key(self) -> str:
        return " ".join(self.stems)


@dataclass
class KeywordIndex:
    keywords: list[Keyword]
    postings: dict[tuple[str, ...], frozenset[str]]
    num_docs: int
    scorer: str = SCORER
    params: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.keywords)

    def by_key(self) -> dict[str, Keyword]:
        return {k.key: k for k in self.keywords}

    def documents(self) -> dict[str, set[tuple[str, ...]]]:
        """Inverse postings: document id -> kept keywords it contains."""
        docs: dict[str, set[tuple[str, ...]]] = {}
        for kw in self.keywords:
            for d in self.postings[kw.stems]:
                docs.setdefault(d, set()).add(kw.stems)
        return docs


@dataclass
class DocumentCandidates:
    doc_id: str
    language: str
    ngrams: frozenset[tuple[str, ...]]
    surfaces: Counter


def process_document(doc_id: str, text: str, taggers: Mapping[str, ExternalTagger] | None = None
                     ) -> DocumentCandidates:
    lang = detect_language(text)
    if lang == UNKNOWN:
        return DocumentCandidates(doc_id, UNKNOWN, frozenset(), Counter())
    tagger = (taggers or {}).get(lang)
    grams: set[tuple[str, ...]] = set()
    surfaces: Counter = Counter()
    for sentence in tag_sentences(text, lang, tagger):
        for stems, surface in candidate_windows(sentence, lang):
            grams.add(stems)
            surfaces[(stems, surface)] += 1
    return DocumentCandidates(doc_id, lang, frozenset(grams), surfaces)


def extract_documents(corpus: Corpus, taggers: Mapping[str, ExternalTagger] | None = None,
                      threads: int = 1) -> list[DocumentCandidates]:
    items = sorted((rid, ref.abstract) for rid, ref in corpus.references.items() if ref.has_abstract)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda it: process_document(it[0], it[1], taggers), items))
    return [process_document(rid, text, taggers) for rid, text in items]


def _exact_scores(docsets: list[list[int]], freqs: np.ndarray, num_docs: int,
                  block: int = 2048) -> list[float]:
    """score_v1 for every term, given each document's list of term indices."""
    t = len(freqs)
    rows = np.repeat(np.arange(len(docsets)), [len(d) for d in docsets])
    cols = np.fromiter((c for d in docsets for c in d), dtype=np.int64, count=len(rows))
    x = sp.csc_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(len(docsets), t))
    f = freqs.astype(np.int64)
    s2 = int((f * f).sum())
    d = int(num_docs)
    scores: list[float] = []
    for start in range(0, t, block):
        stop = min(start + block, t)
        co = (x[:, start:stop].T @ x).tocsr()
        co.setdiag(0)
        co.eliminate_zeros()
        sum_c2 = np.asarray(co.multiply(co).sum(axis=1)).ravel()
        sum_cf = co @ f
        for k in range(stop - start):
            ft = int(f[start + k])
            num = d * d * int(sum_c2[k]) - 2 * d * ft * int(sum_cf[k]) + ft * ft * (s2 - ft * ft)
            scores.append(0.0 if num == 0 else math.log1p(ft) * (num / (ft * ft * d * d)))
    return scores


def score_candidates(documents: list[DocumentCandidates], min_candidate_freq: int = DEFAULT_MIN_FREQ
                     ) -> KeywordIndex:
    docs = [doc for doc in documents if doc.language != UNKNOWN]
    if len(docs) < 2:
        raise NoCandidatesError(f"keyword scoring needs >= 2 documents in a known language, got {len(docs)}")
    postings: dict[tuple[str, ...], list[str]] = {}
    for doc in docs:
        for gram in doc.ngrams:
            postings.setdefault(gram, []).append(doc.doc_id)
    vocab = sorted(g for g, ds in postings.items() if len(ds) >= min_candidate_freq)
    if not vocab:
        raise NoCandidatesError(f"no candidate reaches document frequency {min_candidate_freq}")
    position = {g: i for i, g in enumerate(vocab)}
    freqs = np.array([len(postings[g]) for g in vocab], dtype=np.int64)
    docsets = [sorted(position[g] for g in doc.ngrams if g in position) for doc in docs]
    scores = _exact_scores(docsets, freqs, len(docs))

    surfaces: dict[tuple[str, ...], Counter] = {}
    langs: dict[tuple[str, ...], Counter] = {}
    for doc in docs:
        for (gram, surface), n in doc.surfaces.items():
            if gram in position:
                surfaces.setdefault(gram, Counter())[surface] += n
        for gram in doc.ngrams:
            if gram in position:
                langs.setdefault(gram, Counter())[doc.language] += 1
    keywords = []
    for g, score in zip(vocab, scores):
        surface = min(surfaces[g].items(), key=lambda kv: (-kv[1], kv[0]))[0]
        lang = min(langs[g].items(), key=lambda kv: (-kv[1], kv[0]))[0]
        keywords.append(Keyword(g, surface, lang, len(postings[g]), score))
    return KeywordIndex(keywords, {g: frozenset(postings[g]) for g in vocab}, len(docs),
                        params={"min_candidate_freq": min_candidate_freq})


def score_keywords(corpus: Corpus, min_candidate_freq: int = DEFAULT_MIN_FREQ,
                   taggers: Mapping[str, ExternalTagger] | None = None, threads: int = 1) -> KeywordIndex:
    """Extract candidates from every abstract and score them (unsorted, in stem order)."""
    return score_candidates(extract_documents(corpus, taggers, threads), min_candidate_freq)


def selection_key(kw: Keyword):
    return (-kw.score, -kw.doc_freq, kw.stems)


def select_top(index: KeywordIndex, kw: int = DEFAULT_KW) -> KeywordIndex:
    """Keep the ``kw`` best keywords: score desc, doc_freq desc, stems ascending."""
    if kw < 1:
        raise ValueError("kw must be positive")
    kept = sorted(index.keywords, key=selection_key)[:kw]
    return KeywordIndex(kept, {k.stems: index.postings[k.stems] for k in kept}, index.num_docs,
                        index.scorer, dict(index.params, kw=kw))


# -- files --------------------------------------------------------------------

def write_keyword_index(index: KeywordIndex, out_dir, seed: int | None = None) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = dict(index.params, num_docs=index.num_docs, scorer=index.scorer)
    kw_path = out_dir / "keywords.csv"
    with open(kw_path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines(seed, params):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["stems", "surface", "lang", "doc_freq", "score"])
        for k in sorted(index.keywords, key=selection_key):
            writer.writerow([k.key, k.surface, k.language, k.doc_freq, repr(k.score)])
    post_path = out_dir / "postings.tsv"
    with open(post_path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines(seed, params):
            fh.write(line + "\n")
        for k in sorted(index.keywords, key=selection_key):
            docs = sorted(index.postings[k.stems])
            bad = [d for d in docs if "," in d or "\t" in d]
            if bad:
                raise ValueError(f"document id {bad[0]!r} cannot be written to a postings file")
            fh.write(f"{k.key}\t{','.join(docs)}\n")
    return kw_path, post_path


def read_postings(path) -> dict[tuple[str, ...], frozenset[str]]:
    postings = {}
    with open(path, encoding="utf-8") as fh:
        for line in strip_comments(fh):
            if not line.strip():
                continue
            key, docs = line.rstrip("\n").split("\t")
            postings[tuple(key.split(" "))] = frozenset(d for d in docs.split(",") if d)
    return postings


def read_keyword_index(out_dir) -> KeywordIndex:
    out_dir = Path(out_dir)
    kw_path = out_dir / "keywords.csv"
    params = read_header_params(kw_path)
    with open(kw_path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(strip_comments(fh)))
    keywords = [Keyword(tuple(r["stems"].split(" ")), r["surface"], r["lang"], int(r["doc_freq"]),
                        float(r["score"])) for r in rows]
    postings = read_postings(out_dir / "postings.tsv")
    extra = {k: v for k, v in params.items() if k not in ("num_docs", "scorer")}
    return KeywordIndex(keywords, {k.stems: postings[k.stems] for k in keywords},
                        int(params["num_docs"]), params.get("scorer", SCORER), extra)


def keyword_documents(index: KeywordIndex, keys: Iterable[str] | None = None) -> dict[str, set[str]]:
    """Document id -> keyword keys (space-joined stems), optionally restricted to ``keys``."""
    allowed = set(keys) if keys is not None else None
    docs: dict[str, set[str]] = {}
    for kw in index.keywords:
        if allowed is not None and kw.key not in allowed:
            continue
        for d in index.postings[kw.stems]:
            docs.setdefault(d, set()).add(kw.key)
    return docs
