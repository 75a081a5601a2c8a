"""Interdisciplinarity measures over two classifications of the same references.

A reference is described, for each classification, by a probability vector
over classes. Vectors without any evidence (no kept keyword, no incoming
citation) are stored as ``None`` and excluded from every aggregate; the
number excluded is always reported.
"""
from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from ._meta import header_lines, meta_record
from .corpus import Corpus
from .graph import Partition
from .keywords.scoring import KeywordIndex

GRID_POINTS = 256
BANDWIDTH_CLIP = (0.01, 0.2)


@dataclass
class ClassProbabilities:
    classification: str
    num_classes: int
    vectors: dict[str, np.ndarray | None]

    def __post_init__(self):
        for rid, v in self.vectors.items():
            if v is None:
                continue
            if len(v) != self.num_classes or np.any(v < 0) or abs(v.sum() - 1.0) > 1e-9:
                raise ValueError(f"invalid probability vector for {rid!r}")

    def defined(self) -> dict[str, np.ndarray]:
        return {rid: v for rid, v in self.vectors.items() if v is not None}

    @property
    def num_undefined(self) -> int:
        return sum(1 for v in self.vectors.values() if v is None)


@dataclass
class OriginalityTable:
    values: dict[str, float]
    labels: dict[str, int | None]
    num_undefined: int = 0
    num_classes: int = 0


@dataclass
class ClassDensity:
    citation_class: int
    count: int
    mean: float
    bandwidth: float | None = None
    density: np.ndarray | None = field(default=None, repr=False)


@dataclass
class CompositionMatrix:
    rows: dict[int, np.ndarray]
    counts: dict[int, int]
    omitted: list[int] = field(default_factory=list)


@dataclass
class CorrelationMatrix:
    values: np.ndarray
    num_common: int
    summary: dict[str, float | int | None]


def _from_counts(counts: np.ndarray) -> np.ndarray | None:
    total = counts.sum()
    if total <= 0:
        return None
    return counts / total


def semantic_probabilities(corpus: Corpus | Iterable[str], index: KeywordIndex, partition: Partition,
                           counts: Mapping[str, Mapping[str, int]] | None = None) -> ClassProbabilities:
    """Share of a reference's kept keywords falling in each semantic class.

    Only keywords assigned by ``partition`` (i.e. present in the filtered
    semantic graph) count, each once per abstract. ``counts`` optionally
    supplies within-abstract multiplicities ``{ref_id: {keyword: n}}``.
    """
    ref_ids = list(corpus.references) if isinstance(corpus, Corpus) else list(corpus)
    k = partition.num_communities
    per_doc: dict[str, np.ndarray] = {}
    for kw in index.keywords:
        c = partition.assignment.get(kw.key)
        if c is None:
            continue
        for d in index.postings[kw.stems]:
            weight = 1.0
            if counts is not None:
                weight = float(counts.get(d, {}).get(kw.key, 1))
            per_doc.setdefault(d, np.zeros(k))[c] += weight
    vectors = {rid: (_from_counts(per_doc[rid]) if rid in per_doc else None) for rid in ref_ids}
    return ClassProbabilities("semantic", k, vectors)


def citation_probabilities(corpus: Corpus, partition: Partition) -> ClassProbabilities:
    """Share of a reference's incoming citations coming from each citation class.

    Citers outside the partition are ignored.
    """
    k = partition.num_communities
    received: dict[str, np.ndarray] = {}
    for citing, cited in corpus.links:
        c = partition.assignment.get(citing)
        if c is None:
            continue
        received.setdefault(cited, np.zeros(k))[c] += 1
    vectors = {rid: (_from_counts(received[rid]) if rid in received else None) for rid in corpus.references}
    return ClassProbabilities("citation", k, vectors)


def one_hot_citation(partition: Partition) -> ClassProbabilities:
    k = partition.num_communities
    vectors = {}
    for rid in sorted(partition.assignment):
        v = np.zeros(k)
        v[partition[rid]] = 1.0
        vectors[rid] = v
    return ClassProbabilities("citation", k, vectors)


def originality_value(p: np.ndarray) -> float:
    return float(1.0 - np.dot(p, p))


def originality(probabilities: ClassProbabilities, citation_partition: Partition | None = None
                ) -> OriginalityTable:
    """1 - sum_j p_ij^2 per reference with a defined vector."""
    values = {rid: originality_value(v) for rid, v in sorted(probabilities.defined().items())}
    labels = {rid: (citation_partition.assignment.get(rid) if citation_partition else None) for rid in values}
    return OriginalityTable(values, labels, probabilities.num_undefined, probabilities.num_classes)


def silverman_bandwidth(x: np.ndarray) -> float:
    n = len(x)
    sd = float(np.std(x, ddof=1)) if n > 1 else 0.0
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34) if q75 > q25 else sd
    h = 0.9 * spread * n ** (-0.2)
    return float(np.clip(h, *BANDWIDTH_CLIP))


def gaussian_kde(x: np.ndarray, grid: np.ndarray, bandwidth: float) -> np.ndarray:
    z = (grid[:, None] - x[None, :]) / bandwidth
    return np.exp(-0.5 * z * z).sum(axis=1) / (len(x) * bandwidth * np.sqrt(2 * np.pi))


def originality_distributions(table: OriginalityTable, grid_points: int = GRID_POINTS
                              ) -> dict[int, ClassDensity]:
    """Per citation class: mean originality and a Gaussian KDE on [0, 1].

    Bandwidth follows Silverman's rule clipped to [0.01, 0.2]; classes with
    fewer than two members get a mean only.
    """
    if not table.values:
        raise ValueError("originality table is empty")
    grid = np.linspace(0.0, 1.0, grid_points)
    groups: dict[int, list[float]] = {}
    for rid, value in table.values.items():
        label = table.labels.get(rid)
        if label is not None:
            groups.setdefault(label, []).append(value)
    out = {}
    for c in sorted(groups):
        x = np.asarray(groups[c])
        dens = ClassDensity(c, len(x), float(x.mean()))
        if len(x) >= 2:
            dens.bandwidth = silverman_bandwidth(x)
            dens.density = gaussian_kde(x, grid, dens.bandwidth)
        out[c] = dens
    return out


def composition(semantic_probs: ClassProbabilities, citation_partition: Partition) -> CompositionMatrix:
    """Mean semantic vector of each citation class over members with a defined vector."""
    sums: dict[int, np.ndarray] = {}
    counts: dict[int, int] = {}
    for rid, v in semantic_probs.defined().items():
        c = citation_partition.assignment.get(rid)
        if c is None:
            continue
        sums[c] = sums.get(c, 0) + v
        counts[c] = counts.get(c, 0) + 1
    omitted = [c for c in range(citation_partition.num_communities) if c not in counts]
    if omitted:
        warnings.warn(f"citation classes without semantic evidence omitted: {omitted}", stacklevel=2)
    rows = {c: sums[c] / counts[c] for c in sorted(counts)}
    return CompositionMatrix(rows, {c: counts[c] for c in sorted(counts)}, omitted)


def correlation_matrix(semantic_probs: ClassProbabilities, citation_one_hot: ClassProbabilities
                       ) -> CorrelationMatrix:
    """Pearson correlation between every semantic class and every citation class.

    Computed over references defined in both classifications, with unbiased
    covariance and variances. Entries involving a constant series are NaN.
    """
    sem = semantic_probs.defined()
    cit = citation_one_hot.defined()
    common = sorted(sem.keys() & cit.keys())
    if len(common) < 2:
        raise ValueError(f"correlation needs >= 2 references in both classifications, got {len(common)}")
    s = np.array([sem[r] for r in common])
    c = np.array([cit[r] for r in common])
    n = len(common)
    sc = s - s.mean(axis=0)
    cc = c - c.mean(axis=0)
    cov = sc.T @ cc / (n - 1)
    sd_s = np.sqrt((sc * sc).sum(axis=0) / (n - 1))
    sd_c = np.sqrt((cc * cc).sum(axis=0) / (n - 1))
    denom = np.outer(sd_s, sd_c)
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.where(denom > 0, cov / np.where(denom > 0, denom, 1.0), np.nan)
    rho = np.clip(rho, -1.0, 1.0)
    return CorrelationMatrix(rho, n, correlation_summary(rho))


def correlation_summary(rho: np.ndarray) -> dict[str, float | int | None]:
    vals = rho[np.isfinite(rho)]
    if vals.size == 0:
        return {"min": None, "mean": None, "max": None, "decile_10": None, "decile_90": None,
                "num_defined": 0, "num_undefined": int(rho.size)}
    return {
        "min": float(vals.min()),
        "mean": float(vals.mean()),
        "max": float(vals.max()),
        "decile_10": float(np.quantile(vals, 0.1)),
        "decile_90": float(np.quantile(vals, 0.9)),
        "num_defined": int(vals.size),
        "num_undefined": int(rho.size - vals.size),
    }


# -- outputs ------------------------------------------------------------------

def _csv(path: Path, header: list[str], rows, seed=None, params=None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines(seed, params):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and not np.isfinite(x)):
        return ""
    return repr(float(x))


def write_measures(out_dir, sem_table: OriginalityTable, cit_table: OriginalityTable,
                   comp: CompositionMatrix, corr: CorrelationMatrix, seed=None, params=None) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, table in (("semantic", sem_table), ("citation", cit_table)):
        rows = [[rid, _fmt(v), "" if table.labels.get(rid) is None else table.labels[rid]]
                for rid, v in sorted(table.values.items())]
        _csv(out_dir / f"originality_{name}.csv", ["ref_id", "originality", "citation_class"], rows,
             seed, params)

    grid = np.linspace(0.0, 1.0, GRID_POINTS)
    rows = []
    for name, table in (("semantic", sem_table), ("citation", cit_table)):
        for c, dens in originality_distributions(table).items() if table.values else []:
            if dens.density is None:
                continue
            rows.extend([name, c, _fmt(x), _fmt(y)] for x, y in zip(grid, dens.density))
    _csv(out_dir / "densities.csv", ["measure", "citation_class", "originality", "density"], rows, seed, params)

    k = len(next(iter(comp.rows.values()))) if comp.rows else 0
    rows = [[c, comp.counts[c]] + [_fmt(x) for x in comp.rows[c]] for c in comp.rows]
    _csv(out_dir / "composition.csv", ["citation_class", "members"] + [f"semantic_{j}" for j in range(k)],
         rows, seed, params)

    rows = [[i, j, _fmt(corr.values[i, j])]
            for i in range(corr.values.shape[0]) for j in range(corr.values.shape[1])]
    _csv(out_dir / "correlation.csv", ["semantic_class", "citation_class", "rho"], rows, seed, params)

    means = {}
    for name, table in (("semantic", sem_table), ("citation", cit_table)):
        dists = originality_distributions(table) if table.values else {}
        means[name] = {
            "class_means": {str(c): d.mean for c, d in dists.items()},
            "num_defined": len(table.values),
            "num_undefined": table.num_undefined,
        }
    summary = {
        "meta": meta_record(seed, params),
        "correlation": dict(corr.summary, num_common=corr.num_common),
        "originality": means,
        "composition_omitted": comp.omitted,
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                                          encoding="utf-8")
    return out_dir
