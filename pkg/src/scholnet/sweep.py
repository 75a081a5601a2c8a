"""Sensitivity sweep of the semantic network over filter parameters."""
from __future__ import annotations

import csv
import itertools
import json
import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from ._meta import header_lines
from .keywords.scoring import KeywordIndex
from .semantic import CooccurrenceMatrix, FilterParams, filter_network, semantic_communities

log = logging.getLogger(__name__)

CSV_COLUMNS = ["kmax", "theta", "fmin", "fmax", "vertices", "communities", "modularity",
               "concentration", "pareto"]


@dataclass
class SweepGrid:
    k_max: list[int]
    theta_w: list[int]
    f_min: list[int]
    f_max: list[int]
    seed: int = 0

    def __post_init__(self):
        for name in ("k_max", "theta_w", "f_min", "f_max"):
            values = getattr(self, name)
            if not values:
                raise ValueError(f"grid axis {name} is empty")
            if any(v <= 0 for v in values):
                raise ValueError(f"grid axis {name} has non-positive values")

    @classmethod
    def from_dict(cls, raw: dict, seed: int | None = None) -> "SweepGrid":
        """Accepts the field names or the CSV column names (kmax, theta, fmin, fmax)."""
        aliases = {"kmax": "k_max", "theta": "theta_w", "fmin": "f_min", "fmax": "f_max"}
        kwargs = {aliases.get(k, k): v for k, v in raw.items()}
        unknown = set(kwargs) - {"k_max", "theta_w", "f_min", "f_max", "seed"}
        if unknown:
            raise ValueError(f"unknown grid keys {sorted(unknown)}")
        if seed is not None:
            kwargs["seed"] = seed
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path, seed: int | None = None) -> "SweepGrid":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")), seed)

    def combinations(self) -> list[tuple[int, int, int, int]]:
        return list(itertools.product(self.k_max, self.theta_w, self.f_min, self.f_max))


@dataclass
class SweepPoint:
    params: FilterParams
    num_vertices: int
    num_edges: int
    num_communities: int
    modularity: float | None
    concentration: float | None
    seed: int
    community_sizes: list[int] = field(default_factory=list, repr=False)
    error: str | None = None


def concentration_index(sizes: Sequence[int]) -> float:
    """sum s_k^2 / (sum s_k)^2; 1 for a single community, 1/C when perfectly balanced."""
    total = sum(sizes)
    return sum(s * s for s in sizes) / (total * total)


def evaluate_point(matrix: CooccurrenceMatrix, index: KeywordIndex, params: FilterParams,
                   seed: int) -> SweepPoint:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        graph = filter_network(matrix, index, params)
    if graph.number_of_nodes() == 0:
        return SweepPoint(params, 0, 0, 0, None, None, seed)
    try:
        sc = semantic_communities(graph, seed)
    except ValueError as exc:
        return SweepPoint(params, graph.number_of_nodes(), graph.number_of_edges(), 0, None, None,
                          seed, error=str(exc))
    sizes = sc.result.community_sizes
    return SweepPoint(params, graph.number_of_nodes(), graph.number_of_edges(), len(sizes),
                      sc.result.modularity, concentration_index(sizes), seed, list(sizes))


def run_sweep(matrix: CooccurrenceMatrix, index: KeywordIndex, grid: SweepGrid,
              threads: int = 1) -> list[SweepPoint]:
    """Evaluate the Cartesian grid in canonical order (k_max, theta_w, f_min, f_max).

    The point at position ``i`` of the full product uses seed ``grid.seed + i``;
    combinations with f_min > f_max are skipped (and logged) but keep their
    position. A single point is reproduced by a one-point grid seeded with
    ``grid.seed + i``.
    """
    jobs = []
    for i, (k, t, lo, hi) in enumerate(grid.combinations()):
        if lo > hi:
            log.info("skipping invalid combination f_min=%d > f_max=%d", lo, hi)
            continue
        jobs.append((FilterParams(k, t, lo, hi), grid.seed + i))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda job: evaluate_point(matrix, index, *job), jobs))
    return [evaluate_point(matrix, index, p, s) for p, s in jobs]


def _objectives(p: SweepPoint) -> tuple[float, float, float]:
    return (p.modularity, float(p.num_vertices), -p.concentration)


def dominates(a: SweepPoint, b: SweepPoint) -> bool:
    """Higher modularity, more vertices, lower concentration; strict in at least one."""
    oa, ob = _objectives(a), _objectives(b)
    return all(x >= y for x, y in zip(oa, ob)) and any(x > y for x, y in zip(oa, ob))


def pareto_front(points: Sequence[SweepPoint], band: tuple[int, int] | None = None) -> list[SweepPoint]:
    """Non-dominated points, in input order.

    Points without a modularity are ignored. ``band`` optionally restricts
    candidates to a feasible range of community counts before comparison.
    """
    if not points:
        raise ValueError("no sweep points")
    valid = [p for p in points if p.modularity is not None]
    if not valid:
        raise ValueError("every sweep point is empty; no front to extract")
    if band is not None:
        lo, hi = band
        valid = [p for p in valid if lo <= p.num_communities <= hi]
    # sort by objectives descending so a point can only be dominated by an earlier one
    order = sorted(range(len(valid)), key=lambda i: tuple(-x for x in _objectives(valid[i])))
    front: list[int] = []
    for i in order:
        if not any(dominates(valid[j], valid[i]) for j in front):
            front.append(i)
    keep = set(front)
    return [p for i, p in enumerate(valid) if i in keep]


def write_sweep_csv(points: Sequence[SweepPoint], front: Sequence[SweepPoint], path,
                    seed: int | None = None, params: dict | None = None) -> None:
    on_front = {id(p) for p in front}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines(seed, params):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for p in points:
            writer.writerow([
                p.params.k_max, p.params.theta_w, p.params.f_min, p.params.f_max,
                p.num_vertices, p.num_communities,
                "" if p.modularity is None else repr(p.modularity),
                "" if p.concentration is None else repr(p.concentration),
                int(id(p) in on_front),
            ])
