"""Command line entry point: one subcommand per stage plus ``pipeline``.

Exit codes: 0 success, 1 usage error, 2 data error (bad or missing input).

Config precedence for ``pipeline``: built-in defaults < ``--config`` file <
command line flags. Every output file starts with a metadata header; stage
headers never include input paths or thread counts, so a stage run alone and
the same stage run inside ``pipeline`` produce identical bytes.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import FORMAT_VERSION, __version__
from ._meta import header_lines, meta_record
from .catalog import ProviderConfig, enrich
from .citation import (InsufficientDataError, build_citation_graph, core_filter, maximal_cliques,
                       network_stats, rank_size_fit)
from .community import bootstrap_significance, louvain
from .corpus import CorpusError, corpus_stats, dedup_by_title, ingest, load_store, save_store
from .graph import GraphError, export, import_graph, read_partition_csv, write_partition_csv
from .keywords import ExternalTagger, read_keyword_index, score_keywords, select_top, write_keyword_index
from .keywords.scoring import NoCandidatesError
from .keywords.tagging import TaggerError
from .keywords.text import DataIntegrityError
from .measures import (citation_probabilities, composition, correlation_matrix, one_hot_citation,
                       originality, semantic_probabilities, write_measures)
from .semantic import FilterParams, build_cooccurrence, filter_network, semantic_communities
from .sweep import SweepGrid, pareto_front, run_sweep, write_sweep_csv

log = logging.getLogger("scholnet")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class DataError(Exception):
    pass


class UsageError(Exception):
    pass


DATA_ERRORS = (DataError, CorpusError, GraphError, InsufficientDataError, NoCandidatesError,
               TaggerError, DataIntegrityError, OSError, ValueError, KeyError)


def bundled_minicorpus() -> Path:
    return Path(str(resources.files("scholnet") / "data" / "minicorpus"))


# -- configuration -------------------------------------------------------------

@dataclass
class IngestConfig:
    store: str | None = None
    refs: str | None = None
    links: str | None = None
    seeds: str | None = None
    seed_source: str | None = None
    dedup: bool = False


@dataclass
class EnrichConfig:
    base_url: str
    name: str = "catalog"
    rate_limit: float = 1.0
    timeout: float = 10.0
    cache_dir: str = ".scholnet-cache"
    max_in_flight: int = 4


@dataclass
class CommunityConfig:
    bootstrap: int = 20
    mode: str = "uniform"
    top_titles: int = 5


@dataclass
class RankSizeConfig:
    regimes: int = 3
    min_points: int = 10


@dataclass
class CliqueConfig:
    min_size: int = 3


@dataclass
class KeywordConfig:
    kw: int = 50_000
    min_freq: int = 3
    tagger_cmd: dict[str, str] = field(default_factory=dict)


@dataclass
class SemanticConfig:
    scaled: bool = False
    kmax: int | None = None
    theta: int | None = None
    fmin: int | None = None
    fmax: int | None = None
    top_n: int = 10
    noise_floor: int = 4


@dataclass
class SweepConfig:
    grid: dict
    band: list[int] | None = None


@dataclass
class RunConfig:
    out: str = "scholnet-out"
    seed: int = 0
    threads: int = 1
    ingest: IngestConfig = field(default_factory=IngestConfig)
    enrich: EnrichConfig | None = None
    communities: CommunityConfig = field(default_factory=CommunityConfig)
    ranksize: RankSizeConfig = field(default_factory=RankSizeConfig)
    cliques: CliqueConfig = field(default_factory=CliqueConfig)
    keywords: KeywordConfig = field(default_factory=KeywordConfig)
    semantic: SemanticConfig = field(default_factory=SemanticConfig)
    sweep: SweepConfig | None = None

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        blocks = {"ingest": IngestConfig, "enrich": EnrichConfig, "communities": CommunityConfig,
                  "ranksize": RankSizeConfig, "cliques": CliqueConfig, "keywords": KeywordConfig,
                  "semantic": SemanticConfig, "sweep": SweepConfig}
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise DataError(f"unknown config keys {sorted(unknown)}")
        kwargs = {}
        for key, value in raw.items():
            if key in blocks and value is not None:
                if not isinstance(value, dict):
                    raise DataError(f"config block {key!r} must be an object")
                try:
                    kwargs[key] = blocks[key](**value)
                except TypeError as exc:
                    raise DataError(f"config block {key!r}: {exc}") from None
            else:
                kwargs[key] = value
        return cls(**kwargs)


def filter_params(cfg: SemanticConfig, num_docs: int) -> FilterParams:
    base = FilterParams.scaled(num_docs) if cfg.scaled else FilterParams()
    overrides = {name: value for name, value in (("k_max", cfg.kmax), ("theta_w", cfg.theta),
                                                 ("f_min", cfg.fmin), ("f_max", cfg.fmax))
                 if value is not None}
    return replace(base, **overrides)


# -- helpers -------------------------------------------------------------------

def _need(path) -> Path:
    p = Path(path)
    if not p.exists():
        raise DataError(f"{p}: no such file or directory")
    return p


def _write_csv(path: Path, header: list[str], rows, seed=None, params=None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines(seed, params):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload: dict, seed=None, params=None) -> None:
    payload = {"meta": meta_record(seed, params), **payload}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")


def _load_corpus(store):
    return load_store(_need(store))


# -- stages --------------------------------------------------------------------

def stage_ingest(cfg: IngestConfig, out_store: Path) -> Path:
    if cfg.store:
        corpus = _load_corpus(cfg.store)
        diag = None
    else:
        if not cfg.refs or not cfg.links:
            raise UsageError("ingest needs either a store or both refs and links")
        corpus, diag = ingest(_need(cfg.refs), _need(cfg.links),
                              _need(cfg.seeds) if cfg.seeds else None, cfg.seed_source)
    if cfg.dedup:
        corpus = dedup_by_title(corpus)
    save_store(corpus, out_store)
    report = {"stats": asdict(corpus_stats(corpus)), "ingest": asdict(diag) if diag else None}
    _write_json(out_store / "ingest_report.json", report, params={"dedup": cfg.dedup})
    return out_store


def stage_enrich(store, cfg: EnrichConfig, out_store: Path) -> Path:
    corpus = _load_corpus(store)
    provider = ProviderConfig(cfg.name, cfg.base_url, cfg.rate_limit, cfg.timeout, cfg.cache_dir,
                              cfg.max_in_flight)
    enriched, diag = enrich(corpus, provider)
    save_store(enriched, out_store)
    _write_json(out_store / "enrich_report.json",
                {"diagnostics": asdict(diag), "stats": asdict(corpus_stats(enriched))},
                params={"provider": cfg.name})
    return out_store


def stage_citation_graph(store, out_dir: Path, seed: int) -> Path:
    corpus = _load_corpus(store)
    out_dir.mkdir(parents=True, exist_ok=True)
    graph = build_citation_graph(corpus)
    core = core_filter(graph)
    export(graph, out_dir / "citation.gexf", seed=seed, params={"graph": "citation"})
    export(core, out_dir / "citation_core.gexf", seed=seed, params={"graph": "citation", "core_filter": True})
    _write_json(out_dir / "stats.json", {
        "full": asdict(network_stats(graph, corpus.seed_ids)),
        "core": asdict(network_stats(core, corpus.seed_ids)),
    }, seed)
    return out_dir


def stage_communities(graph_path, out_dir: Path, seed: int, cfg: CommunityConfig, threads: int = 1) -> dict:
    graph = import_graph(_need(graph_path))
    out_dir.mkdir(parents=True, exist_ok=True)
    result = louvain(graph, seed)
    params = {"bootstrap": cfg.bootstrap, "mode": cfg.mode}
    write_partition_csv(result.partition, out_dir / "partition.csv", seed, params)
    summary = {"modularity": result.modularity, "num_communities": result.num_communities,
               "community_sizes": result.community_sizes, "levels": result.levels}
    if cfg.bootstrap > 0:
        boot = bootstrap_significance(graph, result.partition, cfg.bootstrap, seed, cfg.mode, threads)
        summary["bootstrap"] = {"mean": boot.mean, "std": boot.std, "num_samples": boot.num_samples,
                                "mode": boot.mode, "samples": boot.sample_modularities}
    _write_json(out_dir / "summary.json", summary, seed, params)

    cited = graph.in_degrees() if graph.directed else None
    rows = []
    for c, members in enumerate(result.partition.members()):
        def score(node):
            return cited[graph.index(node)] if cited is not None else graph.degree(node)
        ranked = sorted(members, key=lambda n: (-score(n), n))[:cfg.top_titles]
        rows.extend([c, k + 1, n, int(score(n)), graph.label(n)] for k, n in enumerate(ranked))
    _write_csv(out_dir / "top_cited.csv", ["community", "rank", "node_id", "citations", "title"], rows,
               seed, params)
    return summary


def stage_ranksize(graph_path, out_dir: Path, cfg: RankSizeConfig, seed: int) -> Path:
    graph = import_graph(_need(graph_path))
    out_dir.mkdir(parents=True, exist_ok=True)
    fit = rank_size_fit(graph, cfg.regimes, cfg.min_points)
    params = asdict(cfg)
    fitted = fit.fitted()
    rows, fit_rows = [], []
    for k, (rank, cit) in enumerate(zip(fit.ranks.tolist(), fit.citations.tolist())):
        reg = fit.regime_of(int(rank))
        rows.append([int(rank), int(cit), reg, repr(fit.regimes[reg].alpha)])
        fit_rows.append([int(rank), repr(float(fitted[k])), reg])
    _write_csv(out_dir / "ranksize.csv", ["rank", "citations", "regime", "alpha"], rows, seed, params)
    _write_csv(out_dir / "ranksize_fit.csv", ["rank", "fitted", "regime"], fit_rows, seed, params)
    _write_json(out_dir / "regimes.json", {"regimes": [asdict(r) for r in fit.regimes], "sse": fit.sse},
                seed, params)
    return out_dir


def stage_cliques(graph_path, out_path: Path, cfg: CliqueConfig, seed: int) -> int:
    graph = import_graph(_need(graph_path))
    cliques = maximal_cliques(graph, cfg.min_size)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines(seed, asdict(cfg)):
            fh.write(line + "\n")
        for clique in cliques:
            fh.write(",".join(clique) + "\n")
    return len(cliques)


def stage_keywords(store, out_dir: Path, cfg: KeywordConfig, seed: int, threads: int = 1) -> int:
    corpus = _load_corpus(store)
    taggers = {lang: ExternalTagger(cmd) for lang, cmd in cfg.tagger_cmd.items()}
    index = select_top(score_keywords(corpus, cfg.min_freq, taggers, threads), cfg.kw)
    write_keyword_index(index, out_dir, seed)
    return len(index)


def stage_semantic(keywords_dir, out_dir: Path, cfg: SemanticConfig, seed: int) -> dict:
    index = read_keyword_index(_need(keywords_dir))
    params = filter_params(cfg, index.num_docs)
    out_dir.mkdir(parents=True, exist_ok=True)
    graph = filter_network(build_cooccurrence(index), index, params)
    header = {"filter": asdict(params), "filter_order": graph.meta["filter_order"],
              "top_n": cfg.top_n, "noise_floor": cfg.noise_floor}
    if graph.number_of_nodes() == 0:
        raise DataError(f"{keywords_dir}: semantic network is empty for {params}")
    sc = semantic_communities(graph, seed, cfg.top_n, cfg.noise_floor)
    export(graph, out_dir / "semantic.gexf", partition=sc.result.partition, seed=seed, params=header)
    write_partition_csv(sc.result.partition, out_dir / "partition.csv", seed, header)
    rows = []
    for c, keys in sc.top_keywords.items():
        for k, key in enumerate(keys):
            a = graph.attrs(key)
            rows.append([c, k + 1, key, graph.label(key), a["doc_freq"], repr(a["score"]), int(c in sc.noise)])
    _write_csv(out_dir / "top_keywords.csv", ["community", "rank", "stems", "surface", "doc_freq", "score",
                                               "noise"], rows, seed, header)
    summary = {"modularity": sc.result.modularity, "num_communities": sc.result.num_communities,
               "community_sizes": sc.result.community_sizes, "num_vertices": graph.number_of_nodes(),
               "num_edges": graph.number_of_edges(), "noise": sorted(sc.noise)}
    _write_json(out_dir / "summary.json", summary, seed, header)
    return summary


def stage_sweep(keywords_dir, grid: SweepGrid, out_path: Path, band, threads: int = 1) -> int:
    index = read_keyword_index(_need(keywords_dir))
    points = run_sweep(build_cooccurrence(index), index, grid, threads)
    band = tuple(band) if band else None
    try:
        front = pareto_front(points, band)
    except ValueError as exc:
        log.warning("no Pareto front: %s", exc)
        front = []
    out_path.parent.mkdir(parents=True, exist_ok=True)
    params = {"grid": {"k_max": grid.k_max, "theta_w": grid.theta_w, "f_min": grid.f_min,
                       "f_max": grid.f_max}, "band": list(band) if band else None}
    write_sweep_csv(points, front, out_path, grid.seed, params)
    return len(points)


def stage_measures(store, citation_partition, keywords_dir, semantic_partition, out_dir: Path, seed: int
                   ) -> dict:
    corpus = _load_corpus(store)
    cit_part = read_partition_csv(_need(citation_partition))
    sem_part = read_partition_csv(_need(semantic_partition))
    index = read_keyword_index(_need(keywords_dir))
    sem = semantic_probabilities(corpus, index, sem_part)
    cit = citation_probabilities(corpus, cit_part)
    sem_table = originality(sem, cit_part)
    cit_table = originality(cit, cit_part)
    comp = composition(sem, cit_part)
    corr = correlation_matrix(sem, one_hot_citation(cit_part))
    write_measures(out_dir, sem_table, cit_table, comp, corr, seed,
                   {"semantic_classes": sem_part.num_communities, "citation_classes": cit_part.num_communities})
    return corr.summary


def run_pipeline(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    icfg = cfg.ingest
    if not (icfg.store or icfg.refs):
        icfg = replace(icfg, store=str(bundled_minicorpus()))
    store = stage_ingest(icfg, out / "store")
    if cfg.enrich is not None:
        store = stage_enrich(store, cfg.enrich, out / "store_enriched")
    stage_citation_graph(store, out / "citation", cfg.seed)
    core = out / "citation" / "citation_core.gexf"
    summary = stage_communities(core, out / "communities", cfg.seed, cfg.communities, cfg.threads)
    print(f"citation: Q={summary['modularity']:.6f} C={summary['num_communities']}")
    stage_ranksize(out / "citation" / "citation.gexf", out / "ranksize", cfg.ranksize, cfg.seed)
    stage_cliques(core, out / "cliques.txt", cfg.cliques, cfg.seed)
    stage_keywords(store, out / "keywords", cfg.keywords, cfg.seed, cfg.threads)
    sem = stage_semantic(out / "keywords", out / "semantic", cfg.semantic, cfg.seed)
    print(f"semantic: Q={sem['modularity']:.6f} C={sem['num_communities']} V={sem['num_vertices']}")
    if cfg.sweep is not None:
        grid = SweepGrid.from_dict(cfg.sweep.grid, cfg.seed)
        stage_sweep(out / "keywords", grid, out / "sweep.csv", cfg.sweep.band, cfg.threads)
    stage_measures(store, out / "communities" / "partition.csv", out / "keywords",
                   out / "semantic" / "partition.csv", out / "measures", cfg.seed)
    return out


# -- argument parsing ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _tagger_pairs(values: Sequence[str] | None) -> dict[str, str]:
    out = {}
    for item in values or []:
        lang, sep, cmd = item.partition("=")
        if not sep or len(lang) != 2 or not cmd:
            raise UsageError(f"--tagger-cmd expects LANG=COMMAND, got {item!r}")
        out[lang] = cmd
    return out


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    common.add_argument("--threads", type=int, default=None, help="worker pool width (default 1)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="scholnet", description="Citation and semantic network analysis of a bibliographic corpus.")
    p.add_argument("--version", action="version",
                   version=f"scholnet {__version__} (output format {FORMAT_VERSION})")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ingest", parents=[common], help="build a corpus store from refs/links files")
    s.add_argument("--refs")
    s.add_argument("--links")
    s.add_argument("--seeds", help="file with one seed reference id per line")
    s.add_argument("--seed-source", help="mark references with this source tag as seeds")
    s.add_argument("--store", help="existing store to copy instead of refs/links")
    s.add_argument("--dedup", action="store_true", help="merge references with equal normalized titles")
    s.add_argument("--out", required=True, help="output store directory")

    s = sub.add_parser("enrich", parents=[common], help="fill missing abstracts from a catalog provider")
    s.add_argument("--store", required=True)
    s.add_argument("--provider-url", required=True)
    s.add_argument("--provider-name", default="catalog")
    s.add_argument("--rate-limit", type=float, default=1.0)
    s.add_argument("--timeout", type=float, default=10.0)
    s.add_argument("--cache-dir", default=".scholnet-cache", help="overridden by $SCHOLNET_CACHE")
    s.add_argument("--max-in-flight", type=int, default=4)
    s.add_argument("--out", required=True)

    s = sub.add_parser("citation-graph", parents=[common], help="citation graph, core filter and statistics")
    s.add_argument("--store", required=True)
    s.add_argument("--out", required=True)

    s = sub.add_parser("communities", parents=[common], help="Louvain communities of a graph file")
    s.add_argument("--graph", required=True)
    s.add_argument("--bootstrap", type=int, default=0, help="number of rewired samples (0 to skip)")
    s.add_argument("--mode", choices=["uniform", "degree"], default="uniform")
    s.add_argument("--top-titles", type=int, default=5)
    s.add_argument("--out", required=True)

    s = sub.add_parser("ranksize", parents=[common], help="piecewise rank-size fit of citation counts")
    s.add_argument("--graph", required=True)
    s.add_argument("--regimes", type=int, default=3)
    s.add_argument("--min-points", type=int, default=10)
    s.add_argument("--out", required=True)

    s = sub.add_parser("cliques", parents=[common], help="maximal cliques, one per line")
    s.add_argument("--graph", required=True)
    s.add_argument("--min-size", type=int, default=3)
    s.add_argument("--out", required=True)

    s = sub.add_parser("keywords", parents=[common], help="extract and score keywords from abstracts")
    s.add_argument("--store", required=True)
    s.add_argument("--kw", type=int, default=50_000)
    s.add_argument("--min-freq", type=int, default=3)
    s.add_argument("--tagger-cmd", action="append", metavar="LANG=COMMAND")
    s.add_argument("--out", required=True)

    s = sub.add_parser("semantic-graph", parents=[common], help="filtered co-occurrence network and its communities")
    s.add_argument("--keywords", required=True, help="directory written by the keywords stage")
    s.add_argument("--kmax", type=int)
    s.add_argument("--theta", type=int)
    s.add_argument("--fmin", type=int)
    s.add_argument("--fmax", type=int)
    s.add_argument("--scaled", action="store_true",
                   help="rescale the default thresholds to the corpus size before applying flags")
    s.add_argument("--top-n", type=int, default=10)
    s.add_argument("--noise-floor", type=int, default=4)
    s.add_argument("--out", required=True)

    s = sub.add_parser("sweep", parents=[common], help="filter parameter grid and Pareto front")
    s.add_argument("--keywords", required=True)
    s.add_argument("--grid", required=True, help="JSON object with kmax, theta, fmin, fmax arrays")
    s.add_argument("--band", type=int, nargs=2, metavar=("MIN", "MAX"),
                   help="only consider points with a community count in [MIN, MAX]")
    s.add_argument("--out", required=True)

    s = sub.add_parser("measures", parents=[common], help="originality, composition and correlation")
    s.add_argument("--store", required=True)
    s.add_argument("--citation-partition", required=True)
    s.add_argument("--keywords", required=True)
    s.add_argument("--semantic-partition", required=True)
    s.add_argument("--out", required=True)

    s = sub.add_parser("pipeline", parents=[common], help="run every stage in order")
    s.add_argument("--config", help="JSON run configuration (default: the bundled mini-corpus config "
                                    "when --store is not given either)")
    s.add_argument("--store", help="input corpus store (default: bundled mini-corpus)")
    s.add_argument("--out")
    return p


def _dispatch(args) -> int:
    seed = 0 if args.seed is None else args.seed
    threads = 1 if args.threads is None else args.threads
    if threads < 1:
        raise UsageError("--threads must be >= 1")
    cmd = args.command
    if cmd == "ingest":
        cfg = IngestConfig(args.store, args.refs, args.links, args.seeds, args.seed_source, args.dedup)
        stage_ingest(cfg, Path(args.out))
    elif cmd == "enrich":
        cfg = EnrichConfig(args.provider_url, args.provider_name, args.rate_limit, args.timeout,
                           args.cache_dir, args.max_in_flight)
        stage_enrich(args.store, cfg, Path(args.out))
    elif cmd == "citation-graph":
        stage_citation_graph(args.store, Path(args.out), seed)
    elif cmd == "communities":
        cfg = CommunityConfig(args.bootstrap, args.mode, args.top_titles)
        summary = stage_communities(args.graph, Path(args.out), seed, cfg, threads)
        print(f"Q={summary['modularity']:.6f} C={summary['num_communities']}")
        if "bootstrap" in summary:
            b = summary["bootstrap"]
            print(f"bootstrap_mean={b['mean']:.6g} bootstrap_std={b['std']:.6g} n={b['num_samples']}")
    elif cmd == "ranksize":
        stage_ranksize(args.graph, Path(args.out), RankSizeConfig(args.regimes, args.min_points), seed)
    elif cmd == "cliques":
        n = stage_cliques(args.graph, Path(args.out), CliqueConfig(args.min_size), seed)
        print(f"{n} maximal cliques")
    elif cmd == "keywords":
        cfg = KeywordConfig(args.kw, args.min_freq, _tagger_pairs(args.tagger_cmd))
        n = stage_keywords(args.store, Path(args.out), cfg, seed, threads)
        print(f"{n} keywords")
    elif cmd == "semantic-graph":
        cfg = SemanticConfig(args.scaled, args.kmax, args.theta, args.fmin, args.fmax, args.top_n,
                             args.noise_floor)
        s = stage_semantic(args.keywords, Path(args.out), cfg, seed)
        print(f"Q={s['modularity']:.6f} C={s['num_communities']} V={s['num_vertices']}")
    elif cmd == "sweep":
        grid = SweepGrid.from_json(_need(args.grid), seed)
        n = stage_sweep(args.keywords, grid, Path(args.out), args.band, threads)
        print(f"{n} sweep points")
    elif cmd == "measures":
        summary = stage_measures(args.store, args.citation_partition, args.keywords, args.semantic_partition,
                                 Path(args.out), seed)
        print("rho " + " ".join(f"{k}={v}" for k, v in summary.items()))
    elif cmd == "pipeline":
        config_path = args.config
        if config_path is None and args.store is None:
            config_path = bundled_minicorpus() / "config.json"
        raw = json.loads(_need(config_path).read_text(encoding="utf-8")) if config_path else {}
        cfg = RunConfig.from_dict(raw)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.threads is not None:
            cfg.threads = threads
        if args.out is not None:
            cfg.out = args.out
        if args.store is not None:
            cfg.ingest = IngestConfig(store=args.store, dedup=cfg.ingest.dedup)
        out = run_pipeline(cfg)
        print(f"outputs in {out}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args)
    except UsageError as exc:
        print(f"scholnet: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        print(f"scholnet: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
