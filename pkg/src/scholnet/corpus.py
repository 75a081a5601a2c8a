"""References, citation links, ingestion, title deduplication and the on-disk store.

A store directory holds ``refs.jsonl`` (one JSON object per reference),
``links.csv`` (``citing_id,cited_id``) and ``meta.json``. Lines starting with
``#`` in the two record files are metadata comments and are skipped on read.
"""
from __future__ import annotations

import csv
import json
import unicodedata
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable

from ._meta import header_lines, meta_record

SCHEMA_VERSION = 1
REF_KEYS = ("id", "title", "abstract", "year", "authors", "language", "source")
MIN_YEAR, MAX_YEAR = 1500, 2100


class CorpusError(ValueError):
    """Malformed input; ``line`` is the 1-based line number when known."""

    def __init__(self, message: str, path=None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line


class DuplicateIdError(CorpusError):
    def __init__(self, ref_id: str, path=None, line: int | None = None):
        super().__init__(f"duplicate reference id {ref_id!r}", path, line)
        self.ref_id = ref_id


@dataclass(frozen=True)
class Reference:
    id: str
    title: str
    abstract: str | None = None
    year: int | None = None
    authors: tuple[str, ...] = ()
    language: str | None = None
    source: str = ""

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise CorpusError("reference id must be a nonempty string")
        title = " ".join(str(self.title).split())
        if not title:
            raise CorpusError(f"reference {self.id!r} has an empty title")
        object.__setattr__(self, "title", title)
        if self.abstract is not None and not self.abstract.strip():
            object.__setattr__(self, "abstract", None)
        if self.year is not None:
            if isinstance(self.year, bool) or not isinstance(self.year, int):
                raise CorpusError(f"reference {self.id!r}: year must be an integer")
            if not MIN_YEAR <= self.year <= MAX_YEAR:
                raise CorpusError(f"reference {self.id!r}: year {self.year} outside [{MIN_YEAR}, {MAX_YEAR}]")
        object.__setattr__(self, "authors", tuple(self.authors))
        if self.language is not None and (len(self.language) != 2 or not self.language.isalpha()):
            raise CorpusError(f"reference {self.id!r}: language must be a 2-letter code")

    @property
    def has_abstract(self) -> bool:
        return bool(self.abstract and self.abstract.strip())

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["authors"] = list(self.authors)
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "Reference":
        if not isinstance(rec, dict):
            raise CorpusError("record is not an object")
        unknown = set(rec) - set(REF_KEYS)
        if unknown:
            raise CorpusError(f"unknown keys {sorted(unknown)}")
        if "id" not in rec or "title" not in rec:
            raise CorpusError("record needs both 'id' and 'title'")
        authors = rec.get("authors") or ()
        if not isinstance(authors, (list, tuple)) or not all(isinstance(a, str) for a in authors):
            raise CorpusError("'authors' must be a list of strings")
        return cls(
            id=str(rec["id"]),
            title=str(rec["title"]),
            abstract=rec.get("abstract") or None,
            year=rec.get("year"),
            authors=tuple(authors),
            language=rec.get("language") or None,
            source=rec.get("source") or "",
        )


@dataclass
class IngestDiagnostics:
    num_references: int = 0
    num_links: int = 0
    duplicate_links: int = 0
    self_links: int = 0
    dangling_links: int = 0


@dataclass
class Corpus:
    references: dict[str, Reference] = field(default_factory=dict)
    links: list[tuple[str, str]] = field(default_factory=list)
    seed_ids: frozenset[str] = frozenset()

    def __post_init__(self):
        self.seed_ids = frozenset(self.seed_ids)
        missing = self.seed_ids - self.references.keys()
        if missing:
            raise CorpusError(f"seed ids not in corpus: {sorted(missing)[:5]}")
        seen = set()
        for citing, cited in self.links:
            if citing == cited:
                raise CorpusError(f"self-link on {citing!r}")
            if citing not in self.references or cited not in self.references:
                raise CorpusError(f"link ({citing!r}, {cited!r}) has a missing endpoint")
            if (citing, cited) in seen:
                raise CorpusError(f"duplicate link ({citing!r}, {cited!r})")
            seen.add((citing, cited))

    def __len__(self) -> int:
        return len(self.references)


@dataclass
class CorpusStats:
    num_references: int
    num_with_abstract: int
    abstract_coverage: float
    num_links: int
    num_seeds: int


def normalize_title(title: str) -> str:
    """Lowercase, drop everything but letters/digits/whitespace, collapse whitespace."""
    text = unicodedata.normalize("NFC", title).lower()
    text = "".join(ch for ch in text if ch.isalnum() or ch.isspace())
    return " ".join(text.split())


def build_corpus(refs: Iterable[Reference], links: Iterable[tuple[str, str]],
                 seed_ids: Iterable[str] = ()) -> tuple[Corpus, IngestDiagnostics]:
    """Enforce corpus invariants on raw records, counting what was dropped."""
    references: dict[str, Reference] = {}
    for ref in refs:
        if ref.id in references:
            raise DuplicateIdError(ref.id)
        references[ref.id] = ref
    diag = IngestDiagnostics()
    kept: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    for citing, cited in links:
        if citing == cited:
            diag.self_links += 1
        elif citing not in references or cited not in references:
            diag.dangling_links += 1
        elif (citing, cited) in seen:
            diag.duplicate_links += 1
        else:
            seen.add((citing, cited))
            kept.append((citing, cited))
    seeds = frozenset(s for s in seed_ids if s in references)
    diag.num_references = len(references)
    diag.num_links = len(kept)
    return Corpus(references, kept, seeds), diag


def read_references(path) -> list[Reference]:
    path = Path(path)
    refs: list[Reference] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            try:
                rec = json.loads(line)
                ref = Reference.from_record(rec)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"malformed record: {exc.msg}", path, lineno) from None
            except DuplicateIdError:
                raise
            except CorpusError as exc:
                raise CorpusError(str(exc), path, lineno) from None
            if ref.id in seen:
                raise DuplicateIdError(ref.id, path, lineno)
            seen.add(ref.id)
            refs.append(ref)
    return refs


def read_links(path) -> list[tuple[str, str]]:
    path = Path(path)
    links = []
    header_seen = False
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            row = next(csv.reader([line]))
            if not header_seen:
                if [c.strip() for c in row] != ["citing_id", "cited_id"]:
                    raise CorpusError("expected header 'citing_id,cited_id'", path, lineno)
                header_seen = True
                continue
            if len(row) != 2 or not row[0].strip() or not row[1].strip():
                raise CorpusError(f"expected 2 nonempty fields, got {len(row)}", path, lineno)
            links.append((row[0].strip(), row[1].strip()))
    return links


def read_seed_ids(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]


def ingest(refs_path, links_path, seeds_path=None, seed_source: str | None = None
           ) -> tuple[Corpus, IngestDiagnostics]:
    """Read a references file and a links file into a validated corpus.

    Seeds come from ``seeds_path`` (one id per line) and/or every reference
    whose ``source`` equals ``seed_source``.
    """
    refs = read_references(refs_path)
    links = read_links(links_path)
    seeds = set(read_seed_ids(seeds_path)) if seeds_path else set()
    if seed_source is not None:
        seeds.update(r.id for r in refs if r.source == seed_source)
    return build_corpus(refs, links, seeds)


def dedup_by_title(corpus: Corpus) -> Corpus:
    groups: dict[str, list[Reference]] = {}
    for ref in corpus.references.values():
        groups.setdefault(normalize_title(ref.title), []).append(ref)
    if all(len(g) == 1 for g in groups.values()):
        return corpus

    survivor: dict[str, str] = {}
    merged: dict[str, Reference] = {}
    for group in groups.values():
        group = sorted(group, key=lambda r: r.id)
        keep = group[0]
        # longest abstract wins, ties go to the smallest id
        best = max(group, key=lambda r: len(r.abstract or ""))
        fields = {"abstract": best.abstract}
        for name in ("year", "language"):
            if getattr(keep, name) is None:
                fields[name] = next((getattr(r, name) for r in group if getattr(r, name) is not None), None)
        if not keep.authors:
            fields["authors"] = next((r.authors for r in group if r.authors), ())
        merged[keep.id] = replace(keep, **fields)
        for r in group:
            survivor[r.id] = keep.id

    links: list[tuple[str, str]] = []
    seen = set()
    for citing, cited in corpus.links:
        pair = (survivor[citing], survivor[cited])
        if pair[0] != pair[1] and pair not in seen:
            seen.add(pair)
            links.append(pair)
    references = {rid: merged[rid] for rid in corpus.references if rid in merged}
    return Corpus(references, links, frozenset(survivor[s] for s in corpus.seed_ids))


def corpus_stats(corpus: Corpus) -> CorpusStats:
    n = len(corpus.references)
    with_abs = sum(1 for r in corpus.references.values() if r.has_abstract)
    return CorpusStats(
        num_references=n,
        num_with_abstract=with_abs,
        abstract_coverage=with_abs / n if n else 0.0,
        num_links=len(corpus.links),
        num_seeds=len(corpus.seed_ids),
    )


# -- store -------------------------------------------------------------------

def write_references(refs: Iterable[Reference], path, mode: str = "w", header: bool = True,
                     params: dict | None = None) -> None:
    with open(path, mode, encoding="utf-8", newline="\n") as fh:
        if header:
            for line in header_lines(params=params):
                fh.write(line + "\n")
        for ref in refs:
            fh.write(json.dumps(ref.to_record(), ensure_ascii=False, sort_keys=True) + "\n")


def write_links(links: Iterable[tuple[str, str]], path, params: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines(params=params):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["citing_id", "cited_id"])
        writer.writerows(links)


def _write_meta(store: Path, corpus: Corpus) -> None:
    stats = corpus_stats(corpus)
    meta = {
        "schema_version": SCHEMA_VERSION,
        "num_references": stats.num_references,
        "num_links": stats.num_links,
        "num_with_abstract": stats.num_with_abstract,
        "seed_ids": sorted(corpus.seed_ids),
        "meta": meta_record(),
    }
    (store / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def save_store(corpus: Corpus, store) -> Path:
    store = Path(store)
    store.mkdir(parents=True, exist_ok=True)
    write_references(corpus.references.values(), store / "refs.jsonl")
    write_links(corpus.links, store / "links.csv")
    _write_meta(store, corpus)
    return store


def load_store(store) -> Corpus:
    store = Path(store)
    meta_path = store / "meta.json"
    if not meta_path.exists():
        raise CorpusError("not a corpus store (meta.json missing)", store)
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    if meta.get("schema_version") != SCHEMA_VERSION:
        raise CorpusError(f"unsupported schema version {meta.get('schema_version')!r}", meta_path)
    corpus, _ = build_corpus(read_references(store / "refs.jsonl"), read_links(store / "links.csv"),
                             meta.get("seed_ids", []))
    return corpus


def append_references(store, refs: Iterable[Reference]) -> int:
    """Append new references to an existing store; ids must not already exist."""
    store = Path(store)
    existing = set(build_index(store))
    refs = list(refs)
    for ref in refs:
        if ref.id in existing:
            raise DuplicateIdError(ref.id, store / "refs.jsonl")
        existing.add(ref.id)
    write_references(refs, store / "refs.jsonl", mode="a", header=False)
    corpus = load_store(store)
    _write_meta(store, corpus)
    return len(refs)


def build_index(store) -> dict[str, int]:
    """Rebuild the id -> byte offset index of ``refs.jsonl``."""
    index: dict[str, int] = {}
    with open(Path(store) / "refs.jsonl", "rb") as fh:
        offset = 0
        for raw in fh:
            if raw.strip() and not raw.startswith(b"#"):
                index[json.loads(raw)["id"]] = offset
            offset += len(raw)
    return index


def read_reference_at(store, offset: int) -> Reference:
    with open(Path(store) / "refs.jsonl", "rb") as fh:
        fh.seek(offset)
        return Reference.from_record(json.loads(fh.readline()))

