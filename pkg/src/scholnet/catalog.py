"""Fill missing abstracts from an external bibliographic catalog.

Provider protocol: ``GET {base_url}?title=<normalized title>`` answers with a
JSON object carrying any of ``abstract``, ``year``, ``authors`` (and
optionally ``title``), or 404 when the catalog has no match. Every answer,
404 included, is cached on disk so a rerun on a warm cache sends nothing.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import httpx

from .corpus import Corpus, Reference, normalize_title

log = logging.getLogger(__name__)

CACHE_ENV = "SCHOLNET_CACHE"


@dataclass(frozen=True)
class ProviderConfig:
    name: str
    base_url: str
    rate_limit: float = 1.0
    timeout: float = 10.0
    cache_dir: str = ".scholnet-cache"
    max_in_flight: int = 4

    def __post_init__(self):
        if not self.rate_limit > 0:
            raise ValueError("rate_limit must be > 0")
        if not self.timeout > 0:
            raise ValueError("timeout must be > 0")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")

    def resolved_cache_dir(self) -> Path:
        return Path(os.environ.get(CACHE_ENV) or self.cache_dir) / self.name


class TokenBucket:
    """Thread-safe token bucket; ``acquire`` blocks until a token is available."""

    def __init__(self, rate: float, capacity: float = 1.0, clock=time.monotonic, sleep=time.sleep):
        self.rate = rate
        self.capacity = capacity
        self._tokens = capacity
        self._clock = clock
        self._sleep = sleep
        self._last = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                self._tokens = min(self.capacity, self._tokens + (now - self._last) * self.rate)
                self._last = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self.rate
            self._sleep(wait)


@dataclass
class EnrichDiagnostics:
    candidates: int = 0
    requests: int = 0
    cache_hits: int = 0
    matched: int = 0
    not_found: int = 0
    title_mismatch: int = 0
    malformed: int = 0
    errors: int = 0
    error_log: list[tuple[str, str]] = field(default_factory=list)


class DiskCache:
    def __init__(self, directory: Path):
        self.directory = Path(directory)

    def path(self, key: str) -> Path:
        return self.directory / (hashlib.sha256(key.encode("utf-8")).hexdigest() + ".json")

    def get(self, key: str) -> dict | None:
        p = self.path(key)
        if not p.exists():
            return None
        return json.loads(p.read_text(encoding="utf-8"))

    def put(self, key: str, entry: dict) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(entry, fh, ensure_ascii=False, sort_keys=True)
            os.replace(tmp, self.path(key))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


class CatalogClient:
    def __init__(self, config: ProviderConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        self.cache = DiskCache(config.resolved_cache_dir())
        self.bucket = TokenBucket(config.rate_limit)
        self._client = httpx.Client(timeout=config.timeout, transport=transport)
        self._lock = threading.Lock()

    def close(self) -> None:
        self._client.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def lookup(self, title_key: str, diag: EnrichDiagnostics) -> dict | None:
        """Cached entry ``{"status": int, "body": ...}`` for one normalized title."""
        entry = self.cache.get(title_key)
        if entry is not None:
            with self._lock:
                diag.cache_hits += 1
            return entry
        self.bucket.acquire()
        with self._lock:
            diag.requests += 1
        resp = self._client.get(self.config.base_url, params={"title": title_key})
        if resp.status_code == 404:
            entry = {"status": 404, "body": None}
        elif resp.status_code == 200:
            try:
                body = resp.json()
            except ValueError:
                body = resp.text
            entry = {"status": 200, "body": body}
        else:
            resp.raise_for_status()
            raise httpx.HTTPStatusError(f"unexpected status {resp.status_code}",
                                        request=resp.request, response=resp)
        self.cache.put(title_key, entry)
        return entry


def _valid_body(body) -> bool:
    if not isinstance(body, dict):
        return False
    if "abstract" in body and body["abstract"] is not None and not isinstance(body["abstract"], str):
        return False
    if "year" in body and body["year"] is not None and (isinstance(body["year"], bool)
                                                        or not isinstance(body["year"], int)):
        return False
    if "authors" in body and body["authors"] is not None and not (
            isinstance(body["authors"], list) and all(isinstance(a, str) for a in body["authors"])):
        return False
    if "title" in body and not isinstance(body["title"], str):
        return False
    return True


def _merge(ref: Reference, body: dict) -> Reference:
    fields = {}
    if not ref.has_abstract and body.get("abstract"):
        fields["abstract"] = body["abstract"]
    if ref.year is None and body.get("year") is not None:
        fields["year"] = body["year"]
    if not ref.authors and body.get("authors"):
        fields["authors"] = tuple(body["authors"])
    return replace(ref, **fields) if fields else ref


def enrich(corpus: Corpus, provider: ProviderConfig, transport: httpx.BaseTransport | None = None
           ) -> tuple[Corpus, EnrichDiagnostics]:
    """Look up every reference lacking an abstract and fill absent fields.

    Existing nonempty values are never overwritten. Network or provider
    failures are logged per item and leave that reference untouched.
    """
    diag = EnrichDiagnostics()
    todo = [ref for ref in corpus.references.values() if not ref.has_abstract]
    diag.candidates = len(todo)
    if not todo:
        return corpus, diag

    updated: dict[str, Reference] = {}

    def work(client: CatalogClient, ref: Reference) -> None:
        key = normalize_title(ref.title)
        try:
            entry = client.lookup(key, diag)
        except (httpx.HTTPError, OSError) as exc:
            with client._lock:
                diag.errors += 1
                diag.error_log.append((ref.id, str(exc)))
            log.warning("lookup failed for %s: %s", ref.id, exc)
            return
        with client._lock:
            if entry.get("status") == 404:
                diag.not_found += 1
                return
            body = entry.get("body")
            if not _valid_body(body):
                diag.malformed += 1
                return
            if "title" in body and normalize_title(body["title"]) != key:
                diag.title_mismatch += 1
                return
            diag.matched += 1
            updated[ref.id] = _merge(ref, body)

    with CatalogClient(provider, transport) as client:
        if provider.max_in_flight > 1:
            with ThreadPoolExecutor(max_workers=provider.max_in_flight) as pool:
                list(pool.map(lambda r: work(client, r), todo))
        else:
            for ref in todo:
                work(client, ref)

    references = {rid: updated.get(rid, ref) for rid, ref in corpus.references.items()}
    return Corpus(references, list(corpus.links), corpus.seed_ids), diag
