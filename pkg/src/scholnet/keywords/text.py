"""Tokenization, embedded stop-word lists and stop-word language detection."""
from __future__ import annotations

import hashlib
import json
import re
from functools import lru_cache
from importlib import resources

LANGUAGES = ("en", "fr")
UNKNOWN = "unknown"
DETECTION_THRESHOLD = 0.05

_WORD = re.compile(r"[^\W\d_]+")
_SENTENCE_END = re.compile(r"[.!?;:]+")


class DataIntegrityError(RuntimeError):
    pass


def _data_bytes(name: str) -> bytes:
    return resources.files("scholnet").joinpath("data", name).read_bytes()


@lru_cache(maxsize=None)
def _checksums() -> dict[str, str]:
    return json.loads(_data_bytes("checksums.json"))


def load_data_file(name: str) -> str:
    """Read a bundled data file, refusing it if its checksum does not match."""
    raw = _data_bytes(name)
    expected = _checksums().get(name)
    if expected is not None and hashlib.sha256(raw).hexdigest() != expected:
        raise DataIntegrityError(f"checksum mismatch for bundled data file {name}")
    return raw.decode("utf-8")


@lru_cache(maxsize=None)
def stop_words(language: str) -> frozenset[str]:
    if language not in LANGUAGES:
        raise ValueError(f"no stop-word list for language {language!r}")
    return frozenset(load_data_file(f"stopwords_{language}.txt").split())


def tokenize(text: str) -> list[str]:
    """Letter runs of length >= 2; hyphens, digits and punctuation all split."""
    return [t for t in _WORD.findall(text) if len(t) >= 2]


def split_sentences(text: str) -> list[str]:
    return [s for s in _SENTENCE_END.split(text) if s.strip()]


def detect_language(text: str) -> str:
    tokens = [t.lower() for t in tokenize(text or "")]
    if not tokens:
        return UNKNOWN
    best, best_score = UNKNOWN, 0.0
    for lang in LANGUAGES:
        words = stop_words(lang)
        score = sum(1 for t in tokens if t in words) / len(tokens)
        if score > best_score:
            best, best_score = lang, score
    return best if best_score >= DETECTION_THRESHOLD else UNKNOWN
