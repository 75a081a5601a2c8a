"""Part-of-speech tagging and stemming.

English uses the bundled lexicon (about 5000 frequent words with coarse
tags) plus suffix rules for unknown words, and the Porter stemmer. Other
languages go through an external tagger command speaking a line protocol:
one token per line on stdin, a blank line between sentences, and
``token<TAB>tag`` lines back on stdout.
"""
from __future__ import annotations

import shlex
import subprocess
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from nltk.stem import PorterStemmer
from nltk.stem.snowball import SnowballStemmer

from .text import LANGUAGES, load_data_file, split_sentences, stop_words, tokenize

NOUN, ADJ, GER, OTHER = "NOUN", "ADJ", "GER", "OTHER"
TAGS = (NOUN, ADJ, GER, OTHER)
ADJ_SUFFIXES = ("ous", "al", "ive", "ic")


class TaggerError(RuntimeError):
    pass


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    stem: str
    tag: str

    def __post_init__(self):
        if not self.stem or self.stem != self.stem.lower():
            raise ValueError(f"stem must be nonempty lowercase, got {self.stem!r}")
        if self.tag not in TAGS:
            raise ValueError(f"unknown tag {self.tag!r}")


@lru_cache(maxsize=None)
def lexicon() -> dict[str, str]:
    out = {}
    for line in load_data_file("lexicon_en.tsv").splitlines():
        word, tag = line.split("\t")
        out[word] = tag
    return out


_porter = PorterStemmer()
_snowball = {"fr": SnowballStemmer("french")}


@lru_cache(maxsize=200_000)
def stem(word: str, language: str = "en") -> str:
    word = word.lower()
    if language == "en":
        return _porter.stem(word)
    if language in _snowball:
        return _snowball[language].stem(word) or word
    return word


@lru_cache(maxsize=200_000)
def tag_english(word: str) -> str:
    """Coarse tag for one English word.

    Stop words are never content words. Lexicon entries win otherwise; for
    unknown words -ing is a gerund, -ous/-al/-ive/-ic an adjective, -ly an
    adverb and long -ed forms a participle (both OTHER), the rest nouns.
    """
    w = word.lower()
    if w in stop_words("en"):
        return OTHER
    tag = lexicon().get(w)
    if tag is not None:
        return tag
    if not w.isalpha():
        return OTHER
    if w.endswith("ing") and len(w) > 4:
        return GER
    if w.endswith(ADJ_SUFFIXES):
        return ADJ
    if w.endswith("ly") and len(w) > 4:
        return OTHER
    if w.endswith("ed") and not w.endswith("eed") and len(w) > 4:
        return OTHER
    return NOUN


def map_external_tag(tag: str) -> str:
    """Fold Penn Treebank or TreeTagger-style tags onto the coarse set."""
    t = tag.upper()
    if t.startswith("NN") or t.startswith("NOM") or t == "NOUN":
        return NOUN
    if t.startswith("JJ") or t.startswith("ADJ"):
        return ADJ
    if t in ("VBG", "VER:PPRE", "GER"):
        return GER
    return OTHER


class ExternalTagger:
    def __init__(self, cmd: str | Sequence[str], timeout: float = 120.0):
        self.argv = shlex.split(cmd) if isinstance(cmd, str) else list(cmd)
        self.timeout = timeout

    def tag_sentences(self, sentences: list[list[str]]) -> list[list[str]]:
        payload = "\n\n".join("\n".join(s) for s in sentences if s) + "\n"
        try:
            proc = subprocess.run(self.argv, input=payload, capture_output=True, text=True,
                                  timeout=self.timeout, check=True)
        except (OSError, subprocess.SubprocessError) as exc:
            raise TaggerError(f"external tagger {self.argv[0]!r} failed: {exc}") from exc
        rows = [ln.split("\t") for ln in proc.stdout.splitlines() if ln.strip()]
        flat = [tok for s in sentences for tok in s]
        if len(rows) != len(flat) or any(len(r) < 2 for r in rows):
            raise TaggerError(f"external tagger returned {len(rows)} rows for {len(flat)} tokens")
        tags = [r[1] for r in rows]
        out, k = [], 0
        for s in sentences:
            out.append(tags[k:k + len(s)])
            k += len(s)
        return out


def _tag_sentences(sentences: list[list[str]], language: str,
                   tagger: ExternalTagger | None) -> list[list[TaggedToken]]:
    if language not in LANGUAGES:
        raise ValueError(f"unsupported language {language!r}")
    if tagger is not None:
        raw_tags = tagger.tag_sentences(sentences)
        return [[TaggedToken(w, stem(w, language), map_external_tag(t)) for w, t in zip(s, ts)]
                for s, ts in zip(sentences, raw_tags)]
    if language == "en":
        return [[TaggedToken(w, stem(w, "en"), tag_english(w)) for w in s] for s in sentences]
    # no bundled tagger for this language: tokens pass through untagged
    return [[TaggedToken(w, w.lower(), OTHER) for w in s] for s in sentences]


def tag_and_stem(text: str, language: str, tagger: ExternalTagger | None = None) -> list[TaggedToken]:
    return [tok for s in tag_sentences(text, language, tagger) for tok in s]


def tag_sentences(text: str, language: str, tagger: ExternalTagger | None = None
                  ) -> list[list[TaggedToken]]:
    sentences = [tokenize(s) for s in split_sentences(text)]
    return _tag_sentences([s for s in sentences if s], language, tagger)
