"""Candidate n-gram selection under grammatical rules."""
from __future__ import annotations

from .tagging import ADJ, GER, NOUN, TaggedToken

MAX_N = 4
ALLOWED = {"en": frozenset({NOUN, GER, ADJ}), "fr": frozenset({NOUN, ADJ})}


def candidate_windows(tokens: list[TaggedToken], language: str) -> list[tuple[tuple[str, ...], str]]:
    """Every qualifying window as (stems, surface), in text order, repeats included."""
    allowed = ALLOWED.get(language, frozenset())
    out = []
    n = len(tokens)
    for i in range(n):
        for size in range(1, MAX_N + 1):
            j = i + size
            if j > n or tokens[j - 1].tag not in allowed:
                break
            window = tokens[i:j]
            out.append((tuple(t.stem for t in window), " ".join(t.surface.lower() for t in window)))
    return out


def extract_candidates(tokens: list[TaggedToken], language: str) -> list[tuple[str, ...]]:
    """Distinct stem n-grams (1 <= n <= 4) whose tokens all carry an allowed tag."""
    seen: dict[tuple[str, ...], None] = {}
    for stems, _ in candidate_windows(tokens, language):
        seen.setdefault(stems, None)
    return list(seen)
