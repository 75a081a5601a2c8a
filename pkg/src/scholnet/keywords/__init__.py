"""Relevant keyword extraction: language detection, tagging, n-gram candidates, scoring."""
from .extract import extract_candidates
from .scoring import (
    Keyword,
    KeywordIndex,
    NoCandidatesError,
    read_keyword_index,
    score_candidates,
    score_keywords,
    select_top,
    write_keyword_index,
)
from .tagging import ExternalTagger, TaggedToken, tag_and_stem
from .text import detect_language, tokenize

__all__ = [
    "ExternalTagger",
    "Keyword",
    "KeywordIndex",
    "NoCandidatesError",
    "TaggedToken",
    "detect_language",
    "extract_candidates",
    "read_keyword_index",
    "score_candidates",
    "score_keywords",
    "select_top",
    "tag_and_stem",
    "tokenize",
    "write_keyword_index",
]
