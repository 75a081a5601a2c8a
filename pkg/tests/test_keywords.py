import sys
import textwrap
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from scholnet.corpus import Reference, build_corpus
from scholnet.keywords import (ExternalTagger, NoCandidatesError, detect_language, extract_candidates,
                               read_keyword_index, score_candidates, score_keywords, select_top, tag_and_stem,
                               tokenize, write_keyword_index)
from scholnet.keywords.scoring import DocumentCandidates, process_document
from scholnet.keywords.tagging import ADJ, GER, NOUN, OTHER, TaggedToken, TaggerError, map_external_tag, tag_english
from scholnet.keywords.text import split_sentences


def test_tokenize_splits_on_hyphens_and_digits():
    assert tokenize("Self-organized cities, 1990s: a x test") == ["Self", "organized", "cities", "test"]


def test_sentences():
    assert split_sentences("One two. Three; four!") == ["One two", " Three", " four"]


@pytest.mark.parametrize("text,lang", [
    ("The growth of the cities and the role of the transport", "en"),
    ("La croissance des villes et le rôle du transport dans la région", "fr"),
    ("", "unknown"),
    ("zzz qqq xxyy", "unknown"),
])
def test_detect_language(text, lang):
    assert detect_language(text) == lang


def test_tagging_rules():
    assert tag_english("the") == OTHER
    assert tag_english("zorblating") == GER
    assert tag_english("zorbulous") == ADJ
    assert tag_english("zorbly") == OTHER
    assert tag_english("zorbled") == OTHER
    assert tag_english("zorb") == NOUN


def test_tagged_token_invariants():
    with pytest.raises(ValueError):
        TaggedToken("A", "A", NOUN)
    with pytest.raises(ValueError):
        TaggedToken("a", "a", "VERB")


def test_external_tag_mapping():
    assert [map_external_tag(t) for t in ["NNS", "NOM", "JJR", "ADJ", "VBG", "VER:PPRE", "VBD", "DET:ART"]] == \
        [NOUN, NOUN, ADJ, ADJ, GER, GER, OTHER, OTHER]


def _tok(*pairs):
    return [TaggedToken(w, w, t) for w, t in pairs]


def test_extract_candidates_windows():
    toks = _tok(("urban", ADJ), ("growth", NOUN), ("of", OTHER), ("city", NOUN))
    assert extract_candidates(toks, "en") == [("urban",), ("urban", "growth"), ("growth",), ("city",)]


def test_gerund_allowed_in_english_only():
    toks = _tok(("mapping", GER), ("city", NOUN))
    assert ("mapping", "city") in extract_candidates(toks, "en")
    assert extract_candidates(toks, "fr") == [("city",)]


def test_ngrams_capped_at_four():
    toks = _tok(*[(w, NOUN) for w in "abcdef"])
    grams = extract_candidates(toks, "en")
    assert max(len(g) for g in grams) == 4
    assert len(grams) == 6 + 5 + 4 + 3


def test_stems_lowercase():
    toks = tag_and_stem("Urban Networks of Cities", "en")
    assert [t.stem for t in toks] == ["urban", "network", "of", "citi"]


def test_ngrams_do_not_cross_sentences():
    doc = process_document("x", "The study of urban networks. Cities grow in the region.")
    assert ("network", "citi") not in doc.ngrams
    assert ("urban", "network") in doc.ngrams


def _docs(sets):
    return [DocumentCandidates(f"d{i}", "en", frozenset((w,) for w in s), Counter({((w,), w): 1 for w in s}))
            for i, s in enumerate(sets)]


@settings(max_examples=80, deadline=None)
@given(st.lists(st.sets(st.sampled_from("abcdefg"), min_size=1), min_size=2, max_size=12))
def test_scores_match_exact_oracle(sets):
    expected = oracles.keyword_scores(sets)
    index = score_candidates(_docs(sets), min_candidate_freq=1)
    for kw in index.keywords:
        assert kw.score == pytest.approx(expected[kw.stems[0]], rel=1e-12, abs=1e-12)
        assert kw.doc_freq == sum(kw.stems[0] in s for s in sets)


def test_background_profile_scores_zero():
    # every term in every document: each profile equals the background
    index = score_candidates(_docs([set("abc")] * 5), min_candidate_freq=1)
    assert all(kw.score == 0.0 for kw in index.keywords)


def test_min_freq_and_errors():
    index = score_candidates(_docs([{"a", "b"}, {"a"}, {"a", "c"}]), min_candidate_freq=2)
    assert [kw.key for kw in index.keywords] == ["a"]
    with pytest.raises(NoCandidatesError):
        score_candidates(_docs([{"a"}]), 1)
    with pytest.raises(NoCandidatesError):
        score_candidates(_docs([{"a"}, {"b"}]), 2)


def test_select_top_order_and_tiebreak():
    index = score_candidates(_docs([{"a", "b"}, {"a", "c"}, {"b", "d"}, {"a"}]), 1)
    top = select_top(index, 2)
    ranked = sorted(index.keywords, key=lambda k: (-k.score, -k.doc_freq, k.stems))
    assert [k.stems for k in top.keywords] == [k.stems for k in ranked[:2]]
    with pytest.raises(ValueError):
        select_top(index, 0)


def test_index_file_round_trip(tmp_path, minicorpus_keywords):
    write_keyword_index(minicorpus_keywords, tmp_path, seed=0)
    back = read_keyword_index(tmp_path)
    assert back.num_docs == minicorpus_keywords.num_docs
    assert sorted(back.keywords, key=lambda k: k.stems) == sorted(minicorpus_keywords.keywords, key=lambda k: k.stems)
    assert back.postings == minicorpus_keywords.postings


def test_minicorpus_topics_are_recovered(minicorpus_keywords):
    from scholnet.synthetic import TOPICS
    top_surfaces = {k.surface for k in minicorpus_keywords.keywords}
    for words in TOPICS.values():
        assert any(w in top_surfaces for w in words)


def test_threads_do_not_change_scores(minicorpus):
    a = score_keywords(minicorpus, threads=1)
    b = score_keywords(minicorpus, threads=3)
    assert a.keywords == b.keywords


def test_external_tagger_protocol(tmp_path):
    script = tmp_path / "tagger.py"
    script.write_text(textwrap.dedent("""
        import sys
        for line in sys.stdin:
            tok = line.rstrip("\\n")
            if not tok:
                continue
            print(tok + "\\t" + ("ADJ" if tok.endswith("e") else "NOM"))
    """))
    tagger = ExternalTagger([sys.executable, str(script)])
    text = "La ville durable et le réseau urbain dans la région"
    toks = tag_and_stem(text, "fr", tagger)
    assert len(toks) == len(tokenize(text))
    assert {t.tag for t in toks} <= {NOUN, ADJ}
    refs = [Reference(f"r{i}", f"T{i}", text) for i in range(3)]
    index = score_keywords(build_corpus(refs, [])[0], 3, taggers={"fr": tagger})
    assert all(k.language == "fr" for k in index.keywords)


def test_external_tagger_failures(tmp_path):
    with pytest.raises(TaggerError):
        ExternalTagger(["/nonexistent/tagger"]).tag_sentences([["a"]])
    short = tmp_path / "short.py"
    short.write_text("print('only\\tNOM')\n")
    with pytest.raises(TaggerError, match="1 rows for 2 tokens"):
        ExternalTagger([sys.executable, str(short)]).tag_sentences([["a", "b"]])
