import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scholnet.corpus import Reference, build_corpus, load_store  # noqa: E402
from scholnet.cli import bundled_minicorpus  # noqa: E402

ACCEPTANCE: list[tuple[int, bool, str]] = []


@pytest.fixture(scope="session")
def minicorpus():
    return load_store(bundled_minicorpus())


@pytest.fixture(scope="session")
def minicorpus_keywords(minicorpus):
    from scholnet.keywords import score_keywords, select_top
    return select_top(score_keywords(minicorpus))


@pytest.fixture
def small_corpus():
    refs = [
        Reference("a", "Urban growth", "Cities grow.", 2001, ("X",), "en", "seed"),
        Reference("b", "Segregation", None, 1999),
        Reference("c", "Transport networks", "Networks of roads.", 2010),
        Reference("d", "Housing", None, None),
    ]
    corpus, _ = build_corpus(refs, [("a", "b"), ("c", "b"), ("c", "a"), ("d", "a")], ["a"])
    return corpus


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
