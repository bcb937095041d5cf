from __future__ import annotations

import os

import pytest

from clcts_workbench.corpus import Corpus, load_corpus

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


def released_corpus_path(name: str) -> str | None:
    """Released corpus files are looked up under CLCTS_DATA_DIR only.

    This environment has no route to the public hosting, so reproduction
    checks against the released data are opt-in: point CLCTS_DATA_DIR at a
    directory holding the corpus JSONL files to enable them.
    """
    root = os.environ.get("CLCTS_DATA_DIR")
    if not root:
        return None
    candidate = os.path.join(root, name)
    return candidate if os.path.exists(candidate) else None


@pytest.fixture(scope="session")
def mini_corpus() -> Corpus:
    return load_corpus(fixture_path("mini_corpus_hDe-En.jsonl"), "hDe-En")


@pytest.fixture(scope="session")
def mini_corpus_de() -> Corpus:
    return load_corpus(fixture_path("mini_corpus_hDe-De.jsonl"), "hDe-De")
