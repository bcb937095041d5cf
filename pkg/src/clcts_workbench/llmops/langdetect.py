"""Stopword-ratio language identification for the wrong-language check.

For each supported language the detector computes the fraction of tokens
that are on that language's function-word list; the winner is the highest
ratio and the confidence is its margin over the runner-up.  Single-letter
tokens are ignored (they collide across languages and the lists carry no
single-letter entries).  Inputs under five words are too short to call.
"""

from __future__ import annotations

from importlib import resources

from ..textstats import tokenize

SUPPORTED = ("en", "de")
MIN_WORDS = 5

_LISTS: dict[str, frozenset[str]] = {}


def _function_words(code: str) -> frozenset[str]:
    if code not in _LISTS:
        ref = resources.files("clcts_workbench").joinpath(
            f"data/wordlists/function_words_{code}.txt"
        )
        words = {
            line.strip().lower()
            for line in ref.read_text(encoding="utf-8").splitlines()
            if line.strip() and not line.startswith("#")
        }
        _LISTS[code] = frozenset(words)
    return _LISTS[code]


def detect_language(text: str) -> tuple[str, float]:
    """Return (language code, confidence); ("unknown", 0.0) when the text is
    too short or matches no list at all."""
    tokens = [t for t in tokenize(text) if len(t) > 1]
    if len(text.split()) < MIN_WORDS:
        return "unknown", 0.0
    if not tokens:
        return "unknown", 0.0
    ratios = {
        code: sum(1 for t in tokens if t in _function_words(code)) / len(tokens)
        for code in SUPPORTED
    }
    ranked = sorted(ratios.items(), key=lambda kv: (-kv[1], kv[0]))
    best_code, best = ranked[0]
    runner_up = ranked[1][1]
    if best == 0.0:
        return "unknown", 0.0
    return best_code, best - runner_up
