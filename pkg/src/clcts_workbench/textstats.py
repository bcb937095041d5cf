"""Tokenization, sentence segmentation, and surface corpus statistics.

Every statistic is computed under an explicit TokenizationPolicy whose id
is stamped into reports, because "token" is not a neutral unit: different
splitters move the means by a few percent on historical text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .corpus import Corpus, _parse_lang
from .errors import ValidationError


@dataclass(frozen=True)
class TokenizationPolicy:
    policy_id: str
    lowercase: bool = True
    strip_punctuation: bool = True


#: Unicode word tokens, lowercased, punctuation dropped.  The default for
#: all corpus statistics; the id travels with every report.
DEFAULT_POLICY = TokenizationPolicy("unicode-word-lower-v1")

# A word is a run of letters/digits (underscore excluded), optionally
# chained over word-internal apostrophes: "don't" stays one token.  When
# punctuation is kept, non-space symbol runs become tokens of their own.
_WORD = r"[^\W_]+(?:['’][^\W_]+)*"
_WORD_RE = re.compile(_WORD)
_WORD_OR_PUNCT_RE = re.compile(_WORD + r"|[^\w\s]+|_+")


def tokenize(text: str, lang: str = "en", policy: TokenizationPolicy = DEFAULT_POLICY) -> list[str]:
    """Split text into tokens under the policy; "" gives []."""
    pattern = _WORD_RE if policy.strip_punctuation else _WORD_OR_PUNCT_RE
    tokens = pattern.findall(text)
    if policy.lowercase:
        # str.lower, not casefold: historical German long s and eszett must
        # survive so vocabulary statistics keep the original spelling system.
        tokens = [t.lower() for t in tokens]
    return tokens


# --------------------------------------------------------------------------
# Sentence segmentation.  Rule-based and bit-reproducible: a boundary is a
# run of {. ! ? …} (plus trailing closing quotes), whitespace, and then an
# optionally quoted capital, unless the word before a lone "." is on the
# language's abbreviation list.

_BOUNDARY_RE = re.compile(r"[.!?…]+[\"'»«“”‘’)\]]*\s+")
_LAST_WORD_RE = re.compile(r"([^\W\d_]+)$")
_OPENING_QUOTES = "\"'«»„“‘‚([ "

_ABBREV_CACHE: dict[str, frozenset[str]] = {}


def _abbreviations(lang: str) -> frozenset[str]:
    code, _ = _parse_lang(lang)
    if code not in _ABBREV_CACHE:
        name = f"data/wordlists/abbreviations_{code}.txt"
        try:
            ref = resources.files("clcts_workbench").joinpath(name)
            text = ref.read_text(encoding="utf-8")
        except FileNotFoundError:
            text = ""
        words = {
            line.strip().lower()
            for line in text.splitlines()
            if line.strip() and not line.startswith("#")
        }
        _ABBREV_CACHE[code] = frozenset(words)
    return _ABBREV_CACHE[code]


def _starts_upper(text: str, pos: int) -> bool:
    while pos < len(text) and text[pos] in _OPENING_QUOTES:
        pos += 1
    return pos < len(text) and text[pos].isupper()


def split_sentences(text: str, lang: str = "en") -> list[str]:
    """Split text into sentences; joining the output with single spaces
    reproduces the input up to whitespace."""
    if not text.strip():
        return []
    abbrevs = _abbreviations(lang)
    sentences: list[str] = []
    start = 0
    for match in _BOUNDARY_RE.finditer(text):
        if match.start() < start:
            continue
        if not _starts_upper(text, match.end()):
            continue
        run = match.group().rstrip()
        if run == ".":
            before = _LAST_WORD_RE.search(text[:match.start()])
            if before and before.group(1).lower() in abbrevs:
                continue
        piece = text[start:match.start() + len(run)].strip()
        if piece:
            sentences.append(piece)
        start = match.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


# --------------------------------------------------------------------------
# Corpus statistics.


@dataclass(frozen=True)
class CorpusStats:
    size: int
    mean_doc_len: float
    mean_summ_len: float
    mean_sent_len_doc: float     # micro-average: total tokens / total sentences
    mean_sent_len_summ: float
    compression: float           # mean_doc_len / mean_summ_len
    policy_id: str

    def to_dict(self) -> dict:
        return {
            "size": self.size,
            "mean_length_doc": self.mean_doc_len,
            "mean_length_summ": self.mean_summ_len,
            "mean_sentence_length_doc": self.mean_sent_len_doc,
            "mean_sentence_length_summ": self.mean_sent_len_summ,
            "compression": self.compression,
            "policy_id": self.policy_id,
        }


def corpus_stats(corpus: Corpus, policy: TokenizationPolicy = DEFAULT_POLICY) -> CorpusStats:
    if not corpus.pairs:
        raise ValidationError("empty corpus")
    doc_tokens = summ_tokens = 0
    doc_sents = summ_sents = 0
    for pair in corpus.pairs:
        doc_tokens += len(tokenize(pair.document, pair.lang_src, policy))
        summ_tokens += len(tokenize(pair.summary, pair.lang_tgt, policy))
        doc_sents += len(split_sentences(pair.document, pair.lang_src))
        summ_sents += len(split_sentences(pair.summary, pair.lang_tgt))
    n = len(corpus.pairs)
    mean_doc = doc_tokens / n
    mean_summ = summ_tokens / n
    if mean_summ == 0:
        raise ValidationError("cannot compute compression: summaries have no tokens")
    return CorpusStats(
        size=n,
        mean_doc_len=mean_doc,
        mean_summ_len=mean_summ,
        mean_sent_len_doc=doc_tokens / doc_sents if doc_sents else 0.0,
        mean_sent_len_summ=summ_tokens / summ_sents if summ_sents else 0.0,
        compression=mean_doc / mean_summ,
        policy_id=policy.policy_id,
    )


def jaccard_divergence(
    corpus: Corpus,
    policy: TokenizationPolicy = DEFAULT_POLICY,
    per_pair: bool = False,
) -> float:
    """Vocabulary overlap |V_doc ∩ V_summ| / |V_doc ∪ V_summ|.

    By default the two vocabularies are corpus-level (one set per side),
    giving one number per dataset.  per_pair=True averages per-pair Jaccard
    scores instead, for sensitivity analysis.
    """
    if not corpus.pairs:
        raise ValidationError("empty corpus")

    def jac(a: set[str], b: set[str]) -> float:
        union = a | b
        if not union:
            raise ValidationError("both vocabularies are empty")
        return len(a & b) / len(union)

    if per_pair:
        values = [
            jac(
                set(tokenize(p.document, p.lang_src, policy)),
                set(tokenize(p.summary, p.lang_tgt, policy)),
            )
            for p in corpus.pairs
        ]
        return sum(values) / len(values)
    v_doc: set[str] = set()
    v_summ: set[str] = set()
    for pair in corpus.pairs:
        v_doc.update(tokenize(pair.document, pair.lang_src, policy))
        v_summ.update(tokenize(pair.summary, pair.lang_tgt, policy))
    return jac(v_doc, v_summ)


def year_histogram(years, bin_width: int = 10) -> dict[int, int]:
    """Counts per bin of publication years; bins are keyed by their start
    year, anchored at multiples of bin_width.  Accepts a Corpus or any
    iterable of years; an empty iterable gives an empty histogram."""
    if bin_width < 1:
        raise ValidationError(f"bin_width must be >= 1, got {bin_width}")
    if isinstance(years, Corpus):
        years = [p.year for p in years.pairs]
    hist: dict[int, int] = {}
    for year in years:
        start = (int(year) // bin_width) * bin_width
        hist[start] = hist.get(start, 0) + 1
    return dict(sorted(hist.items()))
