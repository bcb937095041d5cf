"""Native summary metrics and the score registry.

ROUGE-1 and ROUGE-L are computed here (case-folded tokens, no stemming,
summary-level LCS, F1 as the headline value).  Neural metric scores are
never reimplemented: they arrive through the scores CSV and are merged as
rows.  When a key has both an NLI-D and a BERTScore-F1 row, weighted
combinations are synthesized as additional rows:

    combined = w * nli_d + (1 - w) * bertscore_f1

with the study weights 1, 0.8, 0.3 and 0.2 named MENLI-W1, MENLI-W.8,
MENLI-W.3 and MENLI-W.2.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import Corpus, MetricScoreTable, ScoreRow
from .errors import ValidationError
from .textstats import DEFAULT_POLICY, TokenizationPolicy, tokenize

MENLI_WEIGHTS = (1.0, 0.8, 0.3, 0.2)

#: Metric names the combiner consumes.
NLI_METRIC = "NLI-D"
BERTSCORE_F1_METRIC = "BERTScore-F1"


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float


def _make_rouge(overlap: float, cand_len: int, ref_len: int) -> RougeScore:
    if ref_len == 0:
        raise ValidationError("empty reference")
    p = overlap / cand_len if cand_len else 0.0
    r = overlap / ref_len
    f1 = 0.0 if p + r == 0 else 2 * p * r / (p + r)
    return RougeScore(precision=p, recall=r, f1=f1)


def rouge1(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    """Unigram overlap with clipped (multiset) counts."""
    overlap = sum((Counter(candidate) & Counter(reference)).values())
    return _make_rouge(overlap, len(candidate), len(reference))


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    # Classic O(n*m) dynamic program over two rows.
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for token in a:
        current = [0]
        for j, other in enumerate(b, start=1):
            if token == other:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rougeL(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    """Longest common subsequence over the full token sequences
    (summary-level, not a union over sentence splits)."""
    lcs = _lcs_length(candidate, reference)
    return _make_rouge(lcs, len(candidate), len(reference))


def menli_name(w: float) -> str:
    """Row name for a combination weight: 1 -> MENLI-W1, 0.8 -> MENLI-W.8."""
    text = f"{w:g}"
    if text.startswith("0."):
        text = text[1:]
    return f"MENLI-W{text}"


def menli_combine(nli_d: float, bertscore_f1: float, w: float) -> float:
    if not (math.isfinite(nli_d) and math.isfinite(bertscore_f1)):
        raise ValidationError("combiner inputs must be finite")
    if not 0.0 <= w <= 1.0:
        raise ValidationError(f"weight must be in [0, 1], got {w}")
    return w * nli_d + (1 - w) * bertscore_f1


def score_systems(
    corpus: Corpus,
    candidates: Mapping[tuple[str, str], str],
    ingested: MetricScoreTable | None = None,
    policy: TokenizationPolicy = DEFAULT_POLICY,
) -> MetricScoreTable:
    """Assemble the full score table for a corpus.

    Native ROUGE rows are computed against the reference summaries;
    ingested rows are merged (a native/ingested collision with a different
    value is a conflict, not a silent overwrite); combination rows are
    synthesized wherever both input metrics exist and the combined name is
    still free.  Row provenance is carried in memory only, the CSV format
    stays four columns.
    """
    by_id = {pair.id: pair for pair in corpus.pairs}
    orphans = sorted({doc_id for (doc_id, _) in candidates if doc_id not in by_id})
    if orphans:
        raise ValidationError(f"candidates without a reference in the corpus: {orphans}")

    rows: dict[tuple[str, str, str], ScoreRow] = {}
    native_tag = f"native:{policy.policy_id}"
    for (doc_id, system_id), text in sorted(candidates.items()):
        pair = by_id[doc_id]
        cand_tokens = tokenize(text, pair.lang_tgt, policy)
        ref_tokens = tokenize(pair.summary, pair.lang_tgt, policy)
        for name, score in (("ROUGE-1", rouge1(cand_tokens, ref_tokens)),
                            ("ROUGE-L", rougeL(cand_tokens, ref_tokens))):
            row = ScoreRow(doc_id, system_id, name, score.f1, provenance=native_tag)
            rows[row.key] = row

    if ingested is not None:
        for row in ingested.rows:
            existing = rows.get(row.key)
            if existing is not None and abs(existing.value - row.value) > 1e-12:
                raise ValidationError(
                    f"conflicting values for {row.key}: "
                    f"{existing.value} ({existing.provenance}) vs {row.value} (ingested)"
                )
            if existing is None:
                rows[row.key] = row

    by_system: dict[tuple[str, str], dict[str, float]] = {}
    for row in rows.values():
        if row.metric_name in (NLI_METRIC, BERTSCORE_F1_METRIC):
            by_system.setdefault((row.doc_id, row.system_id), {})[row.metric_name] = row.value
    for (doc_id, system_id), have in sorted(by_system.items()):
        if NLI_METRIC not in have or BERTSCORE_F1_METRIC not in have:
            continue
        for w in MENLI_WEIGHTS:
            name = menli_name(w)
            key = (doc_id, system_id, name)
            if key in rows:
                continue    # an ingested combination row is data and wins
            value = menli_combine(have[NLI_METRIC], have[BERTSCORE_F1_METRIC], w)
            rows[key] = ScoreRow(doc_id, system_id, name, value, provenance="derived")

    ordered = tuple(rows[key] for key in sorted(rows))
    return MetricScoreTable(rows=ordered)
