"""Contamination probes: perturb documents a model may have memorized and
measure whether its summaries track the input or the original story.

Three attack families are handled.  Sentence omission is generated here
with a seeded PRNG (PCG64, 64-bit, via numpy); entity swaps are applied
from an explicit phrase mapping; negation rewrites are human-authored and
only registered.  Success judgments come from outside and are aggregated
into per-(attack, task) accuracy; omission series additionally yield a
scaled score-decay curve.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .corpus import Corpus
from .errors import ValidationError
from .metrics import rouge1, rougeL
from .textstats import DEFAULT_POLICY, TokenizationPolicy, split_sentences, tokenize

ATTACK_TYPES = ("omission", "entity_swap", "negation")
TASKS = ("CTS", "CLCTS")
PROTOCOL_TEMPERATURES = (0.0, 0.7, 1.0)


@dataclass(frozen=True)
class AttackCase:
    case_id: str
    source_doc_id: str
    attack_type: str
    params: dict
    attacked_document: str

    def __post_init__(self) -> None:
        if self.attack_type not in ATTACK_TYPES:
            raise ValidationError(
                f"attack_type must be one of {ATTACK_TYPES}, got {self.attack_type!r}"
            )
        if not self.attacked_document.strip():
            raise ValidationError(f"case {self.case_id!r} has an empty attacked document")


@dataclass(frozen=True)
class AttackJudgment:
    case_id: str
    task: str
    temperature: float
    annotator_id: str
    success: bool

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise ValidationError(f"task must be one of {TASKS}, got {self.task!r}")
        if not any(abs(self.temperature - t) < 1e-9 for t in PROTOCOL_TEMPERATURES):
            raise ValidationError(
                f"temperature {self.temperature} is outside the protocol grid "
                f"{PROTOCOL_TEMPERATURES}"
            )


def omit_sentences(
    document: str,
    drop_fraction: float,
    seed: int,
    lang: str = "en",
) -> tuple[str, tuple[int, ...]]:
    """Remove floor(drop_fraction * n) sentences, chosen without replacement
    by a PCG64 generator seeded with `seed`; survivors keep their order.
    Deterministic: the same (document, fraction, seed) gives identical bytes.
    """
    if not 0.0 <= drop_fraction < 1.0:
        raise ValidationError(f"drop_fraction must be in [0, 1), got {drop_fraction}")
    sentences = split_sentences(document, lang)
    n = len(sentences)
    if n == 0:
        raise ValidationError("document has no sentences")
    count = math.floor(drop_fraction * n)
    if count >= n:
        raise ValidationError("dropping every sentence would leave an empty document")
    if count == 0:
        return document, ()
    rng = np.random.Generator(np.random.PCG64(seed))
    dropped = tuple(sorted(int(i) for i in rng.choice(n, size=count, replace=False)))
    survivors = [s for i, s in enumerate(sentences) if i not in set(dropped)]
    return " ".join(survivors), dropped


def select_omission_candidates(
    corpus: Corpus,
    min_sents: int = 100,
    max_sents: int = 150,
) -> list[str]:
    """All and only the documents whose sentence count is in [min, max]."""
    picked = []
    for pair in corpus.pairs:
        count = len(split_sentences(pair.document, pair.lang_src))
        if min_sents <= count <= max_sents:
            picked.append(pair.id)
    return picked


def _first_letter_casematch(text: str, pos: int, source: str) -> bool:
    window = text[pos:pos + len(source)]
    if len(window) != len(source):
        return False
    return window[0].lower() == source[0].lower() and window[1:] == source[1:]


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def swap_entities(
    document: str,
    mapping: Sequence[tuple[str, str]],
) -> tuple[str, dict[str, int]]:
    """Simultaneous phrase replacement in one left-to-right pass.

    Replacement output is never re-matched, so {a -> b, b -> a} swaps
    cleanly.  Matches are whole-word (no letter/digit adjacent on either
    side), case-insensitive in the first letter only, and the matched
    occurrence's initial capitalization is copied onto the replacement.
    Source phrases must not contain one another.
    """
    if not mapping:
        return document, {}
    sources = [src for src, _ in mapping]
    for src in sources:
        if not src:
            raise ValidationError("empty source phrase")
    if len(set(s.lower() for s in sources)) != len(sources):
        raise ValidationError("duplicate source phrases")
    for a in sources:
        for b in sources:
            if a is not b and a.lower() in b.lower():
                raise ValidationError(
                    f"source phrases overlap: {a!r} is contained in {b!r}"
                )
    by_length = sorted(mapping, key=lambda kv: len(kv[0]), reverse=True)
    counts = {src: 0 for src, _ in mapping}
    out: list[str] = []
    i = 0
    while i < len(document):
        hit = None
        for src, dst in by_length:
            if not _first_letter_casematch(document, i, src):
                continue
            before_ok = i == 0 or not _is_word_char(document[i - 1])
            end = i + len(src)
            after_ok = end == len(document) or not _is_word_char(document[end])
            if before_ok and after_ok:
                hit = (src, dst)
                break
        if hit is None:
            out.append(document[i])
            i += 1
            continue
        src, dst = hit
        matched = document[i:i + len(src)]
        replacement = dst
        if matched[:1].isupper() and replacement:
            replacement = replacement[0].upper() + replacement[1:]
        elif matched[:1].islower() and replacement:
            replacement = replacement[0].lower() + replacement[1:]
        out.append(replacement)
        counts[src] += 1
        i += len(src)
    if sum(counts.values()) == 0:
        warnings.warn("entity swap made zero replacements")
    return "".join(out), counts


def attack_accuracy(
    judgments: Iterable[AttackJudgment],
    cases: Iterable[AttackCase] | Mapping[str, str],
) -> dict[tuple[str, str], float]:
    """Success rate per (attack_type, task); cells with no data are absent.

    `cases` supplies the case_id -> attack_type join, either as AttackCase
    values or as a ready-made mapping.
    """
    if isinstance(cases, Mapping):
        type_of = dict(cases)
    else:
        type_of = {c.case_id: c.attack_type for c in cases}
    totals: dict[tuple[str, str], list[int]] = {}
    for j in judgments:
        if j.case_id not in type_of:
            raise ValidationError(f"judgment references unknown case {j.case_id!r}")
        cell = (type_of[j.case_id], j.task)
        bucket = totals.setdefault(cell, [0, 0])
        bucket[0] += int(j.success)
        bucket[1] += 1
    return {cell: hits / count for cell, (hits, count) in sorted(totals.items())}


# --------------------------------------------------------------------------
# Score decay over omission fractions.

MetricFn = Callable[[str, str], float]


def default_decay_metrics(
    lang: str = "en",
    policy: TokenizationPolicy = DEFAULT_POLICY,
) -> dict[str, MetricFn]:
    def r1(candidate: str, reference: str) -> float:
        return rouge1(tokenize(candidate, lang, policy), tokenize(reference, lang, policy)).f1

    def rl(candidate: str, reference: str) -> float:
        return rougeL(tokenize(candidate, lang, policy), tokenize(reference, lang, policy)).f1

    return {"ROUGE-1": r1, "ROUGE-L": rl}


@dataclass(frozen=True)
class CurvePoint:
    fraction: float
    mean: float
    ci_half_width: float


@dataclass(frozen=True)
class DecayCurve:
    points: tuple[CurvePoint, ...]
    n_documents: int
    metric_names: tuple[str, ...]
    skipped: tuple[str, ...] = field(default=())   # "doc_id/metric" with constant series

    def to_dict(self) -> dict:
        return {
            "n_documents": self.n_documents,
            "metrics": list(self.metric_names),
            "skipped": list(self.skipped),
            "points": [
                {"fraction": p.fraction, "mean": p.mean, "ci_half_width": p.ci_half_width}
                for p in self.points
            ],
        }


def score_decay_run(
    summaries: Mapping[float, str],
    metrics: Mapping[str, MetricFn],
) -> dict[str, dict[float, float]]:
    """Score one document's omission series against its fraction-0 summary.

    Returns {metric: {fraction: min-max scaled score}}; metrics whose raw
    series is constant are dropped (scaling is undefined for them).
    """
    if 0.0 not in summaries:
        raise ValidationError("fraction 0.0 (the baseline summary) is required")
    baseline = summaries[0.0]
    scaled: dict[str, dict[float, float]] = {}
    for name, fn in metrics.items():
        raw = {f: fn(text, baseline) for f, text in summaries.items()}
        low, high = min(raw.values()), max(raw.values())
        if high == low:
            continue
        scaled[name] = {f: (v - low) / (high - low) for f, v in raw.items()}
    return scaled


def decay_curve(
    runs: Mapping[str, Mapping[float, str]],
    metrics: Mapping[str, MetricFn] | None = None,
    lang: str = "en",
    policy: TokenizationPolicy = DEFAULT_POLICY,
) -> DecayCurve:
    """Aggregate scaled decay across documents.

    Every document's series must cover the same fraction grid and include
    fraction 0.  Scores are min-max scaled per (document, metric), averaged
    over metrics, then over documents; the confidence half-width is
    1.96 * stderr across documents, falling back to across metrics when
    only one document is given.
    """
    if not runs:
        raise ValidationError("no documents given")
    if metrics is None:
        metrics = default_decay_metrics(lang, policy)
    grids = {doc_id: tuple(sorted(series.keys())) for doc_id, series in runs.items()}
    grid = next(iter(grids.values()))
    mismatched = [d for d, g in grids.items() if g != grid]
    if mismatched:
        raise ValidationError(f"fraction grids differ across documents: {mismatched}")

    per_doc_mean: dict[str, dict[float, float]] = {}
    per_doc_metric: dict[str, dict[str, dict[float, float]]] = {}
    skipped: list[str] = []
    for doc_id in sorted(runs):
        scaled = score_decay_run(runs[doc_id], metrics)
        for name in metrics:
            if name not in scaled:
                warnings.warn(f"metric {name!r} skipped for {doc_id!r}: constant series")
                skipped.append(f"{doc_id}/{name}")
        if not scaled:
            raise ValidationError(f"every metric is constant for document {doc_id!r}")
        per_doc_metric[doc_id] = scaled
        per_doc_mean[doc_id] = {
            f: sum(series[f] for series in scaled.values()) / len(scaled)
            for f in grid
        }

    points: list[CurvePoint] = []
    n_docs = len(per_doc_mean)
    for f in grid:
        doc_values = [per_doc_mean[d][f] for d in sorted(per_doc_mean)]
        mean = sum(doc_values) / n_docs
        if n_docs >= 2:
            sd = float(np.std(doc_values, ddof=1))
            half = 1.96 * sd / math.sqrt(n_docs)
        else:
            only = per_doc_metric[next(iter(per_doc_metric))]
            metric_values = [series[f] for series in only.values()]
            if len(metric_values) < 2:
                raise ValidationError(
                    "confidence interval needs at least 2 documents or 2 metrics"
                )
            sd = float(np.std(metric_values, ddof=1))
            half = 1.96 * sd / math.sqrt(len(metric_values))
        points.append(CurvePoint(fraction=f, mean=mean, ci_half_width=half))
    return DecayCurve(
        points=tuple(points),
        n_documents=n_docs,
        metric_names=tuple(sorted(metrics)),
        skipped=tuple(skipped),
    )


# --------------------------------------------------------------------------
# File formats: cases JSONL, judgments CSV.

CASE_KEYS = ("case_id", "source_doc_id", "attack_type", "params", "attacked_document")
JUDGMENT_COLUMNS = ("case_id", "task", "temperature", "annotator_id", "success")


def save_cases(cases: Iterable[AttackCase], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for case in cases:
            row = {k: getattr(case, k) for k in CASE_KEYS}
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def load_cases(path: str) -> list[AttackCase]:
    cases: list[AttackCase] = []
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: line {line_no}: not valid JSON ({exc.msg})") from exc
            missing = [k for k in CASE_KEYS if k not in obj]
            if missing:
                raise ValidationError(f"{path}: line {line_no}: missing keys {missing}")
            if obj["case_id"] in seen:
                raise ValidationError(
                    f"{path}: duplicate case_id {obj['case_id']!r} on lines "
                    f"{seen[obj['case_id']]} and {line_no}"
                )
            seen[obj["case_id"]] = line_no
            cases.append(AttackCase(**{k: obj[k] for k in CASE_KEYS}))
    if not cases:
        raise ValidationError(f"{path}: no attack cases")
    return cases


def save_judgments(judgments: Iterable[AttackJudgment], path: str) -> None:
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(JUDGMENT_COLUMNS)
        for j in judgments:
            writer.writerow([j.case_id, j.task, f"{j.temperature:g}",
                             j.annotator_id, str(j.success).lower()])


def load_judgments(path: str) -> list[AttackJudgment]:
    import csv

    judgments: list[AttackJudgment] = []
    seen: dict[tuple, int] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in JUDGMENT_COLUMNS if c not in header]
        if missing:
            raise ValidationError(f"{path}: header is missing columns {missing}")
        for line_no, raw in enumerate(reader, start=2):
            flag = raw["success"].strip().lower()
            if flag not in ("true", "false", "1", "0"):
                raise ValidationError(
                    f"{path}: line {line_no}: success must be true/false, got {raw['success']!r}"
                )
            try:
                temperature = float(raw["temperature"])
            except ValueError:
                raise ValidationError(
                    f"{path}: line {line_no}: temperature {raw['temperature']!r} is not a number"
                )
            j = AttackJudgment(
                case_id=raw["case_id"], task=raw["task"], temperature=temperature,
                annotator_id=raw["annotator_id"], success=flag in ("true", "1"),
            )
            key = (j.case_id, j.task, j.temperature, j.annotator_id)
            if key in seen:
                raise ValidationError(
                    f"{path}: duplicate judgment {key} on lines {seen[key]} and {line_no}"
                )
            seen[key] = line_no
            judgments.append(j)
    return judgments


def make_omission_cases(
    corpus: Corpus,
    doc_ids: Sequence[str],
    fractions: Sequence[float],
    seed: int,
) -> list[AttackCase]:
    """Build one omission case per (document, fraction).  Child seeds are
    seed + case index so a single master seed pins the whole batch."""
    by_id = {pair.id: pair for pair in corpus.pairs}
    unknown = [d for d in doc_ids if d not in by_id]
    if unknown:
        raise ValidationError(f"unknown document ids: {unknown}")
    cases: list[AttackCase] = []
    index = 0
    for doc_id in doc_ids:
        pair = by_id[doc_id]
        for fraction in fractions:
            child_seed = seed + index
            attacked, dropped = omit_sentences(
                pair.document, fraction, child_seed, pair.lang_src
            )
            cases.append(AttackCase(
                case_id=f"{doc_id}__omit_{fraction:g}",
                source_doc_id=doc_id,
                attack_type="omission",
                params={
                    "drop_fraction": fraction,
                    "seed": child_seed,
                    "dropped_indices": list(dropped),
                },
                attacked_document=attacked,
            ))
            index += 1
    return cases
