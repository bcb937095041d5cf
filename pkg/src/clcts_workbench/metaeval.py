"""Agreement and correlation statistics for summary meta-evaluation.

Spearman's rho is computed on average ranks (fractional tie handling) and
tested with a two-tailed Student's t with n-2 degrees of freedom; the
significance stars follow the 0.05 / 0.01 / 0.001 thresholds throughout.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Sequence

import numpy as np
from scipy import stats as _scipy_stats

from .corpus import AnnotationRecord, MetricScoreTable, RATING_DIMENSIONS
from .errors import ValidationError


def significance_stars(p_value: float) -> int:
    return 3 if p_value < 0.001 else 2 if p_value < 0.01 else 1 if p_value < 0.05 else 0


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    n: int
    p_value: float
    stars: int

    @property
    def stars_str(self) -> str:
        return "*" * self.stars

    def formatted(self, digits: int = 2) -> str:
        return f"{self.rho:.{digits}f}{self.stars_str}"


def _average_ranks(values: Sequence[float]) -> np.ndarray:
    return _scipy_stats.rankdata(values, method="average")


def spearman(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Rank correlation with average-rank ties and t-test significance."""
    if len(x) != len(y):
        raise ValidationError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise ValidationError(f"need at least 3 observations, got {n}")
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if np.all(xa == xa[0]) or np.all(ya == ya[0]):
        raise ValidationError("zero variance: ranks are undefined for constant input")
    rx = _average_ranks(xa)
    ry = _average_ranks(ya)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    rho = float(rx @ ry / np.sqrt((rx @ rx) * (ry @ ry)))
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) == 1.0:
        p_value = 0.0
    else:
        t = rho * np.sqrt((n - 2) / (1.0 - rho * rho))
        p_value = float(2.0 * _scipy_stats.t.sf(abs(t), df=n - 2))
    return CorrelationResult(rho=rho, n=n, p_value=p_value, stars=significance_stars(p_value))


def interannotator_agreement(
    records: Iterable[AnnotationRecord],
    dimension: str,
    min_overlap: int = 3,
) -> float:
    """Mean pairwise Spearman rho over rater pairs, each pair computed on
    its own common (doc, system) items.

    Pairs with fewer than min_overlap common items, or with constant
    ratings on the common items, contribute nothing (the latter with a
    warning); if no pair remains, that is an error.
    """
    by_rater: dict[str, dict[tuple[str, str], float]] = {}
    for rec in records:
        by_rater.setdefault(rec.rater_id, {})[(rec.doc_id, rec.system_id)] = rec.rating(dimension)
    rhos: list[float] = []
    for ra, rb in combinations(sorted(by_rater), 2):
        common = sorted(by_rater[ra].keys() & by_rater[rb].keys())
        if len(common) < min_overlap:
            continue
        a = [by_rater[ra][item] for item in common]
        b = [by_rater[rb][item] for item in common]
        try:
            rhos.append(spearman(a, b).rho)
        except ValidationError:
            warnings.warn(
                f"raters {ra!r}/{rb!r} skipped for {dimension}: constant ratings "
                f"on their {len(common)} common items"
            )
    if not rhos:
        raise ValidationError(f"no rater pair with sufficient overlap for {dimension!r}")
    return sum(rhos) / len(rhos)


def rating_means(
    records: Iterable[AnnotationRecord],
    dimension: str,
) -> dict[str, dict[str, float]]:
    """Unweighted mean rating per system, separately per rater kind.

    Returns {system_id: {rater_kind: mean}}; kinds with no records for a
    system are simply absent.
    """
    if dimension not in RATING_DIMENSIONS:
        raise ValidationError(f"unknown rating dimension {dimension!r}")
    sums: dict[tuple[str, str], list[float]] = {}
    for rec in records:
        sums.setdefault((rec.system_id, rec.rater_kind), []).append(rec.rating(dimension))
    table: dict[str, dict[str, float]] = {}
    for (system_id, kind), values in sorted(sums.items()):
        table.setdefault(system_id, {})[kind] = sum(values) / len(values)
    return table


def format_rating_table(means: dict[str, dict[str, float]], digits: int = 2) -> dict[str, str]:
    """Render each system's means in the human/llm slash layout, e.g. "4.35/3.30"."""
    out: dict[str, str] = {}
    for system_id, kinds in means.items():
        parts = []
        for kind in ("human", "llm"):
            parts.append(f"{kinds[kind]:.{digits}f}" if kind in kinds else "-")
        out[system_id] = "/".join(parts)
    return out


def metric_human_correlation(
    scores: MetricScoreTable,
    records: Iterable[AnnotationRecord],
    dimension: str,
    pool_raters: bool = False,
) -> dict[str, CorrelationResult]:
    """Segment-level correlation of each metric with human ratings.

    The human value per (doc, system) item is the mean across available
    raters; pool_raters=True instead pairs each individual rating with the
    item's metric value.  Items are inner-joined per metric, never imputed;
    metrics with fewer than 3 joined items, or degenerate variance, are
    omitted with a warning.
    """
    ratings: dict[tuple[str, str], list[float]] = {}
    for rec in records:
        ratings.setdefault((rec.doc_id, rec.system_id), []).append(rec.rating(dimension))

    by_metric: dict[str, dict[tuple[str, str], float]] = {}
    for row in scores.rows:
        by_metric.setdefault(row.metric_name, {})[(row.doc_id, row.system_id)] = row.value

    results: dict[str, CorrelationResult] = {}
    for metric in sorted(by_metric):
        value_by_item = by_metric[metric]
        xs: list[float] = []
        ys: list[float] = []
        for item in sorted(value_by_item.keys() & ratings.keys()):
            if pool_raters:
                for rating in ratings[item]:
                    xs.append(value_by_item[item])
                    ys.append(rating)
            else:
                xs.append(value_by_item[item])
                ys.append(sum(ratings[item]) / len(ratings[item]))
        if len(xs) < 3:
            warnings.warn(f"metric {metric!r} omitted: only {len(xs)} joined items")
            continue
        try:
            results[metric] = spearman(xs, ys)
        except ValidationError as exc:
            warnings.warn(f"metric {metric!r} omitted: {exc}")
    return results


@dataclass(frozen=True)
class KappaResult:
    kappa: float | None     # None when chance agreement is total (p_e = 1)
    accuracy: float         # raw agreement p_o


def cohens_kappa(a: Sequence[Hashable], b: Sequence[Hashable]) -> KappaResult:
    """Cohen's kappa with marginal-product expected agreement."""
    if len(a) != len(b):
        raise ValidationError(f"length mismatch: {len(a)} vs {len(b)}")
    n = len(a)
    if n == 0:
        raise ValidationError("need at least one pair of labels")
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    labels = set(a) | set(b)
    count_a = {label: 0 for label in labels}
    count_b = {label: 0 for label in labels}
    for x in a:
        count_a[x] += 1
    for y in b:
        count_b[y] += 1
    p_e = sum(count_a[label] * count_b[label] for label in labels) / (n * n)
    if p_e == 1.0:
        return KappaResult(kappa=None, accuracy=p_o)
    return KappaResult(kappa=(p_o - p_e) / (1.0 - p_e), accuracy=p_o)
