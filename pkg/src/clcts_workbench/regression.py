"""Document-feature regression: standardized OLS with dummy-coded
categorical features, t-test stars, adjusted R², and VIF diagnostics.

The model regresses a per-(document, system) quality score on semantic
similarity, document length, mean dependency distance, a publication-year
group, and the generating system, all numeric columns (response included)
standardized to zero mean and unit variance.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats as _scipy_stats

from .errors import ValidationError
from .metaeval import significance_stars

NUMERIC_TERMS = ("Similarity", "Length", "MDD")

#: Canonical publication-year groups, in temporal order.  Half-open
#: intervals: a year belongs to the latest group whose start it reaches.
YEAR_GROUPS = ("-1800", "1800-1850", "1850+")


def year_group_for(year: int) -> str:
    if year < 1800:
        return "-1800"
    if year < 1850:
        return "1800-1850"
    return "1850+"


def standardize(values: Sequence[float], ddof: int = 0) -> tuple[np.ndarray, float, float]:
    """z-scores plus the (mean, sd) used.  Population sd by default
    (ddof=0); pass ddof=1 for the sample convention."""
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        raise ValidationError(f"need at least 2 values to standardize, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("cannot standardize non-finite values")
    mean = float(arr.mean())
    sd = float(arr.std(ddof=ddof))
    if sd == 0.0:
        raise ValidationError("constant input: standard deviation is zero")
    return (arr - mean) / sd, mean, sd


@dataclass(frozen=True)
class FeatureRow:
    doc_id: str
    model_id: str
    similarity: float
    length: float
    mdd: float
    year_group: str
    y: float            # quality score for this (document, system)


@dataclass(frozen=True)
class DesignInfo:
    matrix: np.ndarray
    names: tuple[str, ...]
    scalers: dict[str, tuple[float, float]]     # term -> (mean, sd)


def _dummy_columns(
    values: list[str],
    base: str,
    kind: str,
    declared: Sequence[str] | None,
) -> list[str]:
    levels = sorted(set(values))
    if declared is not None:
        unseen = sorted(set(levels) - set(declared))
        if unseen:
            raise ValidationError(f"unseen {kind} level(s) {unseen}; declared: {sorted(declared)}")
    if base not in levels:
        raise ValidationError(f"base {kind} {base!r} absent from the data (levels: {levels})")
    return [lv for lv in levels if lv != base]


def build_design(
    rows: Sequence[FeatureRow],
    base_year_group: str,
    base_model: str,
    year_levels: Sequence[str] | None = None,
    model_levels: Sequence[str] | None = None,
    ddof: int = 0,
) -> DesignInfo:
    """Intercept, standardized numeric columns, and one indicator column per
    non-base categorical level, in that fixed order.

    A categorical with a single level equal to its base produces no dummy
    columns; a base level missing from the data is an error.
    """
    if not rows:
        raise ValidationError("no feature rows")
    bad = [r.doc_id for r in rows
           if not all(math.isfinite(v) for v in (r.similarity, r.length, r.mdd, r.y))]
    if bad:
        raise ValidationError(f"rows with non-finite features: {sorted(set(bad))}")

    scalers: dict[str, tuple[float, float]] = {}
    columns: list[np.ndarray] = [np.ones(len(rows))]
    names: list[str] = ["Intercept"]
    for term, attr in zip(NUMERIC_TERMS, ("similarity", "length", "mdd")):
        z, mean, sd = standardize([getattr(r, attr) for r in rows], ddof=ddof)
        scalers[term] = (mean, sd)
        columns.append(z)
        names.append(term)
    year_values = [r.year_group for r in rows]
    for level in _dummy_columns(year_values, base_year_group, "year group", year_levels):
        columns.append(np.array([1.0 if v == level else 0.0 for v in year_values]))
        names.append(f"Year:{level}")
    model_values = [r.model_id for r in rows]
    for level in _dummy_columns(model_values, base_model, "model", model_levels):
        columns.append(np.array([1.0 if v == level else 0.0 for v in model_values]))
        names.append(f"Model:{level}")
    return DesignInfo(matrix=np.column_stack(columns), names=tuple(names), scalers=scalers)


@dataclass(frozen=True)
class Coefficient:
    beta: float
    std_err: float
    t: float
    p_value: float
    stars: int

    def formatted(self, digits: int = 2) -> str:
        return f"{self.beta:.{digits}f}" + "*" * self.stars


@dataclass(frozen=True)
class RegressionResult:
    coefficients: dict[str, Coefficient]
    r2: float
    adj_r2: float
    residual_variance: float
    n: int
    k: int

    @property
    def intercept(self) -> float:
        return self.coefficients["Intercept"].beta


def _rank_check(X: np.ndarray, names: Sequence[str]) -> None:
    n, k = X.shape
    if n <= k:
        raise ValidationError(f"need more observations than columns: n={n}, k={k}")
    rank = np.linalg.matrix_rank(X)
    if rank < k:
        # R's diagonal from an unpivoted QR flags columns that are linear
        # combinations of earlier ones.
        _, r = np.linalg.qr(X)
        scale = max(abs(r[0, 0]), 1.0)
        offending = [names[j] for j in range(k) if abs(r[j, j]) < 1e-10 * scale]
        raise ValidationError(f"design matrix is rank deficient; offending columns: {offending}")


def ols_fit(X: np.ndarray, y: Sequence[float], names: Sequence[str]) -> RegressionResult:
    """Least squares via orthogonal decomposition, classical standard errors,
    two-tailed t-tests with n-k degrees of freedom."""
    X = np.asarray(X, dtype=float)
    yv = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] != yv.size:
        raise ValidationError(f"shape mismatch: X {X.shape}, y {yv.size}")
    if len(names) != X.shape[1]:
        raise ValidationError(f"{X.shape[1]} columns but {len(names)} names")
    _rank_check(X, names)
    n, k = X.shape
    beta, _, _, _ = np.linalg.lstsq(X, yv, rcond=None)
    residuals = yv - X @ beta
    rss = float(residuals @ residuals)
    sigma2 = rss / (n - k)
    xtx_inv = np.linalg.inv(X.T @ X)
    ses = np.sqrt(np.maximum(sigma2 * np.diag(xtx_inv), 0.0))

    has_intercept = "Intercept" in names
    centered = yv - yv.mean() if has_intercept else yv
    tss = float(centered @ centered)
    r2 = 1.0 if tss == 0.0 else 1.0 - rss / tss
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / (n - k)

    coefficients: dict[str, Coefficient] = {}
    for name, b, se in zip(names, beta, ses):
        if se == 0.0:
            t_stat = math.inf if b != 0 else 0.0
            p = 0.0 if b != 0 else 1.0
        else:
            t_stat = float(b / se)
            p = float(2.0 * _scipy_stats.t.sf(abs(t_stat), df=n - k))
        coefficients[name] = Coefficient(
            beta=float(b), std_err=float(se), t=t_stat, p_value=p,
            stars=significance_stars(p),
        )
    return RegressionResult(
        coefficients=coefficients, r2=r2, adj_r2=adj_r2,
        residual_variance=sigma2, n=n, k=k,
    )


def vif(features: dict[str, Sequence[float]]) -> dict[str, float]:
    """Variance inflation factor per feature: 1 / (1 - R²) from regressing
    the feature on all the others plus an intercept.  Perfect collinearity
    reports as math.inf, not as a crash."""
    names = sorted(features)
    if len(names) < 2:
        raise ValidationError("VIF needs at least 2 features")
    arrays = {}
    n = None
    for name in names:
        arr = np.asarray(features[name], dtype=float)
        if n is None:
            n = arr.size
        elif arr.size != n:
            raise ValidationError(f"feature {name!r} has {arr.size} values, expected {n}")
        if np.all(arr == arr[0]):
            raise ValidationError(f"feature {name!r} is constant")
        arrays[name] = arr
    assert n is not None
    if n <= len(names):
        raise ValidationError(f"need more observations ({n}) than features ({len(names)})")
    out: dict[str, float] = {}
    for name in names:
        target = arrays[name]
        others = [arrays[o] for o in names if o != name]
        X = np.column_stack([np.ones(n)] + others)
        beta, _, _, _ = np.linalg.lstsq(X, target, rcond=None)
        residuals = target - X @ beta
        rss = float(residuals @ residuals)
        centered = target - target.mean()
        tss = float(centered @ centered)
        r2 = 1.0 - rss / tss
        out[name] = math.inf if r2 >= 1.0 - 1e-12 else 1.0 / (1.0 - r2)
    return out


@dataclass(frozen=True)
class Eq1Report:
    result: RegressionResult
    term_order: tuple[str, ...]
    scalers: dict[str, tuple[float, float]]
    y_scaler: tuple[float, float]

    def to_dict(self) -> dict:
        coef = self.result.coefficients
        return {
            "terms": {
                name: {
                    "beta": coef[name].beta,
                    "std_err": coef[name].std_err,
                    "t": coef[name].t,
                    "p_value": coef[name].p_value,
                    "formatted": coef[name].formatted(),
                }
                for name in self.term_order
            },
            "adj_r2": self.result.adj_r2,
            "r2": self.result.r2,
            "residual_variance": self.result.residual_variance,
            "n": self.result.n,
            "k": self.result.k,
        }


def fit_eq1(
    rows: Sequence[FeatureRow],
    base_year_group: str,
    base_model: str,
    year_levels: Sequence[str] | None = None,
    model_levels: Sequence[str] | None = None,
    ddof: int = 0,
) -> Eq1Report:
    """End-to-end fit: standardize (response included), dummy-code, run OLS."""
    design = build_design(
        rows, base_year_group, base_model,
        year_levels=year_levels, model_levels=model_levels, ddof=ddof,
    )
    z_y, y_mean, y_sd = standardize([r.y for r in rows], ddof=ddof)
    result = ols_fit(design.matrix, z_y, design.names)
    return Eq1Report(
        result=result,
        term_order=design.names,
        scalers=design.scalers,
        y_scaler=(y_mean, y_sd),
    )


FEATURE_COLUMNS = ("doc_id", "model_id", "similarity", "length", "mdd", "year_group", "y")


def load_feature_table(path: str) -> list[FeatureRow]:
    """Read a feature CSV (columns doc_id,model_id,similarity,length,mdd,
    year_group,y); numeric parse failures name the line."""
    rows: list[FeatureRow] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in FEATURE_COLUMNS if c not in header]
        if missing:
            raise ValidationError(f"{path}: header is missing columns {missing}")
        for line_no, raw in enumerate(reader, start=2):
            try:
                rows.append(FeatureRow(
                    doc_id=raw["doc_id"], model_id=raw["model_id"],
                    similarity=float(raw["similarity"]), length=float(raw["length"]),
                    mdd=float(raw["mdd"]), year_group=raw["year_group"],
                    y=float(raw["y"]),
                ))
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"{path}: line {line_no}: {exc}")
    if not rows:
        raise ValidationError(f"{path}: no feature rows")
    return rows
