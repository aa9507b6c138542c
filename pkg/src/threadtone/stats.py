"""Statistical kernel used by the analysis layer.

Small, convention-pinned implementations: Spearman and point-biserial
correlation with t-approximation p-values, Mood's median test without
continuity correction, Cohen's kappa, tie-aware ROC-AUC, RMSE, and OLS with
standard errors from sigma^2 * (X'X)^-1. scipy is used only for t and
chi-square tail probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2 as chi2_dist
from scipy.stats import t as t_dist

RANK_TOLERANCE = 1e-10


@dataclass
class TestResult:
    statistic: float
    p_value: float
    method: str


@dataclass
class RegressionResult:
    """Fitted OLS model; vif entries are NaN for constant (intercept) columns."""

    names: list[str]
    coefficients: list[float]
    std_errors: list[float]
    rmse: float
    r_squared: float
    n: int
    vif: list[float]

    def __post_init__(self):
        lengths = {
            len(self.names),
            len(self.coefficients),
            len(self.std_errors),
            len(self.vif),
        }
        if len(lengths) != 1:
            raise ValueError("per-regressor fields must have equal length")
        if self.rmse < 0:
            raise ValueError("rmse must be non-negative")


class RankDeficiencyError(ValueError):
    """Design matrix is rank deficient; ``columns`` names the culprits."""

    def __init__(self, columns: list[str]):
        super().__init__(f"design matrix is rank deficient (columns: {', '.join(columns)})")
        self.columns = columns


def average_ranks(values) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    arr = np.asarray(values, dtype=float)
    order = np.argsort(arr, kind="mergesort")
    ranks = np.empty(arr.shape[0], dtype=float)
    i = 0
    while i < arr.shape[0]:
        j = i
        while j + 1 < arr.shape[0] and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _as_float_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xd = x - x.mean()
    yd = y - y.mean()
    denom = math.sqrt(float(xd @ xd) * float(yd @ yd))
    if denom == 0.0:
        raise ValueError("correlation undefined for a constant input")
    return float(xd @ yd) / denom


def _t_approx_p(r: float, n: int) -> float:
    # Two-sided p from t = r * sqrt((n-2) / (1-r^2)) with n-2 df.
    if 1.0 - r * r <= 0.0:
        return 0.0
    t_stat = r * math.sqrt((n - 2) / (1.0 - r * r))
    return float(2.0 * t_dist.sf(abs(t_stat), n - 2))


def spearman(x, y) -> TestResult:
    """Spearman rank correlation with average-rank ties."""
    xv = _as_float_vector(x, "x")
    yv = _as_float_vector(y, "y")
    if xv.shape[0] != yv.shape[0]:
        raise ValueError("x and y lengths differ")
    if xv.shape[0] < 3:
        raise ValueError("need at least 3 observations")
    rho = _pearson(average_ranks(xv), average_ranks(yv))
    return TestResult(rho, _t_approx_p(rho, xv.shape[0]), "spearman")


def point_biserial(binary, y) -> TestResult:
    """Pearson correlation between a 0/1 vector and a continuous one."""
    bv = _as_float_vector(binary, "binary")
    yv = _as_float_vector(y, "y")
    if bv.shape[0] != yv.shape[0]:
        raise ValueError("binary and y lengths differ")
    if bv.shape[0] < 3:
        raise ValueError("need at least 3 observations")
    if not np.all((bv == 0.0) | (bv == 1.0)):
        raise ValueError("binary vector may only contain 0 and 1")
    if bv.min() == bv.max():
        raise ValueError("binary vector must contain both classes")
    r = _pearson(bv, yv)
    return TestResult(r, _t_approx_p(r, bv.shape[0]), "point-biserial")


def moods_median(a, b) -> TestResult:
    """Mood's median test on two samples.

    Values equal to the pooled grand median are excluded; the 2x2
    above/below table is tested with a Pearson chi-square statistic on one
    degree of freedom, without continuity correction.
    """
    av = _as_float_vector(a, "a")
    bv = _as_float_vector(b, "b")
    if av.shape[0] == 0 or bv.shape[0] == 0:
        raise ValueError("both samples must be non-empty")
    pooled = np.concatenate([av, bv])
    if pooled.min() == pooled.max():
        raise ValueError("pooled data is constant; median test undefined")
    grand = float(np.median(pooled))
    table = np.array(
        [
            [int(np.sum(av > grand)), int(np.sum(av < grand))],
            [int(np.sum(bv > grand)), int(np.sum(bv < grand))],
        ],
        dtype=float,
    )
    row_sums = table.sum(axis=1)
    col_sums = table.sum(axis=0)
    if np.any(row_sums == 0) or np.any(col_sums == 0):
        raise ValueError("degenerate contingency table (empty row or column)")
    expected = np.outer(row_sums, col_sums) / table.sum()
    stat = float(np.sum((table - expected) ** 2 / expected))
    return TestResult(stat, float(chi2_dist.sf(stat, 1)), "moods-median")


def cohens_kappa(labels_a, labels_b) -> float:
    """Chance-corrected agreement between two label sequences."""
    la = list(labels_a)
    lb = list(labels_b)
    if len(la) != len(lb):
        raise ValueError("label sequences have different lengths")
    if not la:
        raise ValueError("label sequences are empty")
    n = len(la)
    observed = sum(1 for x, y in zip(la, lb) if x == y) / n
    categories = set(la) | set(lb)
    expected = sum(
        (la.count(cat) / n) * (lb.count(cat) / n) for cat in categories
    )
    if expected >= 1.0 - 1e-15:
        raise ValueError("expected agreement is 1; kappa undefined")
    return (observed - expected) / (1.0 - expected)


def roc_auc(scores, labels) -> float:
    """Rank-based AUC; tied scores contribute 1/2 per positive-negative pair."""
    sv = _as_float_vector(scores, "scores")
    lv = np.asarray(labels)
    if sv.shape[0] != lv.shape[0]:
        raise ValueError("scores and labels lengths differ")
    positive = lv == 1
    negative = lv == 0
    if not np.all(positive | negative):
        raise ValueError("labels may only contain 0 and 1")
    n_pos = int(positive.sum())
    n_neg = int(negative.sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("need at least one positive and one negative label")
    ranks = average_ranks(sv)
    rank_sum = float(ranks[positive].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def rmse(predictions, truths) -> float:
    pv = _as_float_vector(predictions, "predictions")
    tv = _as_float_vector(truths, "truths")
    if pv.shape[0] != tv.shape[0]:
        raise ValueError("predictions and truths lengths differ")
    if pv.shape[0] == 0:
        raise ValueError("need at least one observation")
    return float(np.sqrt(np.mean((pv - tv) ** 2)))


def _r_squared_centered(y: np.ndarray, residuals: np.ndarray) -> float:
    total = float(np.sum((y - y.mean()) ** 2))
    if total == 0.0:
        raise ValueError("response is constant; r_squared undefined")
    return 1.0 - float(residuals @ residuals) / total


def vif(X, names: list[str] | None = None) -> list[float]:
    """Variance inflation factor per column of ``X``.

    Each column is regressed on the remaining columns (an intercept is added
    to the auxiliary design unless one is already present) and VIF_j is
    1/(1 - R^2_j). Constant columns get NaN; a perfectly reproducible column
    gets inf.
    """
    mat = np.asarray(X, dtype=float)
    if mat.ndim != 2:
        raise ValueError("X must be two-dimensional")
    n, p = mat.shape
    if names is not None and len(names) != p:
        raise ValueError("names length must match column count")
    if n <= p:
        raise ValueError("need more rows than columns")
    out = []
    for j in range(p):
        column = mat[:, j]
        if np.ptp(column) == 0.0:
            out.append(math.nan)
            continue
        others = np.delete(mat, j, axis=1)
        has_constant = others.shape[1] > 0 and bool(
            np.any(np.ptp(others, axis=0) == 0.0)
        )
        if not has_constant:
            others = np.column_stack([np.ones(n), others])
        beta, *_ = np.linalg.lstsq(others, column, rcond=None)
        resid = column - others @ beta
        total = float(np.sum((column - column.mean()) ** 2))
        r_sq = 1.0 - float(resid @ resid) / total
        if r_sq >= 1.0 - 1e-12:
            out.append(math.inf)
        else:
            out.append(1.0 / (1.0 - r_sq))
    return out


def ols(X, y, names: list[str] | None = None) -> RegressionResult:
    """Least squares via SVD with sigma^2 * (X'X)^-1 standard errors.

    ``X`` is the full design matrix; include the intercept column yourself.
    Raises RankDeficiencyError (naming the involved columns) when the
    smallest singular value falls below 1e-10 relative to the largest.
    """
    mat = np.asarray(X, dtype=float)
    yv = _as_float_vector(y, "y")
    if mat.ndim != 2:
        raise ValueError("X must be two-dimensional")
    n, p = mat.shape
    if yv.shape[0] != n:
        raise ValueError("X and y row counts differ")
    if n <= p:
        raise ValueError("need more observations than regressors")
    if not np.all(np.isfinite(mat)):
        raise ValueError("X contains non-finite values")
    if names is None:
        names = [f"x{j}" for j in range(p)]
    elif len(names) != p:
        raise ValueError("names length must match column count")

    u, s, vt = np.linalg.svd(mat, full_matrices=False)
    if s[-1] < RANK_TOLERANCE * s[0]:
        null_vector = np.abs(vt[-1])
        involved = [
            names[j]
            for j in range(p)
            if null_vector[j] > 1e-8 * null_vector.max()
        ]
        raise RankDeficiencyError(involved)

    beta = vt.T @ ((u.T @ yv) / s)
    residuals = yv - mat @ beta
    ssr = float(residuals @ residuals)
    sigma_sq = ssr / (n - p)
    covariance_diag = (vt.T ** 2 / s**2).sum(axis=1) * sigma_sq
    std_errors = np.sqrt(covariance_diag)

    return RegressionResult(
        names=list(names),
        coefficients=[float(b) for b in beta],
        std_errors=[float(se) for se in std_errors],
        rmse=float(np.sqrt(ssr / n)),
        r_squared=_r_squared_centered(yv, residuals),
        n=n,
        vif=vif(mat, names),
    )
