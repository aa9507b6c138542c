"""Report construction over assembled per-submission records.

Builds the study tables: feature-vs-attraction correlations split by
controversiality, median quadrants, political-group median tests, the
toxicity-only baseline regression and the full feature regression, decile
sampling for annotation, and deterministic CSV emission for figures.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .features import FeatureVector
from .scoring import TaRecord, ThresholdSweep, overlap_report
from .stats import (
    RegressionResult,
    TestResult,
    moods_median,
    ols,
    point_biserial,
    spearman,
)

logger = logging.getLogger(__name__)

HISTOGRAM_BINS = 20
VIF_WARN_LIMIT = 3.0

# Feature rows of the correlation table, in output order. The binary flags
# use point-biserial correlation; everything else uses Spearman.
CORRELATION_FEATURES = (
    ("question_asking", "question_ratio", False),
    ("elaboration", "lexical_item_count", False),
    ("hedge_usage", "hedge_ratio", False),
    ("gratitude_usage", "gratitude_ratio", False),
    ("positive_polarity", "positive_polarity", True),
    ("negative_polarity", "negative_polarity", True),
    ("name_calling", "proper_noun_ratio", False),
)

REGRESSION_FIELDS = (
    "c_score",
    "question_ratio",
    "gratitude_ratio",
    "proper_noun_ratio",
    "lexical_item_count",
    "hedge_ratio",
    "polarity_compound",
)

QUADRANT_NAMES = ("low_c_low_ta", "low_c_high_ta", "high_c_low_ta", "high_c_high_ta")


@dataclass
class PostRecord:
    """One submission with its imported scores and extracted features."""

    post_id: str
    subreddit: str
    is_political: bool
    c_score: float
    ta: TaRecord
    features: FeatureVector
    toxicity: float
    topic_label: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.c_score <= 1.0:
            raise ValueError("c_score must be in [0, 1]")
        if not 0.0 <= self.toxicity <= 1.0:
            raise ValueError("toxicity must be in [0, 1]")
        if self.ta.submission_id != self.post_id:
            raise ValueError(
                f"ta record belongs to {self.ta.submission_id}, not {self.post_id}"
            )


@dataclass
class Table:
    columns: list[str]
    rows: list[list]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("row width does not match columns")


@dataclass
class AnalysisReport:
    tables: dict[str, Table] = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)


@dataclass
class GroupMedianResult:
    value: str
    median_group: float
    median_rest: float
    test: TestResult


@dataclass
class BaselineResult:
    regression: RegressionResult
    pred_truth_spearman: TestResult


def record_value(record: PostRecord, name: str) -> float:
    """Resolve a score or feature name against a record."""
    if name in ("c_score", "toxicity"):
        return getattr(record, name)
    if name in ("ta_mean", "ta_ratio", "max_comment_toxicity"):
        return getattr(record.ta, name)
    return float(getattr(record.features, name))


def split_by_controversy(
    records: list[PostRecord], split: str | float = "median"
) -> tuple[list[PostRecord], list[PostRecord]]:
    """(controversial, non-controversial) groups by c_score.

    ``split`` is "median" or a numeric threshold; records strictly above the
    cut are controversial, ties fall to the non-controversial side.
    """
    if split == "median":
        cut = float(np.median([r.c_score for r in records]))
    else:
        cut = float(split)
        if not 0.0 <= cut <= 1.0:
            raise ValueError("controversy threshold must be in [0, 1]")
    high = [r for r in records if r.c_score > cut]
    low = [r for r in records if r.c_score <= cut]
    return high, low


def correlation_table(
    records: list[PostRecord], split: str | float = "median"
) -> Table:
    """Feature-vs-ta_mean correlation and prevalence per controversy group.

    Prevalence is the percentage of records where the feature value is
    greater than zero (binary flags: percentage true).
    """
    controversial, non_controversial = split_by_controversy(records, split)
    rows = []
    for group_name, group in (
        ("controversial", controversial),
        ("non_controversial", non_controversial),
    ):
        if len(group) < 3:
            raise ValueError(
                f"group {group_name!r} has {len(group)} records; need at least 3"
            )
    for label, field_name, binary in CORRELATION_FEATURES:
        for group_name, group in (
            ("controversial", controversial),
            ("non_controversial", non_controversial),
        ):
            values = [record_value(r, field_name) for r in group]
            ta_means = [r.ta.ta_mean for r in group]
            try:
                if binary:
                    result = point_biserial(values, ta_means)
                else:
                    result = spearman(values, ta_means)
            except ValueError as exc:
                raise ValueError(f"{label} in group {group_name!r}: {exc}") from exc
            prevalence = 100.0 * sum(1 for v in values if v > 0) / len(values)
            rows.append(
                [label, group_name, result.statistic, result.p_value, prevalence, result.method]
            )
    return Table(
        columns=["feature", "group", "correlation", "p_value", "prevalence_pct", "method"],
        rows=rows,
    )


def quadrant_partition(records: list[PostRecord]) -> dict[str, list[PostRecord]]:
    """Median split on c_score and ta_mean; ties go to the low side."""
    if not records:
        raise ValueError("need at least one record")
    median_c = float(np.median([r.c_score for r in records]))
    median_ta = float(np.median([r.ta.ta_mean for r in records]))
    quadrants: dict[str, list[PostRecord]] = {name: [] for name in QUADRANT_NAMES}
    for record in records:
        c_side = "high_c" if record.c_score > median_c else "low_c"
        ta_side = "high_ta" if record.ta.ta_mean > median_ta else "low_ta"
        quadrants[f"{c_side}_{ta_side}"].append(record)
    return quadrants


def group_median_test(
    records: list[PostRecord], value: str = "c_score"
) -> GroupMedianResult:
    """Mood's median test of ``value`` between political and other subreddits."""
    group = [record_value(r, value) for r in records if r.is_political]
    rest = [record_value(r, value) for r in records if not r.is_political]
    if not group or not rest:
        raise ValueError("need records in both the political and the other group")
    return GroupMedianResult(
        value=value,
        median_group=float(np.median(group)),
        median_rest=float(np.median(rest)),
        test=moods_median(group, rest),
    )


def baseline_regression(records: list[PostRecord]) -> BaselineResult:
    """OLS of ta_mean on submission toxicity plus Spearman(prediction, truth)."""
    if len(records) < 3:
        raise ValueError("need at least 3 records")
    toxicity = np.array([r.toxicity for r in records])
    ta_mean = np.array([r.ta.ta_mean for r in records])
    if np.ptp(toxicity) == 0.0:
        raise ValueError("toxicity is constant; baseline undefined")
    design = np.column_stack([np.ones(len(records)), toxicity])
    regression = ols(design, ta_mean, names=["intercept", "toxicity"])
    predictions = design @ np.array(regression.coefficients)
    return BaselineResult(
        regression=regression,
        pred_truth_spearman=spearman(predictions, ta_mean),
    )


def full_regression(records: list[PostRecord]) -> RegressionResult:
    """OLS of ta_mean on controversiality plus the six regression features.

    Collinearity is checked first: regressors with a variance inflation
    factor above 3 are logged. Rank deficiency raises.
    """
    if len(records) < len(REGRESSION_FIELDS) + 2:
        raise ValueError("not enough records for the full regression")
    columns = [np.array([record_value(r, name) for r in records]) for name in REGRESSION_FIELDS]
    design = np.column_stack([np.ones(len(records))] + columns)
    names = ["intercept"] + list(REGRESSION_FIELDS)
    result = ols(design, [r.ta.ta_mean for r in records], names=names)
    for name, value in zip(result.names, result.vif):
        if value == value and value > VIF_WARN_LIMIT:  # NaN-safe comparison
            logger.warning("regressor %s has VIF %.2f (> %.1f)", name, value, VIF_WARN_LIMIT)
    return result


def decile_sample(
    records: list[PostRecord], score_field: str, per_decile: int, seed: int
) -> list[PostRecord]:
    """Seeded uniform sample of up to ``per_decile`` records from each decile.

    Deciles are rank-based over ``score_field`` (stable sort by score, then
    post id); short deciles are taken whole with a warning.
    """
    if not records:
        raise ValueError("need at least one record")
    if per_decile < 1:
        raise ValueError("per_decile must be at least 1")
    ordered = sorted(records, key=lambda r: (record_value(r, score_field), r.post_id))
    n = len(ordered)
    sampled = []
    for decile in range(10):
        start = decile * n // 10
        stop = (decile + 1) * n // 10
        bucket = ordered[start:stop]
        if not bucket:
            continue
        if len(bucket) <= per_decile:
            if len(bucket) < per_decile:
                logger.warning(
                    "decile %d has only %d records (wanted %d); taking all",
                    decile, len(bucket), per_decile,
                )
            sampled.extend(bucket)
            continue
        rng = random.Random(_derived_seed(seed, score_field, decile))
        sampled.extend(rng.sample(bucket, per_decile))
    return sampled


def _derived_seed(seed: int, *parts) -> int:
    key = ":".join([str(seed)] + [str(p) for p in parts])
    return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "big")


def histogram(values, bins: int = HISTOGRAM_BINS) -> list[tuple[float, float, int]]:
    """Fixed-width [0, 1] histogram; the top edge closes the last bin."""
    counts = [0] * bins
    for value in values:
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"histogram value {value!r} outside [0, 1]")
        counts[min(int(value * bins), bins - 1)] += 1
    return [(i / bins, (i + 1) / bins, counts[i]) for i in range(bins)]


def build_figure_tables(
    records: list[PostRecord],
    toxic_labels: list[bool],
    attracting_labels: list[bool],
    sweep: ThresholdSweep | None = None,
) -> dict[str, Table]:
    """The figure-backing tables: overlap, histograms, 2-D bins, quadrants."""
    if len(toxic_labels) != len(records) or len(attracting_labels) != len(records):
        raise ValueError("label lists must align with records")
    tables: dict[str, Table] = {}

    overlap = overlap_report(list(zip(toxic_labels, attracting_labels)))
    tables["overlap"] = Table(
        columns=["quadrant", "percent"],
        rows=[[name, overlap[name]] for name in ("both", "toxic_only", "attracting_only", "neither")],
    )

    tables["ta_hist"] = Table(
        columns=["bin_left", "bin_right", "count"],
        rows=[list(row) for row in histogram([r.ta.ta_mean for r in records])],
    )
    tables["c_hist"] = Table(
        columns=["bin_left", "bin_right", "count"],
        rows=[list(row) for row in histogram([r.c_score for r in records])],
    )

    baseline = baseline_regression(records)
    intercept, slope = baseline.regression.coefficients
    grid: dict[tuple[int, int], int] = {}
    for record in records:
        x = min(int(record.toxicity * HISTOGRAM_BINS), HISTOGRAM_BINS - 1)
        y = min(int(record.ta.ta_mean * HISTOGRAM_BINS), HISTOGRAM_BINS - 1)
        grid[(x, y)] = grid.get((x, y), 0) + 1
    rows = []
    for (x, y) in sorted(grid):
        rows.append(
            [
                x / HISTOGRAM_BINS,
                (x + 1) / HISTOGRAM_BINS,
                y / HISTOGRAM_BINS,
                (y + 1) / HISTOGRAM_BINS,
                grid[(x, y)],
                slope,
                intercept,
            ]
        )
    tables["tox_vs_ta"] = Table(
        columns=[
            "toxicity_bin_left",
            "toxicity_bin_right",
            "ta_bin_left",
            "ta_bin_right",
            "count",
            "baseline_slope",
            "baseline_intercept",
        ],
        rows=rows,
    )

    quadrants = quadrant_partition(records)
    total = len(records)
    tables["quadrants"] = Table(
        columns=["quadrant", "count", "percent"],
        rows=[
            [name, len(quadrants[name]), 100.0 * len(quadrants[name]) / total]
            for name in QUADRANT_NAMES
        ],
    )

    if sweep is not None:
        tables["sweep"] = sweep_table(sweep)
    return tables


def sweep_table(sweep: ThresholdSweep) -> Table:
    return Table(
        columns=["threshold", "precision", "recall", "f1"],
        rows=[[p.threshold, p.precision, p.recall, p.f1] for p in sweep.points],
    )


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table(table: Table, path: str | Path) -> Path:
    """Write a table as CSV with '\\n' endings; bytes depend only on content."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([_format_cell(cell) for cell in row])
    return path


FIGURES = ("overlap", "ta_hist", "tox_vs_ta", "c_hist", "quadrants", "sweep")


def emit_figure_data(report: AnalysisReport, figure: str, directory: str | Path) -> Path:
    """Write one figure's backing table as <figure>.csv under ``directory``."""
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; choose from {FIGURES}")
    table = report.tables.get(figure)
    if table is None:
        raise ValueError(f"report has no table {figure!r}")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return write_table(table, directory / f"{figure}.csv")
