"""Imported moderation scores and toxicity-attraction metrics.

Score files are produced outside this package (per-category model scores in
[0, 1]); this module loads them, collapses categories into a single toxicity
value, derives per-conversation toxicity-attraction records, and provides
the threshold sweep and overlap arithmetic used by the reports.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

from .corpus import Conversation

logger = logging.getLogger(__name__)

DEFAULT_EXCLUDED_CATEGORIES = frozenset({"self-harm/intent", "violence"})
DEFAULT_TOXIC_THRESHOLD = 0.5
SCALAR_CATEGORY = "score"

# 0.05 .. 0.95 in steps of 0.05, built with integer arithmetic to keep the
# grid values exact.
DEFAULT_SWEEP_GRID = [round(i * 0.05, 2) for i in range(1, 20)]


class ScoreFileError(ValueError):
    """A score file line that cannot be parsed or validated."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class MissingScoresError(ValueError):
    """Posts that need scores but have none; ``missing_ids`` lists them."""

    def __init__(self, missing_ids: list[str]):
        shown = ", ".join(missing_ids[:20])
        more = "" if len(missing_ids) <= 20 else f" (+{len(missing_ids) - 20} more)"
        super().__init__(f"no scores for {len(missing_ids)} posts: {shown}{more}")
        self.missing_ids = missing_ids


@dataclass
class ScoreTable:
    """Per-post category scores plus scorer provenance."""

    scorer: str
    excluded_categories: set[str]
    scores: dict[str, dict[str, float]]

    def __contains__(self, post_id: str) -> bool:
        return post_id in self.scores

    def toxicity(self, post_id: str, excluded: set[str] | None = None) -> float:
        return aggregate_toxicity(self.scores[post_id], excluded if excluded is not None else self.excluded_categories)


@dataclass
class TaRecord:
    """Toxicity attraction of one conversation's comment set."""

    submission_id: str
    ta_mean: float
    ta_ratio: float
    n_comments: int
    max_comment_toxicity: float

    def __post_init__(self):
        if self.n_comments < 1:
            raise ValueError("n_comments must be at least 1")
        for name in ("ta_mean", "ta_ratio", "max_comment_toxicity"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value!r}")
        count = self.ta_ratio * self.n_comments
        if abs(count - round(count)) > 1e-9:
            raise ValueError("ta_ratio must be a whole number of comments over n_comments")
        if self.ta_mean > self.max_comment_toxicity + 1e-12:
            raise ValueError("ta_mean cannot exceed max_comment_toxicity")


@dataclass
class SweepPoint:
    threshold: float
    precision: float
    recall: float
    f1: float


@dataclass
class ThresholdSweep:
    points: list[SweepPoint]
    best_threshold: float

    def __post_init__(self):
        thresholds = [p.threshold for p in self.points]
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise ValueError("thresholds must be strictly increasing")


def _parse_header_block(handle) -> tuple[dict[str, str], int]:
    """Read leading ``# key: value`` comment lines; returns (meta, lines read)."""
    meta: dict[str, str] = {}
    consumed = 0
    position = handle.tell()
    while True:
        line = handle.readline()
        if not line.startswith("#"):
            handle.seek(position)
            break
        consumed += 1
        position = handle.tell()
        content = line[1:].strip()
        if ":" in content:
            key, _, value = content.partition(":")
            meta[key.strip().lower()] = value.strip()
    return meta, consumed


def load_scores(
    path: str | Path,
    scorer: str | None = None,
    excluded: set[str] | None = None,
) -> ScoreTable:
    """Read a score file into a ScoreTable.

    The file is CSV with either ``post_id,category,score`` columns or the
    scalar form ``post_id,score`` (category then defaults to "score").
    Leading ``# scorer: ...`` / ``# exclude: a, b`` comment lines declare
    provenance; the ``scorer`` and ``excluded`` arguments override them
    (sidecar-config style). Scores must lie in [0, 1] and each
    (post_id, category) pair may appear once.
    """
    with open(path, encoding="utf-8") as handle:
        meta, header_lines = _parse_header_block(handle)
        reader = csv.reader(handle)
        try:
            columns = next(reader)
        except StopIteration:
            raise ScoreFileError("file has no header row") from None
        columns = [c.strip() for c in columns]
        if columns == ["post_id", "category", "score"]:
            scalar = False
        elif columns == ["post_id", "score"]:
            scalar = True
        else:
            raise ScoreFileError(
                f"unsupported columns {columns!r}; expected post_id,category,score or post_id,score"
            )
        scores: dict[str, dict[str, float]] = {}
        for row in reader:
            line_number = reader.line_num + header_lines
            if not row:
                continue
            if len(row) != len(columns):
                raise ScoreFileError(f"expected {len(columns)} fields, got {len(row)}", line_number)
            if scalar:
                post_id, category, raw = row[0], SCALAR_CATEGORY, row[1]
            else:
                post_id, category, raw = row
            if not post_id:
                raise ScoreFileError("empty post_id", line_number)
            if not category:
                raise ScoreFileError("empty category", line_number)
            try:
                value = float(raw)
            except ValueError:
                raise ScoreFileError(f"score {raw!r} is not a number", line_number) from None
            if not 0.0 <= value <= 1.0:
                raise ScoreFileError(f"score {value!r} outside [0, 1]", line_number)
            per_post = scores.setdefault(post_id, {})
            if category in per_post:
                raise ScoreFileError(f"duplicate score for ({post_id}, {category})", line_number)
            per_post[category] = value

    if scorer is None:
        scorer = meta.get("scorer", "unspecified")
    if excluded is None:
        declared = meta.get("exclude", "")
        excluded = {part.strip() for part in declared.split(",") if part.strip()}
    seen_categories = {cat for per_post in scores.values() for cat in per_post}
    unknown = excluded - seen_categories
    if unknown:
        logger.warning(
            "%s: excluded categories never seen in file: %s", path, ", ".join(sorted(unknown))
        )
    return ScoreTable(scorer=scorer, excluded_categories=set(excluded), scores=scores)


def aggregate_toxicity(scores: dict[str, float], excluded: set[str] | None = None) -> float:
    """Collapse category scores to a single value: max over kept categories."""
    if excluded is None:
        excluded = DEFAULT_EXCLUDED_CATEGORIES
    kept = [value for category, value in scores.items() if category not in excluded]
    if not kept:
        raise ValueError("all categories excluded; toxicity undefined")
    return max(kept)


def label_toxic(value: float, threshold: float = DEFAULT_TOXIC_THRESHOLD) -> bool:
    """Strictly-greater-than labeling; a value equal to the threshold is not toxic."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    return value > threshold


def compute_ta(
    conversation: Conversation,
    table: ScoreTable,
    excluded: set[str] | None = None,
    toxic_threshold: float = DEFAULT_TOXIC_THRESHOLD,
) -> TaRecord:
    """Toxicity attraction of a conversation from its comment scores.

    ta_mean averages comment toxicity, ta_ratio is the share of comments
    strictly above ``toxic_threshold``. Every comment must have scores;
    missing ones raise MissingScoresError naming the ids.
    """
    missing = sorted(cid for cid in conversation.comment_ids if cid not in table)
    if missing:
        raise MissingScoresError(missing)
    values = [table.toxicity(cid, excluded) for cid in conversation.comment_ids]
    n = len(values)
    toxic_count = sum(1 for v in values if label_toxic(v, toxic_threshold))
    return TaRecord(
        submission_id=conversation.submission_id,
        ta_mean=sum(values) / n,
        ta_ratio=toxic_count / n,
        n_comments=n,
        max_comment_toxicity=max(values),
    )


def label_attracting(record: TaRecord, comment_threshold: float = DEFAULT_TOXIC_THRESHOLD) -> bool:
    """True when any comment exceeds the threshold (max strictly greater)."""
    if not 0.0 <= comment_threshold <= 1.0:
        raise ValueError("comment_threshold must be in [0, 1]")
    return record.max_comment_toxicity > comment_threshold


def sweep_threshold(scores, labels, grid=None) -> ThresholdSweep:
    """Precision/recall/F1 over a threshold grid against 0/1 annotations.

    Predictions are score > threshold. Precision is 0 when nothing is
    predicted positive; F1 is 0 when precision and recall are both 0. The
    grid is sorted and deduplicated; best_threshold is the F1 argmax with
    ties resolved toward the lowest threshold.
    """
    if grid is None:
        grid = DEFAULT_SWEEP_GRID
    thresholds = sorted(set(float(t) for t in grid))
    if not thresholds:
        raise ValueError("threshold grid is empty")
    if any(not 0.0 <= t <= 1.0 for t in thresholds):
        raise ValueError("thresholds must lie in [0, 1]")
    scores = list(scores)
    labels = list(labels)
    if len(scores) != len(labels):
        raise ValueError("scores and labels lengths differ")
    if not scores:
        raise ValueError("need at least one annotated post")
    if any(lab not in (0, 1) for lab in labels):
        raise ValueError("labels may only contain 0 and 1")
    n_pos = sum(labels)
    if n_pos == 0:
        raise ValueError("need at least one positive label")

    points = []
    for threshold in thresholds:
        tp = fp = fn = 0
        for score, lab in zip(scores, labels):
            predicted = score > threshold
            if predicted and lab == 1:
                tp += 1
            elif predicted and lab == 0:
                fp += 1
            elif not predicted and lab == 1:
                fn += 1
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn)
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        points.append(SweepPoint(threshold, precision, recall, f1))
    best = max(points, key=lambda p: p.f1)  # max keeps the first (lowest) on ties
    return ThresholdSweep(points=points, best_threshold=best.threshold)


def overlap_report(pairs: list[tuple[bool, bool]]) -> dict[str, float]:
    """Percentages of (toxic, attracting) label combinations; sums to 100."""
    if not pairs:
        raise ValueError("need at least one labeled submission")
    n = len(pairs)
    counts = {"both": 0, "toxic_only": 0, "attracting_only": 0, "neither": 0}
    for toxic, attracting in pairs:
        if toxic and attracting:
            counts["both"] += 1
        elif toxic:
            counts["toxic_only"] += 1
        elif attracting:
            counts["attracting_only"] += 1
        else:
            counts["neither"] += 1
    return {key: 100.0 * value / n for key, value in counts.items()}


def overlap_by_threshold(
    items: list[tuple[bool, TaRecord]],
    thresholds: list[float],
    mode: str = "max_comment",
) -> list[dict[str, float]]:
    """Overlap percentages as the attracting threshold varies.

    Toxic labels in ``items`` stay fixed; the attracting label is recomputed
    per threshold, either from the maximum comment toxicity (default) or
    from ta_mean (``mode="ta_mean"``). Rows are ordered by threshold.
    """
    if mode not in ("max_comment", "ta_mean"):
        raise ValueError(f"unknown mode {mode!r}")
    if not items:
        raise ValueError("need at least one labeled submission")
    rows = []
    for threshold in sorted(set(float(t) for t in thresholds)):
        pairs = []
        for toxic, record in items:
            if mode == "max_comment":
                attracting = label_attracting(record, threshold)
            else:
                attracting = record.ta_mean > threshold
            pairs.append((toxic, attracting))
        report = overlap_report(pairs)
        report["threshold"] = threshold
        rows.append(report)
    return rows
