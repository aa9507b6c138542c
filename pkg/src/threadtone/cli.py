"""Command-line pipeline: ingest, features, ta, analyze, sweep.

Each command reads the JSON config, writes into a run directory named by
the config hash (so a changed config can never silently overwrite an older
run), and is deterministic: the same config and inputs always produce the
same bytes. The output directory comes from the config file unless the
THREADTONE_OUT environment variable or the --out flag overrides it.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from pathlib import Path

from .analysis import (
    FIGURES,
    AnalysisReport,
    PostRecord,
    Table,
    baseline_regression,
    build_figure_tables,
    correlation_table,
    decile_sample,
    full_regression,
    group_median_test,
    sweep_table,
    write_table,
)
from .config import ConfigError, RunConfig, config_hash, load_config
from .corpus import (
    CorpusStats,
    assemble_conversations,
    build_moderator_templates,
    detect_removed,
    parse_dump,
    preprocess_post,
    read_conversations,
    write_conversations,
)
from .features import FEATURE_FIELDS, FeatureVector, extract_all, load_lexicon, load_valence
from .scoring import (
    DEFAULT_EXCLUDED_CATEGORIES,
    MissingScoresError,
    ScoreTable,
    TaRecord,
    compute_ta,
    label_attracting,
    label_toxic,
    load_scores,
    sweep_threshold,
)

OUTPUT_ENV_VAR = "THREADTONE_OUT"

CONVERSATIONS_FILE = "conversations.jsonl"
STATS_FILE = "corpus_stats.json"
FEATURES_FILE = "features.csv"
TA_FILE = "ta.csv"
MANIFEST_FILE = "manifest.json"
REPORTS_DIR = "reports"

TA_COLUMNS = [
    "post_id",
    "subreddit",
    "n_comments",
    "ta_mean",
    "ta_ratio",
    "max_comment_toxicity",
    "toxicity",
    "toxic",
    "attracting",
]


class CliError(ValueError):
    """A pipeline-level problem with an actionable message."""


def run_directory(config: RunConfig) -> Path:
    return config.output_dir / f"run-{config_hash(config)}"


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def write_manifest(run_dir: Path, config: RunConfig) -> None:
    """Record what went in: config (minus output dir) and input checksums."""
    described = config.to_dict()
    del described["output_dir"]
    _write_json(
        run_dir / MANIFEST_FILE,
        {
            "config_hash": config_hash(config),
            "config": described,
            "inputs": {str(p): _sha256_file(p) for p in config.input_paths()},
        },
    )


def _require_stage(run_dir: Path, filename: str, producer: str) -> Path:
    path = run_dir / filename
    if not path.is_file():
        raise CliError(
            f"{filename} not found under {run_dir}; run `threadtone {producer}` with this config first"
        )
    return path


def _normalize_subreddit(name: str) -> str:
    name = name.strip()
    if name.lower().startswith("r/"):
        name = name[2:]
    return name.casefold()


def _parse_bool(raw: str) -> bool:
    if raw == "true":
        return True
    if raw == "false":
        return False
    raise CliError(f"expected 'true' or 'false', got {raw!r}")


def _read_csv_table(path: Path, expected_columns: list[str]) -> list[list[str]]:
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != expected_columns:
            raise CliError(f"{path} has columns {header!r}; expected {expected_columns!r}")
        return [row for row in reader if row]


# ---------------------------------------------------------------- commands


def cmd_ingest(config: RunConfig, args: argparse.Namespace) -> None:
    posts = []
    seen: set[str] = set()
    for dump in config.dumps:
        for post in parse_dump(dump, kind="auto", on_error=args.on_error):
            if post.id in seen:
                raise CliError(f"duplicate post id {post.id!r} across dump files")
            seen.add(post.id)
            posts.append(post)
    if config.subreddits is not None:
        allowed = {_normalize_subreddit(s) for s in config.subreddits}
        posts = [p for p in posts if _normalize_subreddit(p.subreddit) in allowed]

    stats = CorpusStats()
    for post in posts:
        if post.kind == "submission":
            stats.submissions[post.subreddit] += 1
        else:
            stats.comments[post.subreddit] += 1

    templates = build_moderator_templates(posts, min_count=config.template_min_count)
    kept = []
    for post in posts:
        if detect_removed(post, templates.get(post.subreddit)):
            stats.removed[post.subreddit] += 1
        else:
            kept.append(preprocess_post(post))

    conversations = assemble_conversations(
        kept,
        seed=config.seed,
        min_comments=config.min_comments,
        max_comments=config.max_comments,
        stats=stats,
    )
    run_dir = run_directory(config)
    write_conversations(run_dir / CONVERSATIONS_FILE, conversations)
    _write_json(run_dir / STATS_FILE, stats.to_dict())
    print(
        f"ingested {stats.n_submissions} submissions and {stats.n_comments} comments "
        f"({stats.n_removed} removed) into {len(conversations)} conversations"
    )


def _load_feature_inputs(config: RunConfig):
    hedges = load_lexicon(config.hedge_lexicon, "hedges") if config.hedge_lexicon else None
    gratitude = (
        load_lexicon(config.gratitude_lexicon, "gratitude") if config.gratitude_lexicon else None
    )
    valence = load_valence(config.valence_lexicon) if config.valence_lexicon else None
    return hedges, gratitude, valence


def cmd_features(config: RunConfig, args: argparse.Namespace) -> None:
    run_dir = run_directory(config)
    conversations = read_conversations(_require_stage(run_dir, CONVERSATIONS_FILE, "ingest"))
    hedges, gratitude, valence = _load_feature_inputs(config)
    rows = []
    for conv in conversations:
        vector = extract_all(conv.text, hedges, gratitude, valence, band=config.polarity_band)
        rows.append([conv.submission_id] + [getattr(vector, name) for name in FEATURE_FIELDS])
    write_table(Table(columns=["post_id", *FEATURE_FIELDS], rows=rows), run_dir / FEATURES_FILE)
    print(f"extracted features for {len(rows)} submissions")


def _load_toxicity_table(config: RunConfig) -> ScoreTable:
    if config.excluded_categories is not None:
        return load_scores(config.toxicity_scores, excluded=set(config.excluded_categories))
    table = load_scores(config.toxicity_scores)
    if not table.excluded_categories:
        table.excluded_categories = set(DEFAULT_EXCLUDED_CATEGORIES)
    return table


def _attracting_label(record: TaRecord, config: RunConfig) -> bool:
    if config.attracting_mode == "max_comment":
        return label_attracting(record, config.attracting_threshold)
    return record.ta_mean > config.attracting_threshold


def cmd_ta(config: RunConfig, args: argparse.Namespace) -> None:
    run_dir = run_directory(config)
    conversations = read_conversations(_require_stage(run_dir, CONVERSATIONS_FILE, "ingest"))
    table = _load_toxicity_table(config)
    missing = sorted(c.submission_id for c in conversations if c.submission_id not in table)
    if missing:
        raise MissingScoresError(missing)
    rows = []
    for conv in conversations:
        record = compute_ta(conv, table, toxic_threshold=config.toxic_threshold)
        toxicity = table.toxicity(conv.submission_id)
        rows.append(
            [
                conv.submission_id,
                conv.subreddit,
                record.n_comments,
                record.ta_mean,
                record.ta_ratio,
                record.max_comment_toxicity,
                toxicity,
                label_toxic(toxicity, config.toxic_threshold),
                _attracting_label(record, config),
            ]
        )
    write_table(Table(columns=TA_COLUMNS, rows=rows), run_dir / TA_FILE)
    print(f"scored {len(rows)} conversations with scorer {table.scorer!r}")


def _read_feature_vectors(path: Path) -> dict[str, FeatureVector]:
    vectors = {}
    for row in _read_csv_table(path, ["post_id", *FEATURE_FIELDS]):
        post_id = row[0]
        values = dict(zip(FEATURE_FIELDS, row[1:]))
        vectors[post_id] = FeatureVector(
            question_ratio=float(values["question_ratio"]),
            lexical_item_count=int(values["lexical_item_count"]),
            token_count=int(values["token_count"]),
            mtld=float(values["mtld"]),
            hedge_ratio=float(values["hedge_ratio"]),
            gratitude_ratio=float(values["gratitude_ratio"]),
            proper_noun_ratio=float(values["proper_noun_ratio"]),
            polarity_compound=float(values["polarity_compound"]),
            positive_polarity=_parse_bool(values["positive_polarity"]),
            negative_polarity=_parse_bool(values["negative_polarity"]),
        )
    return vectors


def _read_ta_rows(path: Path) -> list[dict]:
    rows = []
    for row in _read_csv_table(path, TA_COLUMNS):
        named = dict(zip(TA_COLUMNS, row))
        rows.append(
            {
                "post_id": named["post_id"],
                "subreddit": named["subreddit"],
                "record": TaRecord(
                    submission_id=named["post_id"],
                    ta_mean=float(named["ta_mean"]),
                    ta_ratio=float(named["ta_ratio"]),
                    n_comments=int(named["n_comments"]),
                    max_comment_toxicity=float(named["max_comment_toxicity"]),
                ),
                "toxicity": float(named["toxicity"]),
                "toxic": _parse_bool(named["toxic"]),
                "attracting": _parse_bool(named["attracting"]),
            }
        )
    return rows


def _scalar_scores(table: ScoreTable, what: str) -> dict[str, float]:
    values = {}
    for post_id, per_category in table.scores.items():
        if len(per_category) != 1:
            raise CliError(f"{what} file must be scalar (one score per post); {post_id} has several")
        values[post_id] = next(iter(per_category.values()))
    return values


def _read_label_file(path: Path, column: str) -> dict[str, str]:
    labels = {}
    for row in _read_csv_table(path, ["post_id", column]):
        if row[0] in labels:
            raise CliError(f"{path}: duplicate post_id {row[0]!r}")
        labels[row[0]] = row[1]
    return labels


def _build_records(config: RunConfig, run_dir: Path) -> tuple[list[PostRecord], list[bool], list[bool]]:
    vectors = _read_feature_vectors(_require_stage(run_dir, FEATURES_FILE, "features"))
    ta_rows = _read_ta_rows(_require_stage(run_dir, TA_FILE, "ta"))
    c_scores = _scalar_scores(load_scores(config.c_scores), "c_scores")
    topic_labels = (
        _read_label_file(config.topic_labels, "label") if config.topic_labels else {}
    )
    political = {_normalize_subreddit(s) for s in config.political_subreddits}

    missing_c = sorted(r["post_id"] for r in ta_rows if r["post_id"] not in c_scores)
    if missing_c:
        raise MissingScoresError(missing_c)
    records = []
    toxic = []
    attracting = []
    for row in ta_rows:
        post_id = row["post_id"]
        vector = vectors.get(post_id)
        if vector is None:
            raise CliError(
                f"{post_id} present in {TA_FILE} but not {FEATURES_FILE}; rerun `threadtone features`"
            )
        records.append(
            PostRecord(
                post_id=post_id,
                subreddit=row["subreddit"],
                is_political=_normalize_subreddit(row["subreddit"]) in political,
                c_score=c_scores[post_id],
                ta=row["record"],
                features=vector,
                toxicity=row["toxicity"],
                topic_label=topic_labels.get(post_id),
            )
        )
        toxic.append(row["toxic"])
        attracting.append(row["attracting"])
    return records, toxic, attracting


def _medians_table(records: list[PostRecord]) -> Table:
    rows = []
    for value in ("c_score", "ta_mean"):
        result = group_median_test(records, value)
        rows.append(
            [
                value,
                result.median_group,
                result.median_rest,
                result.test.statistic,
                result.test.p_value,
                result.test.method,
            ]
        )
    return Table(
        columns=["value", "political_median", "other_median", "statistic", "p_value", "method"],
        rows=rows,
    )


def _baseline_table(records: list[PostRecord]) -> Table:
    result = baseline_regression(records)
    regression = result.regression
    rows = [
        ["intercept", regression.coefficients[0]],
        ["slope", regression.coefficients[1]],
        ["intercept_se", regression.std_errors[0]],
        ["slope_se", regression.std_errors[1]],
        ["rmse", regression.rmse],
        ["r_squared", regression.r_squared],
        ["pred_truth_spearman", result.pred_truth_spearman.statistic],
        ["pred_truth_p_value", result.pred_truth_spearman.p_value],
        ["n", regression.n],
    ]
    return Table(columns=["metric", "value"], rows=rows)


def _regression_tables(records: list[PostRecord]) -> tuple[Table, Table]:
    result = full_regression(records)
    terms = Table(
        columns=["term", "coefficient", "std_error", "vif"],
        rows=[
            list(row)
            for row in zip(result.names, result.coefficients, result.std_errors, result.vif)
        ],
    )
    summary = Table(
        columns=["metric", "value"],
        rows=[["rmse", result.rmse], ["r_squared", result.r_squared], ["n", result.n]],
    )
    return terms, summary


def _annotation_sample_table(records: list[PostRecord], args: argparse.Namespace, seed: int) -> Table:
    sample = decile_sample(records, args.score_field, args.per_decile, seed)
    return Table(
        columns=["post_id", "subreddit", "ta_mean", "c_score"],
        rows=[[r.post_id, r.subreddit, r.ta.ta_mean, r.c_score] for r in sample],
    )


def _build_sweep(config: RunConfig, ta_rows: list[dict]):
    labels = _read_annotation_labels(config.annotations)
    by_id = {row["post_id"]: row for row in ta_rows}
    missing = sorted(post_id for post_id in labels if post_id not in by_id)
    if missing:
        raise CliError(
            "annotated posts missing from ta.csv: " + ", ".join(missing[:20])
        )
    scores = []
    observed = []
    for post_id in sorted(labels):
        row = by_id[post_id]
        record = row["record"]
        if config.attracting_mode == "max_comment":
            scores.append(record.max_comment_toxicity)
        else:
            scores.append(record.ta_mean)
        observed.append(labels[post_id])
    return sweep_threshold(scores, observed, config.sweep_grid)


def _read_annotation_labels(path: Path) -> dict[str, int]:
    labels = {}
    for post_id, raw in _read_label_file(path, "label").items():
        if raw not in ("0", "1"):
            raise CliError(f"{path}: label for {post_id} must be 0 or 1, got {raw!r}")
        labels[post_id] = int(raw)
    return labels


def cmd_analyze(config: RunConfig, args: argparse.Namespace) -> None:
    run_dir = run_directory(config)
    records, toxic, attracting = _build_records(config, run_dir)

    report = AnalysisReport()
    report.provenance = {
        "config_hash": config_hash(config),
        "seed": config.seed,
        "toxicity_scorer": _load_toxicity_table(config).scorer,
        "c_scorer": load_scores(config.c_scores).scorer,
    }

    wanted = args.which
    sweep = None
    if config.annotations is not None:
        sweep = _build_sweep(config, _read_ta_rows(run_dir / TA_FILE))
    elif wanted == "sweep":
        raise CliError(
            "the sweep figure needs annotations; set `annotations` in the config"
        )

    if wanted in ("all", "correlations"):
        report.tables["correlations"] = correlation_table(records, config.controversial_split)
    if wanted in ("all", "medians"):
        report.tables["medians"] = _medians_table(records)
    if wanted in ("all", "baseline"):
        report.tables["baseline"] = _baseline_table(records)
    if wanted in ("all", "regression"):
        terms, summary = _regression_tables(records)
        report.tables["regression"] = terms
        report.tables["regression_summary"] = summary
    if wanted in ("all", "annotation_sample"):
        report.tables["annotation_sample"] = _annotation_sample_table(records, args, config.seed)
    if wanted == "all" or wanted in FIGURES:
        report.tables.update(build_figure_tables(records, toxic, attracting, sweep))

    reports_dir = run_dir / REPORTS_DIR
    reports_dir.mkdir(parents=True, exist_ok=True)
    if wanted in FIGURES:
        emitted = {wanted}
    elif wanted == "all":
        emitted = set(report.tables)
    else:
        emitted = {name for name in report.tables if name.startswith(wanted)}
    for name in sorted(emitted):
        write_table(report.tables[name], reports_dir / f"{name}.csv")
    _write_json(reports_dir / "provenance.json", report.provenance)
    print(f"wrote {len(emitted)} report file(s) to {reports_dir}")


def cmd_sweep(config: RunConfig, args: argparse.Namespace) -> None:
    run_dir = run_directory(config)
    if args.annotations is not None:
        config.annotations = Path(args.annotations)
    if config.annotations is None:
        raise CliError("no annotations file; pass --annotations or set `annotations` in the config")
    if not config.annotations.is_file():
        raise CliError(f"annotations file not found: {config.annotations}")
    ta_rows = _read_ta_rows(_require_stage(run_dir, TA_FILE, "ta"))
    sweep = _build_sweep(config, ta_rows)
    reports_dir = run_dir / REPORTS_DIR
    reports_dir.mkdir(parents=True, exist_ok=True)
    write_table(sweep_table(sweep), reports_dir / "sweep.csv")
    best = max(sweep.points, key=lambda p: p.f1)
    print(f"best threshold {sweep.best_threshold} (F1 {best.f1:.3f})")


# ---------------------------------------------------------------- plumbing


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="path to the JSON run config")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument(
        "--out",
        help=f"override the output directory (also via ${OUTPUT_ENV_VAR})",
    )
    parser.add_argument(
        "--toxic-threshold", type=float, dest="toxic_threshold",
        help="override the comment toxicity threshold",
    )
    parser.add_argument(
        "--attracting-threshold", type=float, dest="attracting_threshold",
        help="override the attracting-label threshold",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="threadtone",
        description="Measure toxicity attraction and controversiality in threaded conversations.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    ingest = subparsers.add_parser("ingest", help="parse dumps into cleaned conversations")
    _add_common_flags(ingest)
    ingest.add_argument(
        "--on-error", choices=("abort", "skip"), default="abort",
        help="what to do with malformed dump lines",
    )
    ingest.set_defaults(func=cmd_ingest)

    features = subparsers.add_parser("features", help="extract linguistic features per submission")
    _add_common_flags(features)
    features.set_defaults(func=cmd_features)

    ta = subparsers.add_parser("ta", help="compute toxicity-attraction records")
    _add_common_flags(ta)
    ta.set_defaults(func=cmd_ta)

    analyze = subparsers.add_parser("analyze", help="build report and figure tables")
    _add_common_flags(analyze)
    analyze.add_argument(
        "--which", default="all",
        choices=("all", "correlations", "medians", "baseline", "regression", "annotation_sample")
        + FIGURES,
        help="which report to emit",
    )
    analyze.add_argument(
        "--per-decile", type=int, default=10, dest="per_decile",
        help="annotation sample size per decile",
    )
    analyze.add_argument(
        "--score-field", default="ta_mean", dest="score_field",
        help="score used to form annotation deciles",
    )
    analyze.set_defaults(func=cmd_analyze)

    sweep = subparsers.add_parser("sweep", help="threshold sweep against human annotations")
    _add_common_flags(sweep)
    sweep.add_argument("--annotations", help="annotations CSV (post_id,label)")
    sweep.set_defaults(func=cmd_sweep)
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    overrides: dict = {}
    for name in ("seed", "toxic_threshold", "attracting_threshold"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    out = getattr(args, "out", None) or os.environ.get(OUTPUT_ENV_VAR)
    if out:
        overrides["output_dir"] = Path(out).resolve()
    return load_config(args.config, overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _resolve_config(args)
        config.validate_inputs()
        run_dir = run_directory(config)
        run_dir.mkdir(parents=True, exist_ok=True)
        write_manifest(run_dir, config)
        args.func(config, args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
