"""Run configuration: a JSON file of paths, thresholds, and knobs.

Relative paths in the file resolve against the file's own directory, so a
config can travel with its data. The configuration hash identifies a run
directory; it covers every field except the output directory, which only
says where results land, not what they are.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .scoring import DEFAULT_SWEEP_GRID

DEFAULT_POLITICAL_SUBREDDITS = ("Conservative", "Liberal", "politics")
ATTRACTING_MODES = ("max_comment", "ta_mean")

_PATH_FIELDS = ("toxicity_scores", "c_scores", "output_dir")
_OPTIONAL_PATH_FIELDS = (
    "annotations",
    "topic_labels",
    "hedge_lexicon",
    "gratitude_lexicon",
    "valence_lexicon",
)


class ConfigError(ValueError):
    """A config file that cannot be loaded or validated."""


@dataclass
class RunConfig:
    """Everything a pipeline run depends on besides the input bytes."""

    dumps: list[Path]
    toxicity_scores: Path
    c_scores: Path
    output_dir: Path
    annotations: Path | None = None
    topic_labels: Path | None = None
    hedge_lexicon: Path | None = None
    gratitude_lexicon: Path | None = None
    valence_lexicon: Path | None = None
    seed: int = 7
    subreddits: list[str] | None = None
    political_subreddits: list[str] = field(
        default_factory=lambda: list(DEFAULT_POLITICAL_SUBREDDITS)
    )
    excluded_categories: list[str] | None = None
    min_comments: int = 5
    max_comments: int = 10
    template_min_count: int = 20
    toxic_threshold: float = 0.5
    attracting_threshold: float = 0.5
    attracting_mode: str = "max_comment"
    polarity_band: float = 0.05
    split_fractions: list[float] = field(default_factory=lambda: [0.7, 0.15, 0.15])
    controversial_split: str | float = "median"
    sweep_grid: list[float] = field(default_factory=lambda: list(DEFAULT_SWEEP_GRID))

    def __post_init__(self):
        if not self.dumps:
            raise ConfigError("dumps must list at least one file")
        self.dumps = [Path(p) for p in self.dumps]
        for name in _PATH_FIELDS:
            setattr(self, name, Path(getattr(self, name)))
        for name in _OPTIONAL_PATH_FIELDS:
            value = getattr(self, name)
            if value is not None:
                setattr(self, name, Path(value))
        for name in ("toxic_threshold", "attracting_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value!r}")
        if not 0.0 < self.polarity_band <= 1.0:
            raise ConfigError("polarity_band must be in (0, 1]")
        if self.attracting_mode not in ATTRACTING_MODES:
            raise ConfigError(
                f"attracting_mode must be one of {ATTRACTING_MODES}, got {self.attracting_mode!r}"
            )
        if not (1 <= self.min_comments <= self.max_comments):
            raise ConfigError("need 1 <= min_comments <= max_comments")
        if self.template_min_count < 0:
            raise ConfigError("template_min_count must be non-negative")
        if any(f < 0 for f in self.split_fractions) or abs(sum(self.split_fractions) - 1.0) > 1e-9:
            raise ConfigError("split_fractions must be non-negative and sum to 1")
        if self.controversial_split != "median":
            try:
                cut = float(self.controversial_split)
            except (TypeError, ValueError):
                raise ConfigError(
                    "controversial_split must be 'median' or a number in [0, 1]"
                ) from None
            if not 0.0 <= cut <= 1.0:
                raise ConfigError("controversial_split threshold must be in [0, 1]")
            self.controversial_split = cut
        if not self.sweep_grid or any(not 0.0 <= t <= 1.0 for t in self.sweep_grid):
            raise ConfigError("sweep_grid must be non-empty with values in [0, 1]")
        if not self.political_subreddits:
            raise ConfigError("political_subreddits must not be empty")

    def input_paths(self) -> list[Path]:
        """Every input file the config names, in a stable order."""
        paths = list(self.dumps) + [self.toxicity_scores, self.c_scores]
        for name in _OPTIONAL_PATH_FIELDS:
            value = getattr(self, name)
            if value is not None:
                paths.append(value)
        return paths

    def validate_inputs(self) -> None:
        missing = [str(p) for p in self.input_paths() if not p.is_file()]
        if missing:
            raise ConfigError("input files not found: " + ", ".join(missing))

    def to_dict(self) -> dict:
        out = {}
        for spec in fields(self):
            value = getattr(self, spec.name)
            if isinstance(value, Path):
                value = str(value)
            elif isinstance(value, list) and value and isinstance(value[0], Path):
                value = [str(p) for p in value]
            out[spec.name] = value
        return out


def load_config(path: str | Path, overrides: dict | None = None) -> RunConfig:
    """Load a JSON config; relative paths resolve against the file's directory.

    ``overrides`` replace file values before validation (CLI flags). Unknown
    keys are rejected so typos cannot silently fall back to defaults.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must contain a JSON object")
    known = {spec.name for spec in fields(RunConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {', '.join(unknown)}")
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})

    base = path.resolve().parent

    def resolve(value):
        p = Path(value)
        return p if p.is_absolute() else base / p

    if "dumps" in raw:
        if not isinstance(raw["dumps"], list):
            raise ConfigError("dumps must be a list of paths")
        raw["dumps"] = [resolve(p) for p in raw["dumps"]]
    for name in _PATH_FIELDS + _OPTIONAL_PATH_FIELDS:
        if raw.get(name) is not None:
            raw[name] = resolve(raw[name])
    missing = [name for name in ("dumps", "toxicity_scores", "c_scores", "output_dir") if name not in raw]
    if missing:
        raise ConfigError(f"{path}: missing required keys: {', '.join(missing)}")
    try:
        return RunConfig(**raw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def config_hash(config: RunConfig) -> str:
    """12 hex chars identifying the run; the output directory is excluded."""
    payload = config.to_dict()
    del payload["output_dir"]
    canonical = json.dumps(payload, sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]
