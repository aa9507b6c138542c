"""Lexicon-and-rules polarity scoring.

Implements the familiar compound-score rule family: token valences from a
bundled lexicon, intensity boosters and dampeners within a three-token
window (decaying with distance), negation flipping within the same window,
all-caps emphasis when the text is mixed-case, exclamation/question-mark
emphasis on the summed score, and x/sqrt(x^2 + 15) normalization. This is a
documented subset: idiom, "least", and but-clause handling are left out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .tokenizer import word_re

BOOST_INCREMENT = 0.293
CAPS_INCREMENT = 0.733
NEGATION_SCALAR = -0.74
NORMALIZATION_ALPHA = 15.0
EXCLAMATION_INCREMENT = 0.292

BOOSTERS = {
    "very": BOOST_INCREMENT,
    "really": BOOST_INCREMENT,
    "extremely": BOOST_INCREMENT,
    "incredibly": BOOST_INCREMENT,
    "absolutely": BOOST_INCREMENT,
    "completely": BOOST_INCREMENT,
    "totally": BOOST_INCREMENT,
    "utterly": BOOST_INCREMENT,
    "so": BOOST_INCREMENT,
    "super": BOOST_INCREMENT,
    "especially": BOOST_INCREMENT,
    "particularly": BOOST_INCREMENT,
    "remarkably": BOOST_INCREMENT,
    "exceptionally": BOOST_INCREMENT,
    "amazingly": BOOST_INCREMENT,
    "deeply": BOOST_INCREMENT,
    "highly": BOOST_INCREMENT,
    "truly": BOOST_INCREMENT,
    "hugely": BOOST_INCREMENT,
    "slightly": -BOOST_INCREMENT,
    "somewhat": -BOOST_INCREMENT,
    "barely": -BOOST_INCREMENT,
    "hardly": -BOOST_INCREMENT,
    "kinda": -BOOST_INCREMENT,
    "sorta": -BOOST_INCREMENT,
    "marginally": -BOOST_INCREMENT,
    "partly": -BOOST_INCREMENT,
    "scarcely": -BOOST_INCREMENT,
    "almost": -BOOST_INCREMENT,
}

NEGATIONS = frozenset(
    """not never no none nobody nothing nowhere neither nor cannot without
    aint isnt arent wasnt werent dont doesnt didnt cant couldnt shouldnt
    wouldnt wont havent hasnt hadnt rarely seldom despite""".split()
)


@dataclass
class PolarityResult:
    compound: float
    positive_mass: float
    negative_mass: float
    neutral_mass: float

    def __post_init__(self):
        if not -1.0 <= self.compound <= 1.0:
            raise ValueError("compound must be in [-1, 1]")
        total = self.positive_mass + self.negative_mass + self.neutral_mass
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"masses must sum to 1, got {total!r}")


@lru_cache(maxsize=None)
def _bundled_valence() -> dict[str, float]:
    text = resources.files("threadtone").joinpath("data/valence.txt").read_text("utf-8")
    return _parse_valence(text)


def _parse_valence(text: str) -> dict[str, float]:
    lexicon: dict[str, float] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        token, _, value = line.partition("\t")
        token = token.strip().lower()
        if not token or token in lexicon:
            raise ValueError(f"bad or duplicate valence entry {raw!r}")
        lexicon[token] = float(value)
    return lexicon


def load_valence(path: str | Path) -> dict[str, float]:
    return _parse_valence(Path(path).read_text("utf-8"))


def _is_negation(token: str) -> bool:
    return token in NEGATIONS or token.endswith("n't")


def _punctuation_emphasis(text: str) -> float:
    emphasis = min(text.count("!"), 4) * EXCLAMATION_INCREMENT
    question_marks = text.count("?")
    if question_marks > 1:
        emphasis += question_marks * 0.18 if question_marks <= 3 else 0.96
    return emphasis


def score_tokens(words: list[str], text: str, valence: dict[str, float] | None = None) -> PolarityResult:
    """Polarity over a pre-split token sequence (``text`` supplies punctuation)."""
    return _score_lowered(words, [w.lower() for w in words], text, valence)


def _score_lowered(
    words: list[str],
    lowered: list[str],
    text: str,
    valence: dict[str, float] | None,
) -> PolarityResult:
    lexicon = valence if valence is not None else _bundled_valence()
    lexicon_get = lexicon.get
    n = len(lowered)

    # Valence-bearing tokens are sparse, so intersect first and only visit
    # their positions. With very few distinct hits, C-level index scans
    # beat enumerating; otherwise one enumerate pass collects positions.
    positions: list[int] = []
    present = lexicon.keys() & set(lowered)
    if len(present) > 3:
        positions = [i for i, token in enumerate(lowered) if token in present]
    elif present:
        find = lowered.index
        for token in present:
            start = 0
            try:
                while True:
                    hit = find(token, start)
                    positions.append(hit)
                    start = hit + 1
            except ValueError:
                pass
        positions.sort()

    total = 0.0
    positive = 0.0
    negative = 0.0
    neutral = n - len(positions)
    if positions:
        if sum(map(str.isupper, words)):
            caps = [w.isupper() and any(c.isalpha() for c in w) for w in words]
            mixed_caps = 0 < sum(caps) < len(words)
        else:
            caps = ()
            mixed_caps = False
        boosters = BOOSTERS
        booster_get = boosters.get
        negations = NEGATIONS
        for i in positions:
            token = lowered[i]
            value = lexicon_get(token, 0.0)
            if value == 0.0 or token in boosters or token in negations or token.endswith("n't"):
                neutral += 1
                continue
            sign = 1.0 if value > 0 else -1.0
            if mixed_caps and caps[i]:
                value += CAPS_INCREMENT * sign
            negated = False
            for distance in (1, 2, 3):
                j = i - distance
                if j < 0:
                    break
                previous = lowered[j]
                boost = booster_get(previous, 0.0)
                if boost and lexicon_get(previous, 0.0) == 0.0:
                    scale = (1.0, 0.95, 0.9)[distance - 1]
                    value += boost * scale * sign
                if not negated and (previous in negations or previous.endswith("n't")):
                    negated = True
            if negated:
                value *= NEGATION_SCALAR
            total += value
            if value > 0:
                positive += value + 1.0
            elif value < 0:
                negative += value - 1.0
            else:
                neutral += 1

    emphasis = _punctuation_emphasis(text)
    if total > 0:
        total += emphasis
    elif total < 0:
        total -= emphasis
    compound = total / math.sqrt(total * total + NORMALIZATION_ALPHA)
    compound = max(-1.0, min(1.0, compound))

    if total > 0:
        positive += emphasis
    elif total < 0:
        negative -= emphasis
    denominator = positive + abs(negative) + neutral
    if denominator == 0.0:
        return PolarityResult(0.0, 0.0, 0.0, 1.0)
    return PolarityResult(
        compound=compound,
        positive_mass=positive / denominator,
        negative_mass=abs(negative) / denominator,
        neutral_mass=neutral / denominator,
    )


def polarity(text: str, valence: dict[str, float] | None = None) -> PolarityResult:
    """Compound polarity and mass split for a text; empty text is neutral."""
    return score_tokens(word_re.findall(text), text, valence)


def polarity_flags(result: PolarityResult, band: float = 0.05) -> tuple[bool, bool]:
    """(positive, negative): compound at or beyond +/-band; never both."""
    if band <= 0:
        raise ValueError("band must be positive")
    return result.compound >= band, result.compound <= -band
