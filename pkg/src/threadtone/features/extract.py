"""The seven linguistic features and their composition.

question_ratio, elaboration (unique lexical items, token count, MTLD),
hedge/gratitude lexicon ratios, proper-noun ratio, and polarity with its
binary flags. ``extract_all`` computes everything in one pass over a text.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain, compress
from typing import Iterable

from .lexicons import Lexicon, gratitude_lexicon, hedge_lexicon
from .polarity import _score_lowered, polarity_flags
from .tagger import PENN_TAGS, PROPER_TAGS, tag_tokens
from .tokenizer import TaggedToken, split_on_terminators, split_sentences, word_re

MTLD_TTR_THRESHOLD = 0.72

FEATURE_FIELDS = (
    "question_ratio",
    "lexical_item_count",
    "token_count",
    "mtld",
    "hedge_ratio",
    "gratitude_ratio",
    "proper_noun_ratio",
    "polarity_compound",
    "positive_polarity",
    "negative_polarity",
)


@dataclass
class FeatureVector:
    question_ratio: float
    lexical_item_count: int
    token_count: int
    mtld: float
    hedge_ratio: float
    gratitude_ratio: float
    proper_noun_ratio: float
    polarity_compound: float
    positive_polarity: bool
    negative_polarity: bool

    def __post_init__(self):
        for name in ("question_ratio", "hedge_ratio", "gratitude_ratio", "proper_noun_ratio"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value!r}")
        if not -1.0 <= self.polarity_compound <= 1.0:
            raise ValueError("polarity_compound must be in [-1, 1]")
        if self.lexical_item_count > self.token_count:
            raise ValueError("lexical_item_count cannot exceed token_count")
        if self.mtld < 0:
            raise ValueError("mtld must be non-negative")
        if self.positive_polarity and self.negative_polarity:
            raise ValueError("polarity flags cannot both be set")

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in FEATURE_FIELDS}


# Nouns, verbs, adjectives, and adverbs; enumerated from the Penn inventory
# so membership is a single set probe.
LEXICAL_TAGS = frozenset(
    tag
    for tag in PENN_TAGS
    if tag.startswith(("NN", "VB", "JJ")) or tag in ("RB", "RBR", "RBS")
)


def _is_lexical(tag: str) -> bool:
    return tag in LEXICAL_TAGS


def _lower_surfaces(tokens) -> list[str]:
    return [
        (token.surface if isinstance(token, TaggedToken) else token).lower()
        for token in tokens
    ]


def question_ratio(text: str) -> float:
    """Share of sentences whose terminator contains a question mark."""
    sentences = split_sentences(text)
    if not sentences:
        return 0.0
    questions = sum(1 for _, terminator in sentences if "?" in terminator)
    return questions / len(sentences)


def _factor_count(sequence: Iterable[str], threshold: float) -> float:
    factors = 0.0
    types: set[str] = set()
    add = types.add
    length = 0
    # The ratio can only drop to a threshold under one on a repeated token:
    # when the previous step stayed above such a threshold, adding a new
    # distinct token keeps it above as well. A threshold of one or more
    # also trips on distinct tokens, so those still need the check.
    check_new = threshold >= 1.0
    for token in sequence:
        length += 1
        if token in types:
            if len(types) / length <= threshold:
                factors += 1.0
                types.clear()
                length = 0
        else:
            add(token)
            if check_new and len(types) / length <= threshold:
                factors += 1.0
                types.clear()
                length = 0
    if length:
        remainder_ttr = len(types) / length
        factors += (1.0 - remainder_ttr) / (1.0 - threshold)
    return factors


def mtld(tokens_lower: list[str], threshold: float = MTLD_TTR_THRESHOLD) -> float:
    """Bidirectional mean factor length at the given type-token threshold.

    A direction that completes no factor at all (every prefix stays above
    the threshold, as with fully unique tokens) falls back to the token
    count instead of dividing by zero.
    """
    n = len(tokens_lower)
    if n == 0:
        return 0.0
    lengths = []
    for sequence in (tokens_lower, tokens_lower[::-1]):
        factors = _factor_count(sequence, threshold)
        lengths.append(n / factors if factors > 0 else float(n))
    return (lengths[0] + lengths[1]) / 2.0


def elaboration(tokens: list[TaggedToken]) -> tuple[int, int, float]:
    """(unique lexical items, token count, MTLD) for tagged tokens.

    Lexical items are unique lowercased surfaces tagged as noun, verb,
    adjective, or adverb.
    """
    lowered = [token.surface.lower() for token in tokens]
    lexical = {low for low, token in zip(lowered, tokens) if _is_lexical(token.tag)}
    return len(lexical), len(tokens), mtld(lowered)


def lexicon_ratio(tokens, lexicon: Lexicon) -> float:
    """Non-overlapping longest-match phrase occurrences over token count."""
    lowered = _lower_surfaces(tokens)
    if not lowered:
        return 0.0
    return lexicon.match_count(lowered) / len(lowered)


def proper_noun_ratio(tokens: list[TaggedToken]) -> float:
    if not tokens:
        return 0.0
    proper = sum(1 for token in tokens if token.tag in PROPER_TAGS)
    return proper / len(tokens)


def extract_all(
    text: str,
    hedges: Lexicon | None = None,
    gratitude: Lexicon | None = None,
    valence: dict[str, float] | None = None,
    band: float = 0.05,
) -> FeatureVector:
    """All feature fields for one text, sharing a single tokenization pass."""
    # A segment with no word token is not a sentence, so its terminator
    # does not count toward the question share.
    find_words = word_re.findall
    word_lists: list[list[str]] = []
    terminators: list[str] = []
    parts = iter(split_on_terminators(text))
    for body in parts:
        terminator = next(parts, "")
        words = find_words(body)
        if words:
            word_lists.append(words)
            terminators.append(terminator)
    tag_lists = tag_tokens(word_lists)

    surfaces = list(chain.from_iterable(word_lists))
    tags = list(chain.from_iterable(tag_lists))
    lowered = list(map(str.lower, surfaces))
    token_count = len(surfaces)

    if terminators:
        q_ratio = sum("?" in terminator for terminator in terminators) / len(terminators)
    else:
        q_ratio = 0.0

    lexical = set(compress(lowered, map(LEXICAL_TAGS.__contains__, tags)))
    proper = tags.count("NNP") + tags.count("NNPS")

    if token_count:
        hedge_r = (hedges or hedge_lexicon()).match_count(lowered) / token_count
        gratitude_r = (gratitude or gratitude_lexicon()).match_count(lowered) / token_count
        proper_r = proper / token_count
    else:
        hedge_r = gratitude_r = proper_r = 0.0

    polarity_result = _score_lowered(surfaces, lowered, text, valence)
    positive, negative = polarity_flags(polarity_result, band)

    return FeatureVector(
        question_ratio=q_ratio,
        lexical_item_count=len(lexical),
        token_count=token_count,
        mtld=mtld(lowered),
        hedge_ratio=hedge_r,
        gratitude_ratio=gratitude_r,
        proper_noun_ratio=proper_r,
        polarity_compound=polarity_result.compound,
        positive_polarity=positive,
        negative_polarity=negative,
    )
