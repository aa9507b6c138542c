"""Linguistic feature extraction for conversation texts."""

from .extract import (
    FEATURE_FIELDS,
    FeatureVector,
    elaboration,
    extract_all,
    lexicon_ratio,
    mtld,
    proper_noun_ratio,
    question_ratio,
)
from .lexicons import Lexicon, gratitude_lexicon, hedge_lexicon, load_lexicon
from .polarity import PolarityResult, load_valence, polarity, polarity_flags
from .tagger import PENN_TAGS, tag_tokens
from .tokenizer import TaggedToken, split_sentences, tokenize

__all__ = [
    "FEATURE_FIELDS",
    "FeatureVector",
    "Lexicon",
    "PENN_TAGS",
    "PolarityResult",
    "TaggedToken",
    "elaboration",
    "extract_all",
    "gratitude_lexicon",
    "hedge_lexicon",
    "lexicon_ratio",
    "load_lexicon",
    "load_valence",
    "mtld",
    "polarity",
    "polarity_flags",
    "proper_noun_ratio",
    "question_ratio",
    "split_sentences",
    "tag_tokens",
    "tokenize",
]
