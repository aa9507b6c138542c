"""Sentence splitting and word tokenization.

Sentences end at runs of . ! ? followed by whitespace or end of text, so
decimals like 3.5 do not split. Words are runs of letters and digits with
internal apostrophes or hyphens kept ("don't", "well-known"); surrounding
punctuation is dropped. A segment with no word token is not a sentence.
"""

from __future__ import annotations

import re
from typing import NamedTuple

from .tagger import tag_tokens

boundary_re = re.compile(r"[.!?]+(?=\s|$)")
word_re = re.compile(r"[^\W_]+(?:['’-][^\W_]+)*")

# Splitting on a capturing terminator yields [body, terminator, body,
# terminator, ..., tail] in one C-level pass.
split_on_terminators = re.compile(rf"({boundary_re.pattern})").split


class TaggedToken(NamedTuple):
    surface: str
    tag: str
    sentence_index: int
    position_in_sentence: int


def split_sentences(text: str) -> list[tuple[str, str]]:
    """(body, terminator) pairs; the terminator is "" for a trailing sentence."""
    sentences = []
    search = word_re.search
    parts = iter(split_on_terminators(text))
    for body in parts:
        terminator = next(parts, "")
        if search(body):
            sentences.append((body, terminator))
    return sentences


def sentence_words(body: str) -> list[str]:
    return word_re.findall(body)


def tokenize(text: str) -> list[TaggedToken]:
    """Split ``text`` into tagged word tokens; empty text gives an empty list."""
    sentences = split_sentences(text)
    word_lists = [sentence_words(body) for body, _ in sentences]
    tag_lists = tag_tokens(word_lists)
    tokens = []
    for sentence_index, (words, tags) in enumerate(zip(word_lists, tag_lists)):
        for position, (word, tag) in enumerate(zip(words, tags)):
            tokens.append(TaggedToken(word, tag, sentence_index, position))
    return tokens
