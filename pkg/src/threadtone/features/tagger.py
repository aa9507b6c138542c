"""Deterministic part-of-speech tagging.

A bundled word-form lexicon resolves most tokens; unknown words fall through
to a capitalization heuristic (capitalized and not sentence-initial means
proper noun) and then to suffix rules. A second pass retags sentence-initial
capitalized words that were tagged proper-noun elsewhere in the same text,
so leading names are not missed. No trained model, no external downloads;
the same input always yields the same tags.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

PENN_TAGS = frozenset(
    """CC CD DT EX FW IN JJ JJR JJS LS MD NN NNS NNP NNPS PDT POS PRP PRP$
    RB RBR RBS RP SYM TO UH VB VBD VBG VBN VBP VBZ WDT WP WP$ WRB""".split()
)

PROPER_TAGS = ("NNP", "NNPS")

number_re = re.compile(r"^\d+$")

_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ship", "hood", "ism", "ance", "ence", "ity")
_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "less", "ish")
_VERB_SUFFIXES = ("ize", "ise", "ify")


@lru_cache(maxsize=None)
def tag_lexicon() -> dict[str, str]:
    """Word-form to tag map from the bundled data file."""
    text = resources.files("threadtone").joinpath("data/tags_en.txt").read_text("utf-8")
    lexicon: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        word, _, tag = line.partition("\t")
        word, tag = word.strip(), tag.strip()
        if tag not in PENN_TAGS:
            raise ValueError(f"bad tag {tag!r} for {word!r} in tag lexicon")
        lexicon[word] = tag
    return lexicon


def _suffix_tag(lower: str) -> str | None:
    if len(lower) < 4:
        return None
    if lower.endswith("ly"):
        return "RB"
    if lower.endswith("ing") and len(lower) > 4:
        return "VBG"
    if lower.endswith("ed"):
        return "VBD"
    if lower.endswith(_NOUN_SUFFIXES):
        return "NN"
    if lower.endswith(_ADJ_SUFFIXES):
        return "JJ"
    if lower.endswith(_VERB_SUFFIXES) and len(lower) > 4:
        return "VB"
    if lower.endswith("s") and not lower.endswith("ss"):
        return "NNS"
    return None


def _tag_word(word: str, position: int, lexicon: dict[str, str]) -> str:
    if word[:1].isdigit() and number_re.match(word):
        return "CD"
    lower = word.lower()
    tag = lexicon.get(lower)
    if tag is not None:
        return tag
    if position > 0 and word[:1].isupper():
        return "NNP"
    return _suffix_tag(lower) or "NN"


# A surface always gets the same tag at a given position class, so the
# lookup ladder runs once per distinct surface for the whole process. The
# caches stop growing at the cap instead of evicting; hits stay plain
# dict lookups.
_CACHE_CAP = 65536
_initial_tags: dict[str, str] = {}
_later_tags: dict[str, str] = {}


def tag_tokens(sentences: list[list[str]]) -> list[list[str]]:
    """Tag per-sentence word lists; shape of the output mirrors the input."""
    initial_get = _initial_tags.get
    later_get = _later_tags.get
    tagged: list[list[str]] = []
    proper_surfaces: set[str] = set()
    add_proper = proper_surfaces.add
    for words in sentences:
        if not words:
            tagged.append([])
            continue
        row = list(map(later_get, words))
        row[0] = initial_get(words[0])
        if None in row:
            lexicon = tag_lexicon()
            for i, tag in enumerate(row):
                if tag is None:
                    word = words[i]
                    if i:
                        tag = _tag_word(word, 1, lexicon)
                        if len(_later_tags) < _CACHE_CAP:
                            _later_tags[word] = tag
                    else:
                        tag = _tag_word(word, 0, lexicon)
                        if len(_initial_tags) < _CACHE_CAP:
                            _initial_tags[word] = tag
                    row[i] = tag
        hit = -1
        try:
            while True:
                hit = row.index("NNP", hit + 1)
                add_proper(words[hit])
        except ValueError:
            pass
        tagged.append(row)
    # A sentence-initial capitalized word never triggers the position-based
    # heuristic; borrow the verdict from other occurrences of the same surface.
    if proper_surfaces:
        for words, row in zip(sentences, tagged):
            if words and row[0] != "NNP" and words[0] in proper_surfaces:
                row[0] = "NNP"
    return tagged
