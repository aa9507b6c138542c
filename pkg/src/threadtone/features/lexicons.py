"""Phrase lexicons and the matching rule shared by hedge/gratitude features.

Lexicon files hold one lowercase phrase per line; '#' starts a comment.
Matching is case-insensitive, non-overlapping, longest match first, over
word-token sequences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path


@dataclass
class Lexicon:
    name: str
    entries: tuple[str, ...]
    _by_first: dict[str, list[list[str]]] = field(
        init=False, repr=False, compare=False
    )
    _single_words: frozenset[str] = field(init=False, repr=False, compare=False)
    _multi_first: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.entries)) != len(self.entries):
            raise ValueError(f"lexicon {self.name!r} has duplicate entries")
        index: dict[str, list[list[str]]] = {}
        for entry in self.entries:
            parts = entry.split()
            if not parts:
                raise ValueError(f"lexicon {self.name!r} has an empty phrase")
            index.setdefault(parts[0], []).append(parts)
        for phrases in index.values():
            phrases.sort(key=len, reverse=True)
        self._by_first = index
        self._single_words = frozenset(
            word for word, phrases in index.items() if len(phrases[-1]) == 1
        )
        self._multi_first = frozenset(
            word for word, phrases in index.items() if len(phrases[0]) > 1
        )

    def match_count(self, tokens_lower: list[str]) -> int:
        """Count non-overlapping phrase occurrences, longest match first.

        Single-word occurrences are summed in one pass; positions that can
        start a multi-word phrase are rare, so they are located with C-level
        index scans and resolved left to right, exactly as a full walk
        would: a multi-word match consumes its span, and single-word
        occurrences inside a consumed span do not count.
        """
        singles = self._single_words
        count = sum(map(singles.__contains__, tokens_lower))
        multi_first = self._multi_first
        if not multi_first:
            return count
        positions: list[int] = []
        find = tokens_lower.index
        for word in multi_first.intersection(tokens_lower):
            start = 0
            try:
                while True:
                    hit = find(word, start)
                    positions.append(hit)
                    start = hit + 1
            except ValueError:
                pass
        if not positions:
            return count
        positions.sort()
        by_first = self._by_first
        n = len(tokens_lower)
        consumed_until = 0
        for i in positions:
            if i < consumed_until:
                continue
            for phrase in by_first[tokens_lower[i]]:
                length = len(phrase)
                if length == 1:
                    break
                end = i + length
                if end <= n and tokens_lower[i:end] == phrase:
                    count += 1
                    for token in tokens_lower[i:end]:
                        if token in singles:
                            count -= 1
                    consumed_until = end
                    break
        return count


def _parse_lexicon(text: str, name: str) -> Lexicon:
    entries = []
    for raw in text.splitlines():
        line = raw.strip().lower()
        if not line or line.startswith("#"):
            continue
        entries.append(line)
    if not entries:
        raise ValueError(f"lexicon {name!r} is empty")
    return Lexicon(name=name, entries=tuple(entries))


def load_lexicon(path: str | Path, name: str | None = None) -> Lexicon:
    path = Path(path)
    return _parse_lexicon(path.read_text("utf-8"), name or path.stem)


@lru_cache(maxsize=None)
def bundled_lexicon(name: str) -> Lexicon:
    text = resources.files("threadtone").joinpath(f"data/{name}.txt").read_text("utf-8")
    return _parse_lexicon(text, name)


def gratitude_lexicon() -> Lexicon:
    return bundled_lexicon("gratitude")


def hedge_lexicon() -> Lexicon:
    return bundled_lexicon("hedges")
