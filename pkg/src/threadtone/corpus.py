"""Ingestion of threaded conversation dumps.

Turns line-delimited submission/comment dumps into cleaned Conversation
records: parses raw posts, detects removed/deleted content (including
exact-match moderator boilerplate), normalizes text, groups direct comments
under their submissions, and samples oversized threads deterministically.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from pathlib import Path

logger = logging.getLogger(__name__)

DELETED_MARKERS = ("[removed]", "[deleted]")
REMOVAL_KEYWORDS = ("removed", "deleted")

KIND_SUBMISSION = "submission"
KIND_COMMENT = "comment"

MIN_COMMENTS = 5
MAX_COMMENTS = 10

url_re = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
entity_re = re.compile(r"&(?:[A-Za-z][A-Za-z0-9]*|#[0-9]+|#[xX][0-9A-Fa-f]+);")
ws_re = re.compile(r"\s+")


class DumpParseError(ValueError):
    """A dump line that cannot be turned into a valid RawPost."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass
class RawPost:
    """One submission or comment as read from a dump file."""

    id: str
    kind: str
    subreddit: str
    title: str | None = None
    body: str = ""
    parent_id: str | None = None
    created_utc: int | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("post id must be non-empty")
        if self.kind not in (KIND_SUBMISSION, KIND_COMMENT):
            raise ValueError(f"unknown post kind {self.kind!r}")
        if self.kind == KIND_COMMENT and not self.parent_id:
            raise ValueError(f"comment {self.id} has no parent_id")
        if self.kind == KIND_SUBMISSION and self.parent_id:
            raise ValueError(f"submission {self.id} must not have a parent_id")


@dataclass
class Conversation:
    """A submission plus its sampled direct comments, text already cleaned."""

    submission_id: str
    subreddit: str
    text: str
    comment_ids: list[str]
    comment_texts: list[str]

    def __post_init__(self):
        if len(self.comment_ids) != len(self.comment_texts):
            raise ValueError("comment_ids and comment_texts lengths differ")
        if len(set(self.comment_ids)) != len(self.comment_ids):
            raise ValueError(f"duplicate comment ids in {self.submission_id}")


@dataclass
class CorpusStats:
    """Ingestion tallies, kept per subreddit so the totals stay auditable."""

    submissions: Counter = field(default_factory=Counter)
    comments: Counter = field(default_factory=Counter)
    removed: Counter = field(default_factory=Counter)
    orphan_comments: int = 0
    nested_comments: int = 0
    n_conversations: int = 0

    @property
    def n_submissions(self) -> int:
        return sum(self.submissions.values())

    @property
    def n_comments(self) -> int:
        return sum(self.comments.values())

    @property
    def n_removed(self) -> int:
        return sum(self.removed.values())

    def to_dict(self) -> dict:
        return {
            "n_submissions": self.n_submissions,
            "n_comments": self.n_comments,
            "n_removed": self.n_removed,
            "orphan_comments": self.orphan_comments,
            "nested_comments": self.nested_comments,
            "n_conversations": self.n_conversations,
            "per_subreddit": {
                name: {
                    "submissions": self.submissions.get(name, 0),
                    "comments": self.comments.get(name, 0),
                    "removed": self.removed.get(name, 0),
                }
                for name in sorted(
                    set(self.submissions) | set(self.comments) | set(self.removed)
                )
            },
        }


def _resolve_kind(record: dict, default: str) -> str:
    kind = record.get("kind")
    if kind is not None:
        if kind not in (KIND_SUBMISSION, KIND_COMMENT):
            raise ValueError(f"unknown kind {kind!r}")
        return kind
    if record.get("title"):
        return KIND_SUBMISSION
    if record.get("parent_id"):
        return KIND_COMMENT
    if default in (KIND_SUBMISSION, KIND_COMMENT):
        return default
    raise ValueError("cannot infer kind (no kind/title/parent_id field)")


def parse_dump(
    path: str | Path,
    kind: str = "auto",
    on_error: str = "abort",
    errors: list | None = None,
) -> list[RawPost]:
    """Read line-delimited JSON posts from ``path``.

    ``kind`` is the fallback for records that carry no explicit ``kind``
    field and no title/parent signal. ``on_error="abort"`` raises
    DumpParseError at the first malformed line; ``"skip"`` drops the line,
    logs it, and appends the error to ``errors`` when a list is given.
    Ids must be unique within one dump file.
    """
    if on_error not in ("abort", "skip"):
        raise ValueError(f"on_error must be 'abort' or 'skip', got {on_error!r}")
    posts = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise ValueError("record is not an object")
                post_id = record.get("id")
                if not post_id:
                    raise ValueError("missing id")
                if post_id in seen:
                    raise ValueError(f"duplicate id {post_id!r}")
                resolved = _resolve_kind(record, kind)
                body = record.get("body")
                if body is None:
                    body = record.get("selftext", "")
                post = RawPost(
                    id=post_id,
                    kind=resolved,
                    subreddit=record.get("subreddit", ""),
                    title=record.get("title"),
                    body=body,
                    parent_id=record.get("parent_id") or None,
                    created_utc=record.get("created_utc"),
                )
            except (ValueError, TypeError) as exc:
                err = DumpParseError(str(exc), line_number)
                if on_error == "abort":
                    raise err from None
                logger.warning("%s: skipped %s", path, err)
                if errors is not None:
                    errors.append(err)
                continue
            seen.add(post.id)
            posts.append(post)
    return posts


def build_moderator_templates(
    posts: list[RawPost], min_count: int = 20
) -> dict[str, set[str]]:
    """Collect per-subreddit moderation boilerplate.

    A template is an exact (trimmed) body containing "removed" or "deleted"
    case-insensitively that occurs strictly more than ``min_count`` times
    within one subreddit.
    """
    counts: Counter = Counter()
    for post in posts:
        body = post.body.strip()
        if not body:
            continue
        lowered = body.lower()
        if any(word in lowered for word in REMOVAL_KEYWORDS):
            counts[(post.subreddit, body)] += 1
    templates: dict[str, set[str]] = defaultdict(set)
    for (subreddit, body), count in counts.items():
        if count > min_count:
            templates[subreddit].add(body)
    return dict(templates)


def detect_removed(post: RawPost, moderator_templates: set[str] | None = None) -> bool:
    """True when the post body/title is a deletion marker or known template."""
    body = post.body.strip()
    if body in DELETED_MARKERS:
        return True
    if post.title is not None and post.title.strip() in DELETED_MARKERS:
        return True
    return bool(moderator_templates) and body in moderator_templates


def preprocess_text(text: str) -> str:
    """Drop URLs and HTML character entities, then normalize whitespace.

    Matches are replaced with a space rather than cut out so that removal
    can never splice the surrounding characters into a new URL or entity;
    that makes the function idempotent.
    """
    text = url_re.sub(" ", text)
    text = entity_re.sub(" ", text)
    return ws_re.sub(" ", text).strip()


def preprocess_post(post: RawPost) -> RawPost:
    """A copy of ``post`` with title and body run through preprocess_text."""
    title = preprocess_text(post.title) if post.title is not None else None
    return replace(post, title=title, body=preprocess_text(post.body))


def _derived_seed(seed: int, submission_id: str) -> int:
    digest = hashlib.sha256(f"{seed}:{submission_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _sample_without_replacement(items: list, k: int, rng: random.Random) -> list:
    # Partial Fisher-Yates: only the first k slots are shuffled.
    pool = list(items)
    for i in range(k):
        j = rng.randrange(i, len(pool))
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]


def assemble_conversations(
    posts: list[RawPost],
    seed: int,
    min_comments: int = MIN_COMMENTS,
    max_comments: int = MAX_COMMENTS,
    stats: CorpusStats | None = None,
) -> list[Conversation]:
    """Group direct comments under their submissions.

    Expects removed/deleted posts to be filtered out and text to be
    preprocessed already. Submissions keep at least ``min_comments`` direct
    comments or are dropped; threads above ``max_comments`` are sampled down
    with a generator seeded per submission (sha256 of seed and submission
    id), so results do not depend on input order. Comments whose parent is
    another comment are dropped as nested; comments whose parent is absent
    from the dump are dropped as orphans. Both are counted, not fatal.
    """
    if min_comments < 1 or max_comments < min_comments:
        raise ValueError("need 1 <= min_comments <= max_comments")
    submissions: dict[str, RawPost] = {}
    comment_ids: set[str] = set()
    for post in posts:
        if post.kind == KIND_SUBMISSION:
            if post.id in submissions:
                raise ValueError(f"duplicate submission id {post.id}")
            submissions[post.id] = post
        else:
            comment_ids.add(post.id)

    children: dict[str, list[RawPost]] = defaultdict(list)
    orphans = 0
    nested = 0
    for post in posts:
        if post.kind != KIND_COMMENT:
            continue
        if post.parent_id in submissions:
            children[post.parent_id].append(post)
        elif post.parent_id in comment_ids:
            nested += 1
        else:
            orphans += 1
    if orphans:
        logger.info("dropped %d orphan comments (parent not in dump)", orphans)
    if nested:
        logger.info("dropped %d nested replies (parent is a comment)", nested)
    if stats is not None:
        stats.orphan_comments += orphans
        stats.nested_comments += nested

    conversations = []
    for submission_id in sorted(submissions):
        submission = submissions[submission_id]
        direct = sorted(children.get(submission_id, ()), key=lambda p: p.id)
        if len(direct) < min_comments:
            continue
        if len(direct) > max_comments:
            rng = random.Random(_derived_seed(seed, submission_id))
            direct = _sample_without_replacement(direct, max_comments, rng)
            direct.sort(key=lambda p: p.id)
        text = " ".join(part for part in (submission.title, submission.body) if part)
        conversations.append(
            Conversation(
                submission_id=submission_id,
                subreddit=submission.subreddit,
                text=text,
                comment_ids=[c.id for c in direct],
                comment_texts=[c.body for c in direct],
            )
        )
    if stats is not None:
        stats.n_conversations += len(conversations)
    return conversations


def split_dataset(items: list, fractions: list[float], seed: int) -> list[list]:
    """Shuffle ``items`` with the seed and cut into len(fractions) parts.

    Part sizes use largest-remainder rounding (floor every n*f, then hand
    out the leftover items by descending fractional remainder, earlier
    splits winning ties), so the parts always partition the input exactly.
    """
    if not fractions:
        raise ValueError("fractions must be non-empty")
    if any(f < 0 for f in fractions):
        raise ValueError("fractions must be non-negative")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1, got {sum(fractions)!r}")
    n = len(items)
    sizes = [int(n * f) for f in fractions]
    remainders = [n * f - size for f, size in zip(fractions, sizes)]
    leftover = n - sum(sizes)
    for index in sorted(range(len(fractions)), key=lambda i: (-remainders[i], i)):
        if leftover == 0:
            break
        sizes[index] += 1
        leftover -= 1

    order = list(range(n))
    random.Random(seed).shuffle(order)
    parts = []
    start = 0
    for size in sizes:
        parts.append([items[order[i]] for i in range(start, start + size)])
        start += size
    return parts


def write_conversations(path: str | Path, conversations: list[Conversation]) -> None:
    """Write conversations as line-delimited JSON with stable key order."""
    with open(path, "w", encoding="utf-8") as handle:
        for conv in conversations:
            record = {
                "submission_id": conv.submission_id,
                "subreddit": conv.subreddit,
                "text": conv.text,
                "comment_ids": conv.comment_ids,
                "comment_texts": conv.comment_texts,
            }
            handle.write(json.dumps(record, sort_keys=True, ensure_ascii=False))
            handle.write("\n")


def read_conversations(path: str | Path) -> list[Conversation]:
    conversations = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = json.loads(line)
            conversations.append(
                Conversation(
                    submission_id=record["submission_id"],
                    subreddit=record["subreddit"],
                    text=record["text"],
                    comment_ids=record["comment_ids"],
                    comment_texts=record["comment_texts"],
                )
            )
    return conversations
