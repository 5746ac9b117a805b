"""Domain types shared by every pipeline stage.

All types are immutable value objects with a canonical JSON form. Documents
serialized at the top level carry ``"schema_version": 1``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import MalformedSha, MalformedSlug

SCHEMA_VERSION = 1

_SHA_RE = re.compile(r"^[0-9a-f]{7,40}$")

LANG_C = "c"
LANG_CPP = "cpp"
LANG_OTHER = "other"

_C_EXTENSIONS = {".c", ".h"}
_CPP_EXTENSIONS = {".cc", ".cpp", ".cxx", ".hpp", ".hh"}

KIND_CONTEXT = "context"
KIND_ADDED = "added"
KIND_DELETED = "deleted"

STATUS_ADDED = "added"
STATUS_DELETED = "deleted"
STATUS_MODIFIED = "modified"
STATUS_RENAMED = "renamed"


@dataclass(frozen=True)
class CommitRef:
    """A commit identified by its repository slug and (possibly abbreviated) sha."""

    repo_slug: str
    sha: str
    web_url: str | None = None

    def __str__(self) -> str:
        return f"{self.repo_slug}@{self.sha}"

    def to_dict(self) -> dict:
        return {"repo_slug": self.repo_slug, "sha": self.sha, "web_url": self.web_url}

    @classmethod
    def from_dict(cls, d: dict) -> "CommitRef":
        return validate_commit_ref(d["repo_slug"], d["sha"], d.get("web_url"))


def validate_commit_ref(slug: str, sha: str, web_url: str | None = None) -> CommitRef:
    """Validate and normalize a (slug, sha) pair into a CommitRef.

    The sha is lowercased; abbreviated shas of at least 7 hex digits are
    accepted because forge URLs commonly use them.
    """
    parts = slug.split("/")
    if len(parts) != 2 or not parts[0] or not parts[1]:
        raise MalformedSlug(f"repo slug must be 'owner/name': {slug!r}")
    sha_norm = sha.lower()
    if not _SHA_RE.match(sha_norm):
        raise MalformedSha(f"sha must be 7-40 hex characters: {sha!r}")
    return CommitRef(repo_slug=slug, sha=sha_norm, web_url=web_url)


def detect_language(path: str) -> str:
    """Classify a file path as c, cpp, or other by extension."""
    dot = path.rfind(".")
    ext = path[dot:].lower() if dot >= 0 else ""
    if ext in _C_EXTENSIONS:
        return LANG_C
    if ext in _CPP_EXTENSIONS:
        return LANG_CPP
    return LANG_OTHER


@dataclass(frozen=True)
class LineChange:
    """One diff line with dual numbering.

    ``no_newline`` records a "\\ No newline at end of file" marker directly
    after this line, so parsed diffs re-serialize byte-identically.
    """

    kind: str
    text: str
    old_lineno: int | None = None
    new_lineno: int | None = None
    no_newline: bool = False

    def __post_init__(self):
        if self.kind == KIND_ADDED:
            assert self.old_lineno is None and self.new_lineno is not None
        elif self.kind == KIND_DELETED:
            assert self.old_lineno is not None and self.new_lineno is None
        elif self.kind == KIND_CONTEXT:
            assert self.old_lineno is not None and self.new_lineno is not None
        else:
            raise ValueError(f"bad line kind: {self.kind!r}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "text": self.text,
            "old_lineno": self.old_lineno,
            "new_lineno": self.new_lineno,
            "no_newline": self.no_newline,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LineChange":
        return cls(
            kind=d["kind"],
            text=d["text"],
            old_lineno=d.get("old_lineno"),
            new_lineno=d.get("new_lineno"),
            no_newline=d.get("no_newline", False),
        )


@dataclass(frozen=True)
class Hunk:
    """A contiguous diff block. ``section`` is the raw text after the closing @@."""

    old_start: int
    old_len: int
    new_start: int
    new_len: int
    lines: tuple[LineChange, ...] = ()
    section: str = ""

    def changed_line_count(self) -> int:
        return sum(1 for ln in self.lines if ln.kind != KIND_CONTEXT)

    def old_range(self) -> tuple[int, int]:
        """Inclusive old-file range; pure insertions anchor on the preceding line."""
        if self.old_len > 0:
            return (self.old_start, self.old_start + self.old_len - 1)
        anchor = max(1, self.old_start)
        return (anchor, anchor)

    def to_dict(self) -> dict:
        return {
            "old_start": self.old_start,
            "old_len": self.old_len,
            "new_start": self.new_start,
            "new_len": self.new_len,
            "lines": [ln.to_dict() for ln in self.lines],
            "section": self.section,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Hunk":
        return cls(
            old_start=d["old_start"],
            old_len=d["old_len"],
            new_start=d["new_start"],
            new_len=d["new_len"],
            lines=tuple(LineChange.from_dict(x) for x in d["lines"]),
            section=d.get("section", ""),
        )


@dataclass(frozen=True)
class FileDiff:
    """Structured diff for one file.

    ``header_lines`` preserves the raw per-file header exactly as received so
    serialization can reproduce the input byte-for-byte.
    """

    old_path: str | None
    new_path: str | None
    status: str
    hunks: tuple[Hunk, ...] = ()
    language: str = LANG_OTHER
    header_lines: tuple[str, ...] = ()

    def path(self) -> str:
        """Preferred repo-relative path (new side when present)."""
        p = self.new_path or self.old_path
        assert p is not None
        return p

    def to_dict(self) -> dict:
        return {
            "old_path": self.old_path,
            "new_path": self.new_path,
            "status": self.status,
            "hunks": [h.to_dict() for h in self.hunks],
            "language": self.language,
            "header_lines": list(self.header_lines),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FileDiff":
        return cls(
            old_path=d.get("old_path"),
            new_path=d.get("new_path"),
            status=d["status"],
            hunks=tuple(Hunk.from_dict(x) for x in d["hunks"]),
            language=d.get("language", LANG_OTHER),
            header_lines=tuple(d.get("header_lines", ())),
        )


@dataclass(frozen=True)
class IssueRecord:
    number: int
    title: str
    body: str

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "body": self.body}

    @classmethod
    def from_dict(cls, d: dict) -> "IssueRecord":
        return cls(number=d["number"], title=d.get("title", ""), body=d.get("body", ""))


@dataclass(frozen=True)
class AttachmentBundle:
    """Texts gathered around a commit: issues, pull requests, and comments."""

    issues: tuple[IssueRecord, ...] = ()
    pull_requests: tuple[IssueRecord, ...] = ()
    comments: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "issues": [i.to_dict() for i in self.issues],
            "pull_requests": [p.to_dict() for p in self.pull_requests],
            "comments": list(self.comments),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AttachmentBundle":
        return cls(
            issues=tuple(IssueRecord.from_dict(x) for x in d.get("issues", ())),
            pull_requests=tuple(IssueRecord.from_dict(x) for x in d.get("pull_requests", ())),
            comments=tuple(d.get("comments", ())),
        )


@dataclass(frozen=True)
class CommitRecord:
    """A fetched commit: message, parents, diffs, and attached texts."""

    ref: CommitRef
    parents: tuple[CommitRef, ...]
    message: str
    author_date: int
    diffs: tuple[FileDiff, ...]
    attachments: AttachmentBundle = field(default_factory=AttachmentBundle)

    def first_parent(self) -> CommitRef | None:
        return self.parents[0] if self.parents else None

    def to_dict(self) -> dict:
        return {
            "ref": self.ref.to_dict(),
            "parents": [p.to_dict() for p in self.parents],
            "message": self.message,
            "author_date": self.author_date,
            "diffs": [d.to_dict() for d in self.diffs],
            "attachments": self.attachments.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CommitRecord":
        return cls(
            ref=CommitRef.from_dict(d["ref"]),
            parents=tuple(CommitRef.from_dict(x) for x in d["parents"]),
            message=d["message"],
            author_date=d["author_date"],
            diffs=tuple(FileDiff.from_dict(x) for x in d["diffs"]),
            attachments=AttachmentBundle.from_dict(d.get("attachments", {})),
        )


@dataclass(frozen=True)
class ContextExtensionPolicy:
    """Piecewise context-extension rule driven by the patch line count x.

    x below small_threshold extends by x lines each way; between the
    thresholds (inclusive on both ends) by floor(x/2); above large_threshold
    by nothing.
    """

    small_threshold: int = 10
    large_threshold: int = 30

    def __post_init__(self):
        if not (0 < self.small_threshold < self.large_threshold):
            raise ValueError("thresholds must satisfy 0 < small < large")

    def extension(self, x: int) -> int:
        if x < self.small_threshold:
            return x
        if x <= self.large_threshold:
            return x // 2
        return 0

    def to_dict(self) -> dict:
        return {"small_threshold": self.small_threshold, "large_threshold": self.large_threshold}

    @classmethod
    def from_dict(cls, d: dict) -> "ContextExtensionPolicy":
        return cls(
            small_threshold=d.get("small_threshold", 10),
            large_threshold=d.get("large_threshold", 30),
        )


def dumps_canonical(obj) -> str:
    """Serialize a model object (or plain dict) with the top-level schema tag."""
    body = obj.to_dict() if hasattr(obj, "to_dict") else dict(obj)
    doc = {"schema_version": SCHEMA_VERSION}
    doc.update(body)
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
