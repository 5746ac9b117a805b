"""Unified-diff parsing, dual line numbering, and context extension.

Parsing accepts git-style per-file headers (``diff --git`` blocks), plain
``---``/``+++`` pairs, and the bare hunk bodies the forge commit endpoint
returns per file (via :func:`parse_hunks`). Serialization reproduces hunk
bodies byte-for-byte.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import MalformedDiff
from .model import (
    KIND_ADDED,
    KIND_CONTEXT,
    KIND_DELETED,
    STATUS_ADDED,
    STATUS_DELETED,
    STATUS_MODIFIED,
    STATUS_RENAMED,
    ContextExtensionPolicy,
    FileDiff,
    Hunk,
    LineChange,
    detect_language,
)

_HUNK_HEADER_RE = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@(.*)$")
_NO_NEWLINE = "\\ No newline at end of file"


@dataclass(frozen=True)
class NumberedLine:
    lineno: int
    text: str

    def to_dict(self) -> dict:
        return {"lineno": self.lineno, "text": self.text}


@dataclass(frozen=True)
class ChangeLines:
    """Deleted lines with old-file numbering, added lines with new-file numbering."""

    deleted: tuple[NumberedLine, ...]
    added: tuple[NumberedLine, ...]

    def is_empty(self) -> bool:
        return not self.deleted and not self.added

    def to_dict(self) -> dict:
        return {
            "deleted": [n.to_dict() for n in self.deleted],
            "added": [n.to_dict() for n in self.added],
        }


@dataclass(frozen=True)
class ExtendedHunk:
    """A hunk widened by the context-extension policy, resolved against the
    parent-version file."""

    base: Hunk
    extend_before: int
    extend_after: int
    clamped_to_function: bool
    resolved_old_range: tuple[int, int]

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "extend_before": self.extend_before,
            "extend_after": self.extend_after,
            "clamped_to_function": self.clamped_to_function,
            "resolved_old_range": list(self.resolved_old_range),
        }


class _LineCursor:
    """Iterates diff text split on newlines, tracking byte offsets."""

    def __init__(self, text: str):
        self.parts = text.split("\n")
        # a trailing "" after the final newline is not a line
        if self.parts and self.parts[-1] == "":
            self.parts.pop()
        self.index = 0
        self.offset = 0

    def eof(self) -> bool:
        return self.index >= len(self.parts)

    def peek(self) -> str:
        return self.parts[self.index]

    def advance(self) -> str:
        line = self.parts[self.index]
        self.index += 1
        self.offset += len(line.encode("utf-8")) + 1
        return line


def parse_hunks(text: str, cursor_offset: int = 0) -> list[Hunk]:
    """Parse a sequence of hunks (no file headers), as in forge file patches."""
    cur = _LineCursor(text)
    cur.offset = cursor_offset
    hunks = _parse_hunk_run(cur)
    if not cur.eof():
        raise MalformedDiff(f"unexpected content after hunks: {cur.peek()!r}", cur.offset)
    return hunks


def _parse_hunk_run(cur: _LineCursor) -> list[Hunk]:
    hunks: list[Hunk] = []
    while not cur.eof():
        m = _HUNK_HEADER_RE.match(cur.peek())
        if not m:
            break
        header_offset = cur.offset
        cur.advance()
        old_start = int(m.group(1))
        old_len = int(m.group(2)) if m.group(2) is not None else 1
        new_start = int(m.group(3))
        new_len = int(m.group(4)) if m.group(4) is not None else 1
        section = m.group(5)

        lines: list[LineChange] = []
        old_seen = 0
        new_seen = 0
        old_no = old_start
        new_no = new_start
        while old_seen < old_len or new_seen < new_len:
            if cur.eof():
                raise MalformedDiff("diff truncated inside hunk", cur.offset)
            raw = cur.advance()
            if raw.startswith("+"):
                lines.append(LineChange(KIND_ADDED, raw[1:], None, new_no))
                new_no += 1
                new_seen += 1
            elif raw.startswith("-"):
                lines.append(LineChange(KIND_DELETED, raw[1:], old_no, None))
                old_no += 1
                old_seen += 1
            elif raw.startswith(" ") or raw == "":
                # bare empty lines are tolerated as empty context
                lines.append(LineChange(KIND_CONTEXT, raw[1:], old_no, new_no))
                old_no += 1
                new_no += 1
                old_seen += 1
                new_seen += 1
            elif raw.startswith("\\"):
                if not lines:
                    raise MalformedDiff("newline marker before any hunk line", cur.offset)
                lines[-1] = _with_no_newline(lines[-1])
            else:
                raise MalformedDiff(f"invalid hunk line prefix: {raw[:1]!r}", cur.offset)
            if old_seen > old_len or new_seen > new_len:
                raise MalformedDiff("hunk line counts exceed header", header_offset)
        # a trailing marker may follow the final hunk line
        if not cur.eof() and cur.peek().startswith("\\"):
            cur.advance()
            lines[-1] = _with_no_newline(lines[-1])
        hunks.append(Hunk(old_start, old_len, new_start, new_len, tuple(lines), section))
    return hunks


def _with_no_newline(line: LineChange) -> LineChange:
    return LineChange(line.kind, line.text, line.old_lineno, line.new_lineno, True)


_GIT_HEADER_PREFIXES = (
    "old mode ",
    "new mode ",
    "new file mode ",
    "deleted file mode ",
    "similarity index ",
    "dissimilarity index ",
    "rename from ",
    "rename to ",
    "copy from ",
    "copy to ",
    "index ",
    "Binary files ",
    "GIT binary patch",
)


def _unquote_path(raw: str) -> str:
    if raw.startswith('"') and raw.endswith('"'):
        body = raw[1:-1]
        return body.encode("utf-8").decode("unicode_escape").encode("latin-1").decode("utf-8")
    return raw


def _strip_prefix(path: str, prefix: str) -> str:
    if path.startswith(prefix):
        return path[len(prefix):]
    return path


def _marker_path(raw: str, prefix: str) -> str | None:
    """Resolve a ---/+++ path; returns None for /dev/null."""
    path = _unquote_path(raw.split("\t")[0])
    if path == "/dev/null":
        return None
    return _strip_prefix(path, prefix)


def parse_unified_diff(text: str) -> list[FileDiff]:
    """Parse full unified-diff text into per-file structured diffs."""
    cur = _LineCursor(text)
    diffs: list[FileDiff] = []
    while not cur.eof():
        line = cur.peek()
        if line.startswith("diff --git ") or line.startswith("--- "):
            diffs.append(_parse_one_file(cur))
        elif line.strip() == "":
            cur.advance()
        else:
            raise MalformedDiff(f"expected file header, got: {line!r}", cur.offset)
    return diffs


def _parse_one_file(cur: _LineCursor) -> FileDiff:
    header_lines: list[str] = []
    old_path: str | None = None
    new_path: str | None = None
    saw_new_file = False
    saw_deleted_file = False
    saw_rename = False
    rename_from: str | None = None
    rename_to: str | None = None
    git_paths: tuple[str, str] | None = None

    def take() -> str:
        raw = cur.advance()
        header_lines.append(raw)
        return raw

    if cur.peek().startswith("diff --git "):
        raw = take()
        m = re.match(r'^diff --git ("?a/.*"?) ("?b/.*"?)$', raw)
        if m:
            git_paths = (
                _strip_prefix(_unquote_path(m.group(1)), "a/"),
                _strip_prefix(_unquote_path(m.group(2)), "b/"),
            )
        while not cur.eof():
            line = cur.peek()
            if line.startswith("--- ") or line.startswith("@@ ") or line.startswith("diff --git "):
                break
            if not line.startswith(_GIT_HEADER_PREFIXES):
                raise MalformedDiff(f"unrecognized header line: {line!r}", cur.offset)
            raw = take()
            if raw.startswith("new file mode "):
                saw_new_file = True
            elif raw.startswith("deleted file mode "):
                saw_deleted_file = True
            elif raw.startswith("rename from "):
                saw_rename = True
                rename_from = _unquote_path(raw[len("rename from "):])
            elif raw.startswith("rename to "):
                saw_rename = True
                rename_to = _unquote_path(raw[len("rename to "):])

    if not cur.eof() and cur.peek().startswith("--- "):
        raw = take()
        old_path = _marker_path(raw[4:], "a/")
        if cur.eof() or not cur.peek().startswith("+++ "):
            raise MalformedDiff("'---' line without matching '+++'", cur.offset)
        raw = take()
        new_path = _marker_path(raw[4:], "b/")
    else:
        if rename_from is not None:
            old_path, new_path = rename_from, rename_to
        elif git_paths is not None:
            old_path, new_path = git_paths

    hunks = tuple(_parse_hunk_run(cur))

    if saw_new_file or (old_path is None and new_path is not None and not saw_rename):
        status = STATUS_ADDED
        old_path = None
    elif saw_deleted_file or (new_path is None and old_path is not None):
        status = STATUS_DELETED
        new_path = None
    elif saw_rename:
        status = STATUS_RENAMED
        old_path = old_path or rename_from
        new_path = new_path or rename_to
    else:
        status = STATUS_MODIFIED

    if old_path is None and new_path is None:
        raise MalformedDiff("file diff with no resolvable paths", cur.offset)

    return FileDiff(
        old_path=old_path,
        new_path=new_path,
        status=status,
        hunks=hunks,
        language=detect_language(new_path or old_path or ""),
        header_lines=tuple(header_lines),
    )


def serialize_hunk(hunk: Hunk) -> str:
    """Render a hunk exactly as git would (",1" counts omitted)."""
    old = str(hunk.old_start) if hunk.old_len == 1 else f"{hunk.old_start},{hunk.old_len}"
    new = str(hunk.new_start) if hunk.new_len == 1 else f"{hunk.new_start},{hunk.new_len}"
    out = [f"@@ -{old} +{new} @@{hunk.section}"]
    marker = {KIND_CONTEXT: " ", KIND_ADDED: "+", KIND_DELETED: "-"}
    for line in hunk.lines:
        out.append(marker[line.kind] + line.text)
        if line.no_newline:
            out.append(_NO_NEWLINE)
    return "\n".join(out) + "\n"


def serialize_file_diff(diff: FileDiff) -> str:
    parts = [line + "\n" for line in diff.header_lines]
    parts.extend(serialize_hunk(h) for h in diff.hunks)
    return "".join(parts)


def serialize_diffs(diffs: list[FileDiff]) -> str:
    return "".join(serialize_file_diff(d) for d in diffs)


def hunk_body_text(diff_or_hunks) -> str:
    """Concatenated hunk bodies (headers included) without file headers."""
    hunks = diff_or_hunks.hunks if isinstance(diff_or_hunks, FileDiff) else diff_or_hunks
    return "".join(serialize_hunk(h) for h in hunks)


def extract_change_lines(diff: FileDiff) -> ChangeLines:
    """Pull out non-context lines across all hunks with their line numbers."""
    deleted: list[NumberedLine] = []
    added: list[NumberedLine] = []
    for hunk in diff.hunks:
        for line in hunk.lines:
            if line.kind == KIND_DELETED:
                deleted.append(NumberedLine(line.old_lineno, line.text))
            elif line.kind == KIND_ADDED:
                added.append(NumberedLine(line.new_lineno, line.text))
    return ChangeLines(deleted=tuple(deleted), added=tuple(added))


def extend_context(
    hunk: Hunk,
    policy: ContextExtensionPolicy,
    function_span: tuple[int, int] | None,
    file_len: int,
) -> ExtendedHunk:
    """Widen a hunk's parent-file range by the policy's extension amount.

    The widened range is clamped to the enclosing function span first (the
    extension is capped at the complete function), then to the file bounds.
    The original hunk range is always contained in the result.
    """
    x = hunk.changed_line_count()
    if x < 1:
        raise ValueError("extend_context requires at least one changed line")
    e = policy.extension(x)
    start, end = hunk.old_range()
    lo, hi = start - e, end + e
    clamped_to_function = False
    if function_span is not None:
        fs, fe = function_span
        lo2 = min(start, max(fs, lo))
        hi2 = max(end, min(fe, hi))
        clamped_to_function = (lo2, hi2) != (lo, hi)
        lo, hi = lo2, hi2
    lo = min(start, max(1, lo))
    hi = max(end, min(file_len, hi))
    return ExtendedHunk(
        base=hunk,
        extend_before=start - lo,
        extend_after=hi - end,
        clamped_to_function=clamped_to_function,
        resolved_old_range=(lo, hi),
    )


def slice_lines(text: str, start: int, end: int) -> str:
    """1-based inclusive line slice of a file's text."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines[start - 1:end])
