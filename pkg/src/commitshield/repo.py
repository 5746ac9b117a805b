"""Local repository lifecycle over the git command-line tool.

One full-history clone per repository slug lives under the workdir root;
analyses that need a working tree get their own detached worktree so
concurrent runs never interleave checkouts. All subprocess output is consumed
as raw bytes with the locale forced to C.
"""
from __future__ import annotations

import fcntl
import os
import secrets
import shutil
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    CloneFailed,
    DiskFull,
    PathAbsentAtRevision,
    RangeOutOfBounds,
    RootCommit,
    UnknownCommit,
)
from .model import CommitRef

_GIT_ENV_OVERRIDES = {
    "LC_ALL": "C",
    "GIT_TERMINAL_PROMPT": "0",
    "GIT_PAGER": "cat",
}

_LINE_HISTORY_SENTINEL = "\x01"


def _decode(data: bytes) -> str:
    return data.decode("utf-8", errors="surrogateescape")


def run_git(args: list[str], cwd: Path | str) -> bytes:
    env = dict(os.environ)
    env.update(_GIT_ENV_OVERRIDES)
    proc = subprocess.run(
        ["git", *args],
        cwd=str(cwd),
        env=env,
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    if proc.returncode != 0:
        raise subprocess.CalledProcessError(
            proc.returncode, ["git", *args], output=proc.stdout, stderr=proc.stderr
        )
    return proc.stdout


@dataclass
class RepoHandle:
    """A per-task view of one cloned repository.

    Not shareable across concurrent tasks: checkout state is private to the
    handle's worktree.
    """

    slug: str
    workdir: Path
    current_revision: str
    clone_dir: Path = field(default=None)  # type: ignore[assignment]
    _worktree: Path | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.clone_dir is None:
            self.clone_dir = self.workdir

    def git(self, args: list[str]) -> bytes:
        return run_git(args, self.workdir)

    def ref(self, sha: str) -> CommitRef:
        return CommitRef(repo_slug=self.slug, sha=sha)

    def release(self) -> None:
        """Remove this handle's private worktree, if any."""
        if self._worktree is not None and self._worktree.exists():
            try:
                run_git(["worktree", "remove", "--force", str(self._worktree)], self.clone_dir)
            except subprocess.CalledProcessError:
                shutil.rmtree(self._worktree, ignore_errors=True)
        self._worktree = None


@dataclass(frozen=True)
class HistoryQuery:
    path: str
    upto: CommitRef
    follow_renames: bool = False
    max_commits: int | None = 500

    def __post_init__(self):
        if self.max_commits is not None and self.max_commits < 1:
            raise ValueError("max_commits must be >= 1 when set")


class RepoManager:
    """Creates and reuses clones; hands out one handle per analysis task."""

    def __init__(self, workdir_root: Path | str, clone_url_template: str = "https://github.com/{slug}.git"):
        self.workdir_root = Path(workdir_root)
        self.clone_url_template = clone_url_template
        self.clones_dir = self.workdir_root / "clones"
        self.worktrees_dir = self.workdir_root / "worktrees"

    def _clone_key(self, slug: str) -> str:
        return slug.replace("/", "__")

    def clone_path(self, slug: str) -> Path:
        return self.clones_dir / self._clone_key(slug)

    def ensure_clone(self, slug: str) -> RepoHandle:
        """Clone the repository if needed and return a fresh handle on it."""
        clone_dir = self.clone_path(slug)
        self.clones_dir.mkdir(parents=True, exist_ok=True)
        lock_path = self.clones_dir / (self._clone_key(slug) + ".lock")
        with open(lock_path, "w") as lock:
            fcntl.flock(lock, fcntl.LOCK_EX)
            try:
                if not (clone_dir / ".git").exists():
                    url = self.clone_url_template.format(slug=slug)
                    try:
                        run_git(["clone", "--quiet", url, str(clone_dir)], self.workdir_root)
                    except subprocess.CalledProcessError as exc:
                        stderr = _decode(exc.stderr or b"")
                        shutil.rmtree(clone_dir, ignore_errors=True)
                        if "No space left" in stderr:
                            raise DiskFull(stderr.strip()) from exc
                        raise CloneFailed(f"clone of {slug!r} failed: {stderr.strip()}") from exc
            finally:
                fcntl.flock(lock, fcntl.LOCK_UN)
        head = _decode(run_git(["rev-parse", "HEAD"], clone_dir)).strip()
        return RepoHandle(slug=slug, workdir=clone_dir, current_revision=head, clone_dir=clone_dir)

    def _new_worktree(self, handle: RepoHandle, sha: str) -> Path:
        self.worktrees_dir.mkdir(parents=True, exist_ok=True)
        wt = self.worktrees_dir / f"{self._clone_key(handle.slug)}-{secrets.token_hex(4)}"
        run_git(["worktree", "add", "--detach", str(wt), sha], handle.clone_dir)
        return wt

    def checkout(self, handle: RepoHandle, sha: str) -> str:
        """Point the handle's private worktree at the given revision."""
        full = resolve_commit(handle, sha)
        if handle._worktree is None:
            handle._worktree = self._new_worktree(handle, full)
        else:
            run_git(["checkout", "--quiet", "--detach", full], handle._worktree)
        handle.workdir = handle._worktree
        handle.current_revision = full
        return full

    def checkout_parent(self, handle: RepoHandle, commit: CommitRef) -> str:
        """Check out the first parent of the commit; returns its full sha."""
        parent = first_parent_of(handle, commit.sha)
        return self.checkout(handle, parent)


def ensure_clone(slug: str, workdir_root: Path | str, clone_url_template: str | None = None) -> RepoHandle:
    kwargs = {}
    if clone_url_template is not None:
        kwargs["clone_url_template"] = clone_url_template
    return RepoManager(workdir_root, **kwargs).ensure_clone(slug)


def resolve_commit(handle: RepoHandle, sha: str) -> str:
    try:
        out = handle.git(["rev-parse", "--verify", f"{sha}^{{commit}}"])
    except subprocess.CalledProcessError as exc:
        raise UnknownCommit(f"{sha!r} not found in {handle.slug}") from exc
    return _decode(out).strip()


def parents_of(handle: RepoHandle, sha: str) -> list[str]:
    full = resolve_commit(handle, sha)
    out = _decode(handle.git(["log", "-1", "--format=%P", full])).strip()
    return out.split() if out else []


def first_parent_of(handle: RepoHandle, sha: str) -> str:
    parents = parents_of(handle, sha)
    if not parents:
        raise RootCommit(f"{sha!r} has no parent")
    return parents[0]


def file_at_revision(handle: RepoHandle, sha: str, path: str) -> tuple[str, int]:
    """Exact file text at a revision plus its line count. No normalization."""
    full = resolve_commit(handle, sha)
    try:
        data = handle.git(["show", f"{full}:{path}"])
    except subprocess.CalledProcessError as exc:
        raise PathAbsentAtRevision(f"{path!r} absent at {sha}") from exc
    text = _decode(data)
    count = text.count("\n")
    if text and not text.endswith("\n"):
        count += 1
    return text, count


def path_exists_at(handle: RepoHandle, sha: str, path: str) -> bool:
    try:
        handle.git(["cat-file", "-e", f"{sha}:{path}"])
        return True
    except subprocess.CalledProcessError:
        return False


def list_files_at(handle: RepoHandle, sha: str) -> list[str]:
    full = resolve_commit(handle, sha)
    out = handle.git(["ls-tree", "-r", "--name-only", "-z", full])
    return [_decode(p) for p in out.split(b"\x00") if p]


def history_of_file(handle: RepoHandle, q: HistoryQuery) -> list[CommitRef]:
    """First-parent commits older than q.upto that touched q.path, newest first.

    Without follow_renames the walk terminates where the file was renamed
    into place, matching plain path-limited log behavior.
    """
    full = resolve_commit(handle, q.upto.sha)
    if not path_exists_at(handle, full, q.path):
        raise PathAbsentAtRevision(f"{q.path!r} absent at {q.upto.sha}")
    parents = parents_of(handle, full)
    if not parents:
        return []
    args = ["log", "--first-parent", "--format=%H"]
    if q.max_commits is not None:
        args += ["-n", str(q.max_commits)]
    if q.follow_renames:
        args.append("--follow")
    args += [parents[0], "--", q.path]
    out = _decode(handle.git(args))
    return [handle.ref(sha) for sha in out.split()]


def line_history(
    handle: RepoHandle,
    path: str,
    line_range: tuple[int, int],
    upto: CommitRef,
) -> list[tuple[CommitRef, str]]:
    """Commits whose diffs intersect the line range (tracked through edits),
    newest first, each with its touching patch text."""
    start, end = line_range
    if start < 1 or start > end:
        raise RangeOutOfBounds(f"bad line range {line_range}")
    full = resolve_commit(handle, upto.sha)
    try:
        _, nlines = file_at_revision(handle, full, path)
    except PathAbsentAtRevision:
        raise
    if end > nlines:
        raise RangeOutOfBounds(f"range {line_range} beyond end of {path!r} ({nlines} lines)")
    try:
        out = handle.git(
            [
                "log",
                "--first-parent",
                f"--format={_LINE_HISTORY_SENTINEL}%H",
                "-L",
                f"{start},{end}:{path}",
                full,
            ]
        )
    except subprocess.CalledProcessError as exc:
        stderr = _decode(exc.stderr or b"")
        if "has only" in stderr or "no match" in stderr:
            raise RangeOutOfBounds(stderr.strip()) from exc
        raise
    entries: list[tuple[CommitRef, str]] = []
    for chunk in _decode(out).split(_LINE_HISTORY_SENTINEL):
        if not chunk:
            continue
        sha, _, patch = chunk.partition("\n")
        entries.append((handle.ref(sha.strip()), patch.lstrip("\n")))
    return entries


def commit_patch(handle: RepoHandle, sha: str) -> str:
    """First-parent unified diff of a commit; root commits diff the empty tree."""
    full = resolve_commit(handle, sha)
    parents = parents_of(handle, full)
    if parents:
        out = handle.git(["diff", parents[0], full])
    else:
        out = handle.git(["diff-tree", "--root", "--no-commit-id", "-p", full])
    return _decode(out)


def first_parent_lineage(handle: RepoHandle, sha: str, limit: int | None = None) -> list[str]:
    """Full shas of the first-parent chain starting at sha, newest first."""
    full = resolve_commit(handle, sha)
    args = ["rev-list", "--first-parent"]
    if limit is not None:
        args += ["-n", str(limit)]
    args.append(full)
    return _decode(handle.git(args)).split()
