"""Syntax-level analysis of C/C++ sources without an external parser.

A lexical pass masks comments, string/char literals, and preprocessor
directives; a brace-tracking pass then recovers function definition spans,
class bodies, and file-scope declarations. Call-site discovery is name-based:
an identifier followed by an open parenthesis inside some function body,
excluding the definition site itself. This trades type resolution for
determinism; false positives from shadowed or overloaded names are surfaced,
not suppressed.
"""
from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field

from .model import LANG_C, LANG_CPP, CommitRef, detect_language
from . import repo as repo_ops
from .diffs import ChangeLines

CALL_CONTEXT_RADIUS = 10

_CONTROL_KEYWORDS = {
    "if", "else", "for", "while", "do", "switch", "case", "default", "return",
    "goto", "break", "continue", "sizeof", "typeof", "alignof", "decltype",
    "try", "catch", "throw", "new", "delete", "static_assert", "asm",
    "defined", "__asm__", "__attribute__", "__declspec", "_Static_assert",
}

_TYPE_KEYWORDS = {
    "void", "char", "short", "int", "long", "float", "double", "signed",
    "unsigned", "bool", "_Bool", "const", "volatile", "restrict", "static",
    "extern", "inline", "register", "auto", "struct", "class", "union",
    "enum", "typedef", "typename", "template", "virtual", "explicit",
    "friend", "constexpr", "consteval", "constinit", "mutable", "noexcept",
    "override", "final", "operator", "public", "private", "protected",
    "using", "namespace", "__inline", "__forceinline", "_Noreturn",
}

_NON_NAME_KEYWORDS = _CONTROL_KEYWORDS | _TYPE_KEYWORDS


@dataclass(frozen=True)
class FunctionSpan:
    """A function definition: qualified name, 1-based line span, and body text."""

    name: str
    start_line: int
    end_line: int
    body_text: str
    file: str = ""

    def contains(self, line: int) -> bool:
        return self.start_line <= line <= self.end_line

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "start_line": self.start_line,
            "end_line": self.end_line,
            "body_text": self.body_text,
            "file": self.file,
        }


PLACEMENT_IN_FUNCTION = "in_function"
PLACEMENT_FILE_SCOPE = "file_scope"


@dataclass(frozen=True)
class LinePlacement:
    line: int
    function: FunctionSpan | None = None

    @property
    def placement(self) -> str:
        return PLACEMENT_IN_FUNCTION if self.function else PLACEMENT_FILE_SCOPE

    def to_dict(self) -> dict:
        return {
            "line": self.line,
            "placement": self.placement,
            "function": self.function.to_dict() if self.function else None,
        }


@dataclass(frozen=True)
class CallSiteContext:
    """One invocation of the function of interest, with surrounding lines."""

    callee: str
    file: str
    line: int
    caller: FunctionSpan | None
    context_lines: tuple[str, ...]
    via_text_scan: bool = False

    def to_dict(self) -> dict:
        return {
            "callee": self.callee,
            "file": self.file,
            "line": self.line,
            "caller": self.caller.to_dict() if self.caller else None,
            "context_lines": list(self.context_lines),
            "via_text_scan": self.via_text_scan,
        }


KIND_ASSIGNED = "assigned"
KIND_DECLARED_FIELD = "declared_field"
KIND_GLOBAL = "global"


@dataclass(frozen=True)
class KeyVariable:
    identifier: str
    kind: str
    source_line: int

    def to_dict(self) -> dict:
        return {"identifier": self.identifier, "kind": self.kind, "source_line": self.source_line}


# ---------------------------------------------------------------------------
# lexical masking


def mask_source(text: str) -> str:
    """Blank comments and string/char literals, preserving line structure."""
    chars = list(text)
    n = len(text)
    i = 0

    def blank(a: int, b: int) -> None:
        for k in range(a, b):
            if chars[k] not in ("\n", "\r"):
                chars[k] = " "

    while i < n:
        c = text[i]
        nxt = text[i + 1] if i + 1 < n else ""
        if c == "/" and nxt == "/":
            j = i + 2
            while j < n:
                if text[j] == "\n":
                    back = j - 1
                    if back >= 0 and text[back] == "\r":
                        back -= 1
                    if back >= 0 and text[back] == "\\":
                        j += 1
                        continue
                    break
                j += 1
            blank(i, j)
            i = j
        elif c == "/" and nxt == "*":
            end = text.find("*/", i + 2)
            j = n if end < 0 else end + 2
            blank(i, j)
            i = j
        elif c == '"':
            if _is_raw_string_quote(text, i):
                i = _mask_raw_string(text, i, blank)
            else:
                i = _mask_quoted(text, i, '"', blank)
        elif c == "'":
            i = _mask_quoted(text, i, "'", blank)
        else:
            i += 1
    return "".join(chars)


def _is_raw_string_quote(text: str, i: int) -> bool:
    return i > 0 and text[i - 1] == "R" and (i < 2 or not (text[i - 2].isalnum() or text[i - 2] == "_"))


def _mask_raw_string(text: str, i: int, blank) -> int:
    open_paren = text.find("(", i + 1)
    if open_paren < 0:
        blank(i, len(text))
        return len(text)
    delim = text[i + 1:open_paren]
    closer = ")" + delim + '"'
    end = text.find(closer, open_paren + 1)
    j = len(text) if end < 0 else end + len(closer)
    blank(i, j)
    return j


def _mask_quoted(text: str, i: int, quote: str, blank) -> int:
    j = i + 1
    n = len(text)
    while j < n:
        if text[j] == "\\":
            j += 2
            continue
        if text[j] == quote or text[j] == "\n":
            j += 1
            break
        j += 1
    blank(i, min(j, n))
    return min(j, n)


def mask_directives(masked: str) -> tuple[str, set[int]]:
    """Blank preprocessor lines (with continuations); returns blanked text and
    the set of 0-based directive line indexes."""
    lines = masked.split("\n")
    directive_idx: set[int] = set()
    continued = False
    for idx, line in enumerate(lines):
        stripped = line.strip()
        if continued or stripped.startswith("#"):
            directive_idx.add(idx)
            continued = stripped.endswith("\\")
        else:
            continued = False
    out = [
        " " * len(line) if idx in directive_idx else line
        for idx, line in enumerate(lines)
    ]
    return "\n".join(out), directive_idx


# ---------------------------------------------------------------------------
# structure scan

_SCOPE_FUNCTION = "function"
_SCOPE_CLASS = "class"
_SCOPE_NAMESPACE = "namespace"
_SCOPE_EXTERN = "extern"
_SCOPE_INIT = "init"
_SCOPE_BLOCK = "block"

_CLASS_KEY_RE = re.compile(r"\b(struct|class|union|enum)\b")
_CLASS_NAME_RE = re.compile(r"\b(?:struct|class|union|enum)(?:\s+(?:class|struct))?\s+([A-Za-z_]\w*)")
_OPERATOR_RE = re.compile(r"\b((?:[A-Za-z_]\w*\s*::\s*)*operator\s*(?:\(\s*\)|\[\s*\]|[^\s(]{1,3}))\s*\($")
_ALL_CAPS_RE = re.compile(r"^[A-Z][A-Z0-9_]*$")


@dataclass
class _OpenScope:
    kind: str
    name: str | None
    head_start: int
    open_pos: int


@dataclass
class SourceAnalysis:
    """Masked text plus the structural facts layered analyses need."""

    text: str
    masked: str
    spans: list[FunctionSpan]
    body_ranges: list[tuple[int, int, FunctionSpan]]
    header_ranges: list[tuple[int, int, FunctionSpan]]
    class_line_ranges: list[tuple[int, int]]
    file_scope_decls: dict[str, int]
    balanced: bool
    line_offsets: list[int] = field(default_factory=list)

    def line_of(self, offset: int) -> int:
        return bisect.bisect_right(self.line_offsets, offset)

    def innermost_span(self, line: int) -> FunctionSpan | None:
        best = None
        for span in self.spans:
            if span.contains(line):
                if best is None or (span.end_line - span.start_line) < (best.end_line - best.start_line):
                    best = span
        return best


def _line_offsets(text: str) -> list[int]:
    offsets = []
    pos = text.find("\n")
    while pos >= 0:
        offsets.append(pos)
        pos = text.find("\n", pos + 1)
    return offsets


_QUALIFIED_BEFORE_PAREN_RE = re.compile(
    r"((?:[A-Za-z_]\w*\s*::\s*)*~?[A-Za-z_]\w*)\s*\("
)


def _head_identifier_name(head: str) -> str | None:
    """Declarator name from a candidate function head, or None.

    The declarator is the first (possibly ::-qualified) identifier that sits
    directly before an open parenthesis and is not a keyword. That picks
    `avi_read` out of `static int avi_read(AVI *AVI, ...)` and `A::f` out of
    `void A::f() const`, and skips control keywords and type names.
    """
    op = _OPERATOR_RE.search(head)
    for m in _QUALIFIED_BEFORE_PAREN_RE.finditer(head):
        if op and op.start() <= m.start() < op.end():
            return re.sub(r"\s+", "", op.group(1))
        qual = re.sub(r"\s+", "", m.group(1))
        base = qual.split("::")[-1].lstrip("~")
        if base and base not in _NON_NAME_KEYWORDS:
            return qual
    if op:
        return re.sub(r"\s+", "", op.group(1))
    return None


def _declarator_or_none(head: str) -> str | None:
    """Declarator name, or None for anonymous/macro-shaped heads."""
    name = _head_identifier_name(head)
    if name is None:
        return None
    first_token = re.match(r"\s*((?:[A-Za-z_]\w*\s*::\s*)*~?[A-Za-z_]\w*)", head)
    if (
        first_token
        and re.sub(r"\s+", "", first_token.group(1)) == name
        and _ALL_CAPS_RE.match(name.split("::")[-1])
    ):
        return None  # e.g. DEFINE_HANDLER(x) — a macro invocation, not a declarator
    return name


def _classify_brace(head: str, parent_kind: str) -> tuple[str, str | None]:
    """Classify an opening brace by the statement text preceding it."""
    stripped = head.strip()
    if parent_kind == _SCOPE_INIT:
        return _SCOPE_INIT, None
    if parent_kind == _SCOPE_FUNCTION or parent_kind == _SCOPE_BLOCK:
        return _SCOPE_BLOCK, None
    if not stripped or stripped[-1] in "=,([":
        return _SCOPE_INIT, None
    if "=" in _strip_paren_groups(stripped):
        return _SCOPE_INIT, None
    if stripped == "extern":
        return _SCOPE_EXTERN, None
    if re.search(r"\bnamespace\b", stripped) and not stripped.endswith(")"):
        m = re.search(r"\bnamespace\s+([A-Za-z_][\w:]*)", stripped)
        return _SCOPE_NAMESPACE, m.group(1) if m else None
    if _CLASS_KEY_RE.search(stripped) and not stripped.endswith(")"):
        m = _CLASS_NAME_RE.search(stripped)
        return _SCOPE_CLASS, m.group(1) if m else None
    name = _head_identifier_name(stripped)
    if name is not None:
        return _SCOPE_FUNCTION, _declarator_or_none(stripped)
    return _SCOPE_BLOCK, None


def _strip_paren_groups(s: str) -> str:
    out = []
    depth = 0
    for c in s:
        if c == "(":
            depth += 1
        elif c == ")":
            depth = max(0, depth - 1)
        elif depth == 0:
            out.append(c)
    return "".join(out)


def analyze_source(text: str, file: str = "") -> SourceAnalysis:
    """Run the full lexical + structural pass over one source file."""
    masked_literals = mask_source(text)
    masked, _ = mask_directives(masked_literals)
    offsets = _line_offsets(text)
    raw_lines = text.split("\n")

    spans: list[FunctionSpan] = []
    body_ranges: list[tuple[int, int, FunctionSpan]] = []
    header_ranges: list[tuple[int, int, FunctionSpan]] = []
    class_ranges: list[tuple[int, int]] = []

    stack: list[_OpenScope] = []
    balanced = True
    last_boundary = 0
    paren_depth = 0
    i = 0
    n = len(masked)

    def line_of(offset: int) -> int:
        return bisect.bisect_right(offsets, offset) + 1

    while i < n:
        c = masked[i]
        if c == "(":
            paren_depth += 1
        elif c == ")":
            paren_depth = max(0, paren_depth - 1)
        elif c == ";" and paren_depth == 0:
            last_boundary = i + 1
        elif c == "{":
            head = masked[last_boundary:i]
            parent_kind = stack[-1].kind if stack else "file"
            kind, name = _classify_brace(head, parent_kind)
            head_start = last_boundary + (len(head) - len(head.lstrip()))
            stack.append(_OpenScope(kind=kind, name=name, head_start=head_start, open_pos=i))
            last_boundary = i + 1
            paren_depth = 0
        elif c == "}":
            if not stack:
                balanced = False
            else:
                scope = stack.pop()
                if scope.kind == _SCOPE_FUNCTION:
                    start_line = line_of(scope.head_start)
                    end_line = line_of(i)
                    qual = _qualify(scope.name or "", stack)
                    body = "\n".join(raw_lines[start_line - 1:end_line])
                    span = FunctionSpan(
                        name=qual,
                        start_line=start_line,
                        end_line=end_line,
                        body_text=body,
                        file=file,
                    )
                    spans.append(span)
                    body_ranges.append((scope.open_pos, i, span))
                    header_ranges.append((scope.head_start, scope.open_pos, span))
                elif scope.kind == _SCOPE_CLASS:
                    class_ranges.append((line_of(scope.open_pos), line_of(i)))
            last_boundary = i + 1
            paren_depth = 0
        i += 1
    if stack:
        balanced = False

    decls = _file_scope_declarations(masked, offsets, body_ranges, class_ranges) if balanced else {}
    spans.sort(key=lambda s: (s.start_line, s.end_line))
    return SourceAnalysis(
        text=text,
        masked=masked,
        spans=spans,
        body_ranges=body_ranges,
        header_ranges=header_ranges,
        class_line_ranges=sorted(class_ranges),
        file_scope_decls=decls,
        balanced=balanced,
        line_offsets=offsets,
    )


def _qualify(name: str, stack: list[_OpenScope]) -> str:
    if "::" in name:
        return name
    classes = [s.name for s in stack if s.kind == _SCOPE_CLASS and s.name]
    if classes:
        return "::".join(classes + [name])
    return name


_DECL_NAME_RE = re.compile(r"([A-Za-z_]\w*)\s*(?:\[[^\]]*\])*\s*$")


def _file_scope_declarations(
    masked: str,
    offsets: list[int],
    body_ranges: list[tuple[int, int, FunctionSpan]],
    class_ranges: list[tuple[int, int]],
) -> dict[str, int]:
    """Identifiers declared at file scope, mapped to their declaration line."""
    covered = [(lo, hi) for lo, hi, _ in body_ranges]
    # blank everything inside braces so only depth-0 text remains
    buf = list(masked)
    depth = 0
    for idx, ch in enumerate(masked):
        if ch == "{":
            depth += 1
            buf[idx] = " "
        elif ch == "}":
            depth = max(0, depth - 1)
            buf[idx] = ";" if depth == 0 else " "
        elif depth > 0 and ch not in "\n\r":
            buf[idx] = " "
    toplevel = "".join(buf)

    decls: dict[str, int] = {}
    pos = 0
    for stmt in toplevel.split(";"):
        stmt_start = pos
        pos += len(stmt) + 1
        body = stmt.strip()
        if not body or body.startswith("typedef"):
            continue
        for segment in _split_top_commas(body):
            target = segment.split("=")[0].strip()
            if "(" in target or not target:
                continue
            m = _DECL_NAME_RE.search(target)
            if not m:
                continue
            name = m.group(1)
            if name in _NON_NAME_KEYWORDS:
                continue
            before = target[:m.start()].strip()
            if not before or before.rstrip("*& ").split()[-1:] == [name]:
                # need at least a type token before the declarator
                if not before:
                    continue
            name_offset = stmt_start + stmt.find(name)
            if name not in decls:
                decls[name] = bisect.bisect_right(offsets, name_offset) + 1
    return decls


def _split_top_commas(s: str) -> list[str]:
    parts = []
    depth = 0
    cur = []
    for c in s:
        if c in "([{":
            depth += 1
        elif c in ")]}":
            depth = max(0, depth - 1)
        if c == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(c)
    parts.append("".join(cur))
    return parts


# ---------------------------------------------------------------------------
# public operations


def place_lines(source: str, language: str, lines: list[int], file: str = "") -> list[LinePlacement]:
    """Map each queried line to its innermost enclosing function, or file scope.

    On structurally unbalanced input the result degrades to all-file-scope;
    callers can detect this via analyze_source(...).balanced.
    """
    if language not in (LANG_C, LANG_CPP):
        raise ValueError(f"unsupported language: {language}")
    total = source.count("\n") + (0 if source.endswith("\n") or not source else 1)
    for line in lines:
        if line < 1 or line > max(total, 1):
            raise ValueError(f"line {line} out of bounds (file has {total} lines)")
    analysis = analyze_source(source, file=file)
    if not analysis.balanced:
        return [LinePlacement(line=line) for line in lines]
    return [LinePlacement(line=line, function=analysis.innermost_span(line)) for line in lines]


def capture_function_name(span_header_text: str, language: str = LANG_C, line: int | None = None) -> str:
    """Declarator identifier from a function header; placeholder when anonymous
    or macro-generated."""
    masked_literals = mask_source(span_header_text)
    head = masked_literals.strip().rstrip("{").strip()
    name = _head_identifier_name(head)
    if name is not None:
        first_token = re.match(r"\s*([A-Za-z_~][\w:]*)", head)
        if (
            first_token
            and re.sub(r"\s+", "", first_token.group(1)) == name
            and _ALL_CAPS_RE.match(name.split("::")[-1])
        ):
            name = None  # macro invocation shaped like a definition
    if name is None:
        return f"<unnamed@{line}>" if line is not None else "<unnamed>"
    return name


def _occurrence_re(name: str) -> re.Pattern:
    return re.compile(r"(?<![\w~])" + re.escape(name) + r"(?!\w)\s*\(")


def find_call_sites(handle: repo_ops.RepoHandle, callee_name: str) -> list[CallSiteContext]:
    contexts, _ = scan_call_sites(handle, callee_name)
    return contexts


def scan_call_sites(
    handle: repo_ops.RepoHandle, callee_name: str
) -> tuple[list[CallSiteContext], list[str]]:
    """All invocations of callee_name across C/C++ files at the handle's
    current revision, plus the files that degraded to a plain text scan."""
    revision = handle.current_revision
    results: list[CallSiteContext] = []
    degraded: list[str] = []
    base = callee_name.split("::")[-1]
    pattern = _occurrence_re(base)
    for path in sorted(repo_ops.list_files_at(handle, revision)):
        if detect_language(path) not in (LANG_C, LANG_CPP):
            continue
        text, _ = repo_ops.file_at_revision(handle, revision, path)
        analysis = analyze_source(text, file=path)
        if not analysis.balanced:
            degraded.append(path)
            for m in pattern.finditer(analysis.masked):
                line = analysis.line_of(m.start())
                results.append(
                    CallSiteContext(
                        callee=base,
                        file=path,
                        line=line,
                        caller=None,
                        context_lines=_context_window(text, line),
                        via_text_scan=True,
                    )
                )
            continue
        own_headers = [
            (lo, hi) for lo, hi, span in analysis.header_ranges
            if span.name.split("::")[-1] == base
        ]
        for m in pattern.finditer(analysis.masked):
            pos = m.start()
            if any(lo <= pos < hi for lo, hi in own_headers):
                continue
            caller = _body_span_at(analysis, pos)
            if caller is None:
                continue  # prototype or file-scope declaration
            line = analysis.line_of(pos)
            results.append(
                CallSiteContext(
                    callee=base,
                    file=path,
                    line=line,
                    caller=caller,
                    context_lines=_context_window(text, line),
                )
            )
    results.sort(key=lambda c: (c.file, c.line))
    return results, degraded


def _body_span_at(analysis: SourceAnalysis, offset: int) -> FunctionSpan | None:
    best = None
    best_size = None
    for lo, hi, span in analysis.body_ranges:
        if lo < offset < hi:
            size = hi - lo
            if best_size is None or size < best_size:
                best, best_size = span, size
    return best


def _context_window(text: str, line: int, radius: int = CALL_CONTEXT_RADIUS) -> tuple[str, ...]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lo = max(1, line - radius)
    hi = min(len(lines), line + radius)
    return tuple(lines[lo - 1:hi])


# ---------------------------------------------------------------------------
# key variables

_ASSIGN_RE = re.compile(r"(?<![=!<>+\-*/%&|^])=(?!=)|(?:\+=|-=|\*=|/=|%=|&=|\|=|\^=|<<=|>>=)")
_INCDEC_POST_RE = re.compile(r"([\w\->\.\[\]]+)\s*(?:\+\+|--)")
_INCDEC_PRE_RE = re.compile(r"(?:\+\+|--)\s*([\w\->\.\[\]]+)")


def _final_identifier(expr: str) -> tuple[str | None, bool]:
    """Last identifier component of an lvalue expression, plus whether the
    expression is a member access."""
    cleaned = re.sub(r"\[[^\[\]]*\]", "", expr)
    while re.search(r"\[[^\[\]]*\]", cleaned):
        cleaned = re.sub(r"\[[^\[\]]*\]", "", cleaned)
    cleaned = cleaned.strip().rstrip(")")
    is_member = "->" in cleaned or re.search(r"\w\s*\.\s*\w", cleaned) is not None
    m = re.search(r"([A-Za-z_]\w*)\s*$", cleaned)
    if not m:
        return None, is_member
    name = m.group(1)
    if name in _NON_NAME_KEYWORDS:
        return None, is_member
    return name, is_member


def _assignment_targets(line_text: str) -> list[tuple[str, bool, bool]]:
    """(identifier, is_member, declared_here) per assignment or ++/-- target."""
    masked = mask_source(line_text)
    out: list[tuple[str, bool, bool]] = []
    for stmt in masked.split(";"):
        for m in _ASSIGN_RE.finditer(stmt):
            lhs = stmt[:m.start()]
            name, is_member = _final_identifier(lhs)
            if name is None:
                continue
            out.append((name, is_member, _looks_like_declaration(lhs, name)))
        for m in _INCDEC_POST_RE.finditer(stmt):
            name, is_member = _final_identifier(m.group(1))
            if name:
                out.append((name, is_member, False))
        for m in _INCDEC_PRE_RE.finditer(stmt):
            name, is_member = _final_identifier(m.group(1))
            if name:
                out.append((name, is_member, False))
    return out


def _looks_like_declaration(lhs: str, name: str) -> bool:
    cleaned = re.sub(r"\[[^\[\]]*\]", "", lhs).strip()
    m = re.search(r"([A-Za-z_]\w*)[\s\*&]+" + re.escape(name) + r"\s*$", cleaned)
    return m is not None


def _declared_locally(span: FunctionSpan, identifier: str, before_line: int) -> bool:
    upto = before_line - span.start_line + 1
    window = "\n".join(mask_source(span.body_text).split("\n")[:max(upto, 1)])
    pattern = re.compile(
        r"[A-Za-z_]\w*[\s\*&]+" + re.escape(identifier) + r"\s*(?:\[[^\]]*\])?\s*[=;,\)]"
    )
    return pattern.search(window) is not None


def extract_key_variables(
    changes: ChangeLines, source_at_parent: str, language: str
) -> list[KeyVariable]:
    """Identifiers from modified lines worth tracing through history.

    Included: assignment/increment targets (member fields always; bare names
    unless they are locals of the enclosing function), struct/class field
    declarations, and file-scope declarations. Added-only lines contribute a
    variable only when it resolves against the parent version, which is the
    substrate every later trace reads.
    """
    analysis = analyze_source(source_at_parent)
    found: dict[str, KeyVariable] = {}

    def add(identifier: str, kind: str, line: int) -> None:
        if identifier not in found:
            found[identifier] = KeyVariable(identifier=identifier, kind=kind, source_line=line)

    for entry in changes.deleted:
        line_no = entry.lineno
        in_class = any(lo <= line_no <= hi for lo, hi in analysis.class_line_ranges)
        span = analysis.innermost_span(line_no) if analysis.balanced else None
        if span is None and in_class:
            name = _declarator_name(entry.text)
            if name:
                add(name, KIND_DECLARED_FIELD, line_no)
            continue
        if span is None:
            name = _declarator_name(entry.text)
            if name and name in analysis.file_scope_decls:
                add(name, KIND_GLOBAL, line_no)
                continue
            for ident, _member, declared in _assignment_targets(entry.text):
                if declared:
                    continue
                if ident in analysis.file_scope_decls:
                    add(ident, KIND_GLOBAL, line_no)
            continue
        for ident, member, declared in _assignment_targets(entry.text):
            if declared:
                continue
            if member:
                add(ident, KIND_ASSIGNED, line_no)
            elif ident in analysis.file_scope_decls:
                add(ident, KIND_GLOBAL, line_no)
            elif not _declared_locally(span, ident, line_no) and not _is_parameter(span, ident):
                add(ident, KIND_ASSIGNED, line_no)

    for entry in changes.added:
        for ident, member, declared in _assignment_targets(entry.text):
            if declared or member:
                continue
            decl_line = analysis.file_scope_decls.get(ident)
            if decl_line is not None:
                add(ident, KIND_GLOBAL, decl_line)

    return list(found.values())


def _declarator_name(line_text: str) -> str | None:
    masked = mask_source(line_text)
    stmt = masked.split(";")[0].split("=")[0].strip()
    if not stmt or "(" in stmt:
        return None
    m = _DECL_NAME_RE.search(stmt)
    if not m:
        return None
    name = m.group(1)
    before = stmt[:m.start()].strip()
    if not before or name in _NON_NAME_KEYWORDS:
        return None
    return name


def _is_parameter(span: FunctionSpan, identifier: str) -> bool:
    header = span.body_text.split("{", 1)[0]
    open_idx = header.find("(")
    if open_idx < 0:
        return False
    params = header[open_idx:]
    return re.search(r"[\s\*&(]" + re.escape(identifier) + r"\s*(?:,|\)|\[)", params) is not None
