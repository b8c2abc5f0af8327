"""Candidate extraction from raw sampler output, plus code normalization.

Sampler responses are arbitrary text: prose, fenced code blocks, partial
answers. Extraction finds the first function definition inside a fenced
block (falling back to a bare definition anywhere), renames it to the
template's target name, and enforces the template arity. Any text that
yields nothing is a ParseError, never a crash.
"""

from __future__ import annotations

import hashlib
import re

from ..core import ParseError
from .template import TemplateProgram, split_params

_FENCE_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
_DEF_LINE_RE = re.compile(r"^(\s*)def\s+([A-Za-z_][A-Za-z0-9_]*)\s*\(")
_IDEA_RE = re.compile(r"\{([^{}]+)\}")


def _find_function(block: str) -> str | None:
    """Cut the first function definition (def line + indented body) from text."""
    lines = block.splitlines()
    for i, line in enumerate(lines):
        m = _DEF_LINE_RE.match(line)
        if m is None:
            continue
        indent = m.group(1)
        sig = line
        j = i
        while sig.count("(") > sig.count(")") and j + 1 < len(lines):
            j += 1
            sig += " " + lines[j].strip()
        collected = [sig[len(indent):]]
        k = j + 1
        while k < len(lines):
            current = lines[k]
            if current.strip() and (
                not current.startswith(indent + " ") and not current.startswith(indent + "\t")
            ):
                break
            collected.append(current[len(indent):] if current.strip() else "")
            k += 1
        while collected and not collected[-1].strip():
            collected.pop()
        return "\n".join(collected)
    return None


def _arity(def_line: str) -> int:
    open_idx = def_line.index("(")
    close_idx = def_line.rindex(")")
    return len(split_params(def_line[open_idx + 1 : close_idx]))


def _rename(code: str, new_name: str) -> str:
    return re.sub(
        r"^def\s+[A-Za-z_][A-Za-z0-9_]*\s*\(", f"def {new_name}(", code, count=1
    )


def extract_candidate(response: str, template: TemplateProgram) -> str:
    """Extract the candidate function from a sampler response.

    Returns code whose function name matches the template; the parameter
    count must match the template's. Raises ParseError otherwise.
    """
    code = None
    for m in _FENCE_RE.finditer(response):
        code = _find_function(m.group(1))
        if code is not None:
            break
    if code is None:
        code = _find_function(response)
    if code is None:
        raise ParseError("no function definition found in response")
    def_line = code.splitlines()[0]
    got = _arity(def_line)
    expected = len(template.params)
    if got != expected:
        raise ParseError(f"candidate takes {got} parameters, template has {expected}")
    return _rename(code, template.function_name)


def extract_idea(response: str) -> str | None:
    """Best-effort natural-language description attached to a response.

    Convention: a single brace-delimited segment holds the idea; otherwise
    the first non-empty prose line outside code fences is used.
    """
    stripped = _FENCE_RE.sub("", response)
    m = _IDEA_RE.search(stripped)
    if m and m.group(1).strip():
        return m.group(1).strip()
    for line in stripped.splitlines():
        line = line.strip()
        if line and not _DEF_LINE_RE.match(line):
            return line[:500]
    return None


def strip_comments(code: str) -> str:
    """Remove # comments, respecting single/double/triple-quoted strings."""
    out: list[str] = []
    i = 0
    quote: str | None = None
    n = len(code)
    while i < n:
        ch = code[i]
        if quote is not None:
            out.append(ch)
            if ch == "\\" and i + 1 < n:
                out.append(code[i + 1])
                i += 2
                continue
            if code.startswith(quote, i):
                out.append(code[i + 1 : i + len(quote)])
                i += len(quote)
                quote = None
                continue
            i += 1
            continue
        if ch in "\"'":
            for q in (ch * 3, ch):
                if code.startswith(q, i):
                    quote = q
                    out.append(code[i : i + len(q)])
                    i += len(q)
                    break
            continue
        if ch == "#":
            while i < n and code[i] != "\n":
                i += 1
            continue
        out.append(ch)
        i += 1
    return "".join(out)


def normalize_code(code: str) -> str:
    """Deterministic dedup form: no comments, collapsed whitespace.

    Indentation collapses to a single leading space so indent width never
    distinguishes candidates; blank-line runs collapse to one; trailing and
    leading blank lines are dropped. Idempotent.
    """
    lines = strip_comments(code).splitlines()
    normalized: list[str] = []
    for line in lines:
        words = line.split()
        if not words:
            normalized.append("")
            continue
        indent = " " if line[0] in " \t" else ""
        normalized.append(indent + " ".join(words))
    collapsed: list[str] = []
    for line in normalized:
        if line == "" and (not collapsed or collapsed[-1] == ""):
            continue
        collapsed.append(line)
    while collapsed and collapsed[-1] == "":
        collapsed.pop()
    return "\n".join(collapsed)


def normalized_hash(code: str) -> str:
    """Dedup key: digest of the normalized code text."""
    return hashlib.sha256(normalize_code(code).encode("utf-8")).hexdigest()[:16]
