"""Template program parsing.

A template program is the seed skeleton a sampler must complete: optional
preamble lines, exactly one top-level function with a non-empty docstring,
and an example body. Parsing is line/indentation based on purpose: candidate
bodies are DSL text, not host-language syntax, so a language parser would
reject them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..core import TemplateError

_DEF_RE = re.compile(r"^def\s+([A-Za-z_][A-Za-z0-9_]*)\s*\(")


@dataclass(frozen=True)
class TemplateProgram:
    """Parsed seed program: one target function plus surrounding text."""

    source: str
    function_name: str
    params: tuple[tuple[str, str], ...]  # (name, semantic-type tag)
    docstring: str
    body: str  # example implementation, original indentation kept
    preamble: str  # lines above the function (imports / helpers)

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.params)

    def signature(self) -> str:
        rendered = ", ".join(
            f"{name}: {tag}" if tag else name for name, tag in self.params
        )
        return f"def {self.function_name}({rendered}):"

    def function_source(self) -> str:
        """The function alone (no preamble): the seed candidate's code."""
        parts = [self.signature()]
        doc = self.docstring.replace('"""', "'''")
        parts.append(f'    """{doc}"""')
        if self.body.strip():
            parts.append(self.body.rstrip())
        return "\n".join(parts) + "\n"

    def assemble(self) -> str:
        """Rebuild source text (equivalent to the input modulo whitespace)."""
        if self.preamble.strip():
            return self.preamble.rstrip() + "\n" + self.function_source()
        return self.function_source()


def _join_signature(lines: list[str], start: int) -> tuple[str, int]:
    """Collect a possibly multi-line def signature; returns (text, next line)."""
    buf = lines[start]
    i = start
    while buf.count("(") > buf.count(")") and i + 1 < len(lines):
        i += 1
        buf += " " + lines[i].strip()
    return buf, i + 1


def split_params(param_text: str) -> list[str]:
    """Split a parameter list on top-level commas."""
    parts: list[str] = []
    depth = 0
    current = ""
    for ch in param_text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(current.strip())
            current = ""
        else:
            current += ch
    if current.strip():
        parts.append(current.strip())
    return parts


def _parse_params(signature: str) -> tuple[tuple[str, str], ...]:
    open_idx = signature.index("(")
    close_idx = signature.rindex(")")
    inner = signature[open_idx + 1 : close_idx]
    params: list[tuple[str, str]] = []
    for part in split_params(inner):
        part = part.split("=", 1)[0].strip()  # defaults are documentation only
        if ":" in part:
            name, tag = part.split(":", 1)
            params.append((name.strip(), tag.strip()))
        else:
            params.append((part, "scalar"))
    return tuple(params)


def _extract_docstring(body_lines: list[str]) -> tuple[str, int]:
    """Pull the leading triple-quoted docstring; returns (text, lines consumed)."""
    i = 0
    while i < len(body_lines) and not body_lines[i].strip():
        i += 1
    if i >= len(body_lines):
        raise TemplateError("function body is empty; docstring required")
    first = body_lines[i].strip()
    quote = None
    for q in ('"""', "'''"):
        if first.startswith(q):
            quote = q
            break
    if quote is None:
        raise TemplateError("function must start with a docstring")
    rest = first[len(quote) :]
    if quote in rest:  # single-line docstring
        doc = rest[: rest.index(quote)]
        consumed = i + 1
    else:
        collected = [rest]
        j = i + 1
        while j < len(body_lines):
            line = body_lines[j]
            if quote in line:
                collected.append(line[: line.index(quote)])
                break
            collected.append(line)
            j += 1
        else:
            raise TemplateError("unterminated docstring")
        doc = "\n".join(collected)
        consumed = j + 1
    if not doc.strip():
        raise TemplateError("docstring must be non-empty")
    return doc.strip(), consumed


def parse_template(source: str) -> TemplateProgram:
    """Parse template source; exactly one top-level function is required."""
    lines = source.splitlines()
    def_indices = [i for i, line in enumerate(lines) if _DEF_RE.match(line)]
    if len(def_indices) != 1:
        raise TemplateError(
            f"template must define exactly one top-level function, found {len(def_indices)}"
        )
    def_idx = def_indices[0]
    preamble = "\n".join(lines[:def_idx])

    signature, body_start = _join_signature(lines, def_idx)
    m = _DEF_RE.match(signature)
    assert m is not None
    function_name = m.group(1)
    if not signature.rstrip().endswith(":"):
        raise TemplateError("function signature must end with ':'")
    params = _parse_params(signature)
    if not params:
        raise TemplateError("function must take at least one parameter")

    body_lines = lines[body_start:]
    for line in body_lines:
        if line.strip() and not line.startswith((" ", "\t")):
            raise TemplateError("unexpected top-level content after the function")
    docstring, consumed = _extract_docstring(body_lines)
    body = "\n".join(body_lines[consumed:]).rstrip()

    return TemplateProgram(
        source=source,
        function_name=function_name,
        params=params,
        docstring=docstring,
        body=body,
        preamble=preamble,
    )
