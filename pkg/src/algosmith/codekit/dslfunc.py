"""Candidate functions in the expression DSL.

A DSL function is a ``def`` whose body is straight-line code: zero or more
``name = <expr>`` assignments followed by a final ``return <expr>``. Each
expression uses the protected DSL, so a parsed function is total over finite
inputs and safe to run in-process.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from ..core import ParseError, TemplateError
from .expr import ExprAst, NodeBudget, eval_expression, node_count, parse_expression
from .extract import strip_comments
from .template import _DEF_RE, _extract_docstring, _join_signature, split_params


@dataclass(frozen=True)
class DslFunction:
    name: str
    params: tuple[str, ...]
    assignments: tuple[tuple[str, ExprAst], ...]
    result: ExprAst

    @property
    def total_nodes(self) -> int:
        total = node_count(self.result)
        for _, expr in self.assignments:
            total += node_count(expr)
        return total

    def __call__(
        self, bindings: Mapping[str, float], budget: Optional[NodeBudget] = None
    ) -> float:
        scope = dict(bindings)
        for name, expr in self.assignments:
            scope[name] = eval_expression(expr, scope, budget)
        return eval_expression(self.result, scope, budget)


def parse_dsl_function(code: str) -> DslFunction:
    """Parse candidate code into a DslFunction or raise ParseError."""
    lines = strip_comments(code).splitlines()
    def_indices = [i for i, line in enumerate(lines) if _DEF_RE.match(line)]
    if len(def_indices) != 1:
        raise ParseError("candidate must define exactly one function")
    def_idx = def_indices[0]
    for line in lines[:def_idx]:
        if line.strip():
            raise ParseError("unexpected content before the function definition")

    signature, body_start = _join_signature(lines, def_idx)
    m = _DEF_RE.match(signature)
    assert m is not None
    name = m.group(1)
    if not signature.rstrip().endswith(":"):
        raise ParseError("function signature must end with ':'")
    inner = signature[signature.index("(") + 1 : signature.rindex(")")]
    params = tuple(p.split(":", 1)[0].split("=", 1)[0].strip() for p in split_params(inner))
    if any(not p.isidentifier() for p in params):
        raise ParseError("malformed parameter list")

    body_lines = lines[body_start:]
    try:
        _, consumed = _extract_docstring(body_lines)
        body_lines = body_lines[consumed:]
    except TemplateError:
        pass  # docstring is optional in candidates

    known = set(params)
    assignments: list[tuple[str, ExprAst]] = []
    result: Optional[ExprAst] = None
    for raw in body_lines:
        stmt = raw.strip()
        if not stmt:
            continue
        if result is not None:
            raise ParseError("statements after return are not allowed")
        if stmt.startswith("return"):
            tail = stmt[len("return") :]
            if tail and not tail[0].isspace() and tail[0] != "(":
                raise ParseError(f"malformed statement {stmt!r}")
            result = parse_expression(tail.strip(), known)
            continue
        if "=" not in stmt:
            raise ParseError(f"unsupported statement {stmt!r}")
        target, _, expr_text = stmt.partition("=")
        if expr_text.startswith("="):  # '==' is not assignment
            raise ParseError(f"unsupported statement {stmt!r}")
        target = target.strip()
        if not target.isidentifier():
            raise ParseError(f"invalid assignment target {target!r}")
        assignments.append((target, parse_expression(expr_text.strip(), known)))
        known.add(target)
    if result is None:
        raise ParseError("function must end with a return statement")
    return DslFunction(
        name=name, params=params, assignments=tuple(assignments), result=result
    )
