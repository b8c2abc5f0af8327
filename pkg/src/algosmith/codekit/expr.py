"""Safe arithmetic expression DSL: parser, protected evaluator, printer.

The DSL is the in-process candidate language: total, loop-free, and closed
over finite floats. Singular inputs never raise or produce NaN/Inf; the
protected operators return defined finite values instead (division by ~0
yields 1.0, sqrt/log work on magnitudes, exp and pow are clamped).

Grammar (precedence low to high, pow right-associative):

    comparison := sum (("<" | "<=" | ">" | ">=") sum)*
    sum        := product (("+" | "-") product)*
    product    := power (("*" | "/") power)*
    power      := prefix ("^" power)?
    prefix     := "-" prefix | atom
    atom       := NUMBER | NAME | NAME "(" args ")" | "(" comparison ")"

Unary minus binds tighter than "^". Calls: abs/sqrt/log/exp/sin/cos take
one argument, min/max two, if(cond, then, else) three.
"""

from __future__ import annotations

import math
import re
import time
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from ..core import EvalError, ParseError

MAX_SOURCE_BYTES = 64 * 1024
MAX_DEPTH = 64
MAX_NODES = 10_000

DIV_EPS = 1e-12
LOG_EPS = 1e-12
EXP_ARG_MAX = 700.0
VALUE_CLAMP = 1e308

UNARY_FUNCS = ("abs", "sqrt", "log", "exp", "sin", "cos")
BINARY_FUNCS = ("min", "max")
COMPARE_OPS = ("<", "<=", ">", ">=")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or a name from UNARY_FUNCS
    operand: "ExprAst"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / ^ min max < <= > >=
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class If:
    cond: "ExprAst"
    then: "ExprAst"
    orelse: "ExprAst"


ExprAst = Union[Num, Var, Unary, Binary, If]


def node_count(ast: ExprAst) -> int:
    if isinstance(ast, (Num, Var)):
        return 1
    if isinstance(ast, Unary):
        return 1 + node_count(ast.operand)
    if isinstance(ast, Binary):
        return 1 + node_count(ast.left) + node_count(ast.right)
    return 1 + node_count(ast.cond) + node_count(ast.then) + node_count(ast.orelse)


def depth(ast: ExprAst) -> int:
    if isinstance(ast, (Num, Var)):
        return 1
    if isinstance(ast, Unary):
        return 1 + depth(ast.operand)
    if isinstance(ast, Binary):
        return 1 + max(depth(ast.left), depth(ast.right))
    return 1 + max(depth(ast.cond), depth(ast.then), depth(ast.orelse))


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><=|>=|\*\*|[-+*/^<>(),]))"
)


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r} at offset {pos}")
        pos = m.end()
        tok = m.group("num") or m.group("name") or m.group("op")
        if tok is None:
            break
        tokens.append("^" if tok == "**" else tok)
    return tokens


# Binding powers; higher binds tighter. "^" handled right-associatively.
_BP = {"<": 10, "<=": 10, ">": 10, ">=": 10, "+": 20, "-": 20, "*": 30, "/": 30, "^": 40}
_UNARY_BP = 50


class _Parser:
    def __init__(self, tokens: list[str], variables: frozenset[str]) -> None:
        self.tokens = tokens
        self.pos = 0
        self.variables = variables
        self.nodes = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of expression")
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.advance()
        if got != tok:
            raise ParseError(f"expected {tok!r}, got {got!r}")

    def _made(self) -> None:
        self.nodes += 1
        if self.nodes > MAX_NODES:
            raise ParseError(f"expression exceeds {MAX_NODES} nodes")

    def parse(self, min_bp: int, level: int) -> ExprAst:
        if level > MAX_DEPTH:
            raise ParseError(f"expression exceeds depth {MAX_DEPTH}")
        left = self.parse_prefix(level)
        while True:
            tok = self.peek()
            if tok is None or tok not in _BP or _BP[tok] <= min_bp:
                break
            self.advance()
            if tok == "^":
                right = self.parse(_BP[tok] - 1, level + 1)  # right-associative
            else:
                right = self.parse(_BP[tok], level + 1)
            self._made()
            left = Binary(tok, left, right)
        return left

    def parse_prefix(self, level: int) -> ExprAst:
        if level > MAX_DEPTH:
            raise ParseError(f"expression exceeds depth {MAX_DEPTH}")
        tok = self.advance()
        if tok == "-":
            operand = self.parse(_UNARY_BP, level + 1)
            self._made()
            return Unary("neg", operand)
        if tok == "(":
            inner = self.parse(0, level + 1)
            self.expect(")")
            return inner
        if re.fullmatch(r"\d.*", tok):
            self._made()
            return Num(float(tok))
        if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok):
            if self.peek() == "(":
                return self.parse_call(tok, level)
            if tok not in self.variables:
                raise ParseError(f"unknown identifier {tok!r}")
            self._made()
            return Var(tok)
        raise ParseError(f"unexpected token {tok!r}")

    def parse_call(self, name: str, level: int) -> ExprAst:
        self.expect("(")
        args: list[ExprAst] = [self.parse(0, level + 1)]
        while self.peek() == ",":
            self.advance()
            args.append(self.parse(0, level + 1))
        self.expect(")")
        self._made()
        if name in UNARY_FUNCS:
            if len(args) != 1:
                raise ParseError(f"{name}() takes exactly 1 argument")
            return Unary(name, args[0])
        if name in BINARY_FUNCS:
            if len(args) != 2:
                raise ParseError(f"{name}() takes exactly 2 arguments")
            return Binary(name, args[0], args[1])
        if name == "if":
            if len(args) != 3:
                raise ParseError("if() takes exactly 3 arguments")
            return If(*args)
        raise ParseError(f"unknown function {name!r}")


def parse_expression(text: str, variables: Iterable[str] = ()) -> ExprAst:
    """Parse DSL text into an AST; names outside ``variables`` are rejected."""
    if len(text.encode("utf-8", errors="replace")) > MAX_SOURCE_BYTES:
        raise ParseError("expression source exceeds 64 KiB")
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    parser = _Parser(tokens, frozenset(variables))
    ast = parser.parse(0, 0)
    if parser.peek() is not None:
        raise ParseError(f"trailing tokens starting at {parser.peek()!r}")
    if depth(ast) > MAX_DEPTH:
        raise ParseError(f"expression exceeds depth {MAX_DEPTH}")
    return ast


class NodeBudget:
    """Mutable counter of AST-node visits shared across one evaluation.

    With a ``deadline`` (time.monotonic reference) the budget also enforces
    wall time, rechecking the clock every 2^16 visits so the overshoot past
    the deadline stays tiny even inside one large call.
    """

    def __init__(self, limit: int, deadline: Optional[float] = None) -> None:
        self.remaining = int(limit)
        self.deadline = deadline
        self._visits = 0

    def spend(self) -> None:
        self.remaining -= 1
        if self.remaining < 0:
            raise EvalError("node-visit budget exhausted")
        if self.deadline is not None:
            self._visits += 1
            if self._visits & 0xFFFF == 0 and time.monotonic() > self.deadline:
                raise EvalError("evaluation deadline exceeded")


def _clamp(v: float) -> float:
    if v != v:  # NaN guard; unreachable for finite inputs but kept total
        return 0.0
    if v > VALUE_CLAMP:
        return VALUE_CLAMP
    if v < -VALUE_CLAMP:
        return -VALUE_CLAMP
    return v


def _protected_pow(base: float, exponent: float) -> float:
    mag = abs(base)
    if mag < DIV_EPS:
        if exponent > 0:
            return 0.0
        return 1.0  # 0^0 and 0^negative
    try:
        return _clamp(math.pow(mag, exponent))
    except OverflowError:
        return VALUE_CLAMP


def eval_expression(
    ast: ExprAst,
    bindings: Mapping[str, float],
    budget: Optional[NodeBudget] = None,
) -> float:
    """Evaluate with protected semantics; always returns a finite float."""
    if budget is not None:
        budget.spend()
    if isinstance(ast, Num):
        return _clamp(ast.value)
    if isinstance(ast, Var):
        try:
            return _clamp(float(bindings[ast.name]))
        except KeyError:
            raise EvalError(f"unbound variable {ast.name!r}") from None
    if isinstance(ast, Unary):
        x = eval_expression(ast.operand, bindings, budget)
        if ast.op == "neg":
            return -x
        if ast.op == "abs":
            return abs(x)
        if ast.op == "sqrt":
            return _clamp(math.sqrt(abs(x)))
        if ast.op == "log":
            return _clamp(math.log(abs(x) + LOG_EPS))
        if ast.op == "exp":
            return _clamp(math.exp(min(x, EXP_ARG_MAX)))
        if ast.op == "sin":
            return math.sin(x)
        if ast.op == "cos":
            return math.cos(x)
        raise EvalError(f"unknown unary op {ast.op!r}")
    if isinstance(ast, If):
        cond = eval_expression(ast.cond, bindings, budget)
        branch = ast.then if cond != 0.0 else ast.orelse
        return eval_expression(branch, bindings, budget)
    x = eval_expression(ast.left, bindings, budget)
    y = eval_expression(ast.right, bindings, budget)
    op = ast.op
    if op == "+":
        return _clamp(x + y)
    if op == "-":
        return _clamp(x - y)
    if op == "*":
        return _clamp(x * y)
    if op == "/":
        if abs(y) < DIV_EPS:
            return 1.0
        return _clamp(x / y)
    if op == "^":
        return _protected_pow(x, y)
    if op == "min":
        return min(x, y)
    if op == "max":
        return max(x, y)
    if op in COMPARE_OPS:
        if op == "<":
            return 1.0 if x < y else 0.0
        if op == "<=":
            return 1.0 if x <= y else 0.0
        if op == ">":
            return 1.0 if x > y else 0.0
        return 1.0 if x >= y else 0.0
    raise EvalError(f"unknown binary op {op!r}")


def _num_text(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_text(ast: ExprAst) -> str:
    """Render an AST back to DSL text; reparsing yields an identical tree."""

    def prec(node: ExprAst) -> int:
        if isinstance(node, Binary) and node.op in _BP:
            return _BP[node.op]
        if isinstance(node, Unary) and node.op == "neg":
            return _UNARY_BP
        return 100  # atoms and call syntax never need parens

    def render(node: ExprAst, context: int) -> str:
        if isinstance(node, Num):
            text = _num_text(node.value)
            return f"({text})" if node.value < 0 else text
        if isinstance(node, Var):
            return node.name
        if isinstance(node, Unary):
            if node.op == "neg":
                inner = render(node.operand, _UNARY_BP)
                out = f"-{inner}"
            else:
                out = f"{node.op}({render(node.operand, 0)})"
            return f"({out})" if prec(node) < context else out
        if isinstance(node, If):
            return (
                f"if({render(node.cond, 0)}, {render(node.then, 0)}, "
                f"{render(node.orelse, 0)})"
            )
        if node.op in BINARY_FUNCS:
            return f"{node.op}({render(node.left, 0)}, {render(node.right, 0)})"
        p = _BP[node.op]
        if node.op == "^":  # right-associative
            left = render(node.left, p + 1)
            right = render(node.right, p)
        else:
            left = render(node.left, p)
            right = render(node.right, p + 1)
        out = f"{left} {node.op} {right}"
        return f"({out})" if p < context else out

    return render(ast, 0)
