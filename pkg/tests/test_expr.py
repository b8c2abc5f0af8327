from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algosmith.codekit.expr import (
    Binary,
    If,
    NodeBudget,
    Num,
    Unary,
    Var,
    depth,
    eval_expression,
    node_count,
    parse_expression,
    to_text,
)
from algosmith.core import EvalError, ParseError

VARS = ("a", "b", "x")


def ev(text, **bindings):
    return eval_expression(parse_expression(text, VARS), bindings)


class TestParsePrecedence:
    def test_mul_binds_tighter_than_add(self):
        assert ev("1 + 2 * 3") == 7.0

    def test_pow_right_associative(self):
        assert ev("2 ^ 3 ^ 2") == 512.0

    def test_call_syntax(self):
        assert ev("min(3, 4 * 2)") == 3.0

    def test_unary_binds_tighter_than_pow(self):
        # -2^2 parses as (-2)^2, and protected pow works on magnitudes
        assert ev("-2 ^ 2") == 4.0

    def test_parentheses(self):
        assert ev("(1 + 2) * 3") == 9.0

    def test_double_star_is_pow(self):
        assert ev("2 ** 3") == 8.0

    def test_comparisons_lowest(self):
        assert ev("1 + 1 < 3") == 1.0
        assert ev("2 >= 3") == 0.0


class TestParseErrors:
    def test_unknown_identifier(self):
        with pytest.raises(ParseError):
            parse_expression("a + unknown_name", VARS)

    def test_unbalanced_parens(self):
        with pytest.raises(ParseError):
            parse_expression("(1 + 2", VARS)
        with pytest.raises(ParseError):
            parse_expression("1 + 2)", VARS)

    def test_unexpected_character(self):
        with pytest.raises(ParseError):
            parse_expression("1 @ 2", VARS)

    def test_empty(self):
        with pytest.raises(ParseError):
            parse_expression("", VARS)

    def test_wrong_arg_counts(self):
        with pytest.raises(ParseError):
            parse_expression("min(1)", VARS)
        with pytest.raises(ParseError):
            parse_expression("sqrt(1, 2)", VARS)
        with pytest.raises(ParseError):
            parse_expression("if(1, 2)", VARS)

    def test_depth_limit(self):
        deep = "(" * 80 + "1" + ")" * 80
        with pytest.raises(ParseError):
            parse_expression(deep, VARS)

    def test_source_size_limit(self):
        with pytest.raises(ParseError):
            parse_expression("1 + " * 20000 + "1", VARS)


class TestProtectedSemantics:
    def test_division_by_zero(self):
        assert ev("1 / 0") == 1.0

    def test_division_by_near_zero(self):
        assert ev("5 / x", x=1e-13) == 1.0

    def test_sqrt_of_negative(self):
        assert ev("sqrt(0 - 4)") == 2.0

    def test_log_of_zero_is_finite(self):
        assert math.isfinite(ev("log(0)"))

    def test_exp_clamped(self):
        assert math.isfinite(ev("exp(10000)"))

    def test_conditional(self):
        assert ev("if(a > 0, a, -a)", a=-2.0) == 2.0
        assert ev("if(a > 0, a, -a)", a=3.0) == 3.0

    def test_comparison_values(self):
        assert ev("3 < 4") == 1.0
        assert ev("4 <= 4") == 1.0
        assert ev("3 > 4") == 0.0

    def test_pow_stays_finite(self):
        assert math.isfinite(ev("x ^ x", x=1e300))
        assert ev("0 ^ -1") == 1.0
        assert ev("0 ^ 0") == 1.0

    def test_unbound_variable(self):
        ast = parse_expression("a + 1", VARS)
        with pytest.raises(EvalError):
            eval_expression(ast, {})


class TestNodeBudget:
    def test_budget_exhaustion_raises(self):
        ast = parse_expression("1 + 2 + 3 + 4", VARS)
        with pytest.raises(EvalError):
            eval_expression(ast, {}, NodeBudget(3))

    def test_budget_counts_visits(self):
        ast = parse_expression("1 + 2", VARS)
        budget = NodeBudget(100)
        eval_expression(ast, {}, budget)
        assert budget.remaining == 97


class TestNodeCount:
    def test_examples(self):
        assert node_count(parse_expression("a + b", VARS)) == 3
        assert node_count(parse_expression("a", VARS)) == 1
        assert node_count(parse_expression("if(a, b, 1)", VARS)) == 4


# ---- property-based coverage ----

_numbers = st.floats(
    min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False
)


def _ast_strategy():
    leaves = st.one_of(
        _numbers.map(Num),
        st.sampled_from(VARS).map(Var),
    )

    def extend(children):
        unary = st.builds(
            Unary,
            st.sampled_from(["neg", "abs", "sqrt", "log", "exp", "sin", "cos"]),
            children,
        )
        binary = st.builds(
            Binary,
            st.sampled_from(["+", "-", "*", "/", "^", "min", "max", "<", "<=", ">", ">="]),
            children,
            children,
        )
        ternary = st.builds(If, children, children, children)
        return st.one_of(unary, binary, ternary)

    return st.recursive(leaves, extend, max_leaves=25)


_bindings = st.fixed_dictionaries(
    {
        name: st.floats(allow_nan=False, allow_infinity=False, width=64)
        for name in VARS
    }
)


@given(_ast_strategy(), _bindings)
@settings(max_examples=300, deadline=None)
def test_protected_eval_is_finite(ast, bindings):
    value = eval_expression(ast, bindings)
    assert math.isfinite(value)


@given(_ast_strategy())
@settings(max_examples=300, deadline=None)
def test_print_parse_round_trip(ast):
    text = to_text(ast)
    again = parse_expression(text, VARS)
    assert again == ast
    assert depth(again) == depth(ast)
