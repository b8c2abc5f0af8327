"""Code handling: templates, candidate extraction, normalization, the DSL."""

from .dslfunc import DslFunction, parse_dsl_function
from .expr import (
    ExprAst,
    NodeBudget,
    eval_expression,
    node_count,
    parse_expression,
    to_text,
)
from .extract import extract_candidate, extract_idea, normalize_code, normalized_hash
from .template import TemplateProgram, parse_template

__all__ = [
    "DslFunction",
    "ExprAst",
    "NodeBudget",
    "TemplateProgram",
    "eval_expression",
    "extract_candidate",
    "extract_idea",
    "node_count",
    "normalize_code",
    "normalized_hash",
    "parse_dsl_function",
    "parse_expression",
    "parse_template",
    "to_text",
]
