"""Symbolic regression of a culture growth law.

The candidate is a DSL expression (wrapped in a function) over two
observed variables; fitness is the RMSE against a synthetic, zero-noise
dataset. The generating law is substrate-limited logistic growth,

    rate = 1.2 * (s / (s + 0.5)) * n * (1 - n / 10)

with population density ``n`` in [0, 12] and substrate concentration ``s``
in [0, 5]. The law is documented here for reviewers and excluded from all
prompt text. Targets are produced by the protected DSL evaluator itself,
so an exact recovery scores 0.0 exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from ..codekit import eval_expression, parse_expression
from ..core import ContractViolation
from .base import CandidateFn, Task

TEMPLATE = '''def growth(n: scalar, s: scalar):
    """Predict the instantaneous growth rate of a microbial culture.

    n: population density, in [0, 12].
    s: substrate concentration, in [0, 5].

    Return the predicted growth rate for these conditions. The expression
    may use + - * / ^, abs, sqrt, log, exp, sin, cos, min, max and
    if(condition, then, else).
    """
    return 0.5 * n * (1 - n / 10)
'''

GROUND_TRUTH = "1.2 * (s / (s + 0.5)) * n * (1 - n / 10)"
VARIABLE_NAMES = ("n", "s")

_SQ_CLAMP = 1e308


@dataclass(frozen=True)
class SrRow:
    inputs: tuple[float, ...]  # ordered as VARIABLE_NAMES
    target: float


@dataclass(frozen=True)
class SrDataset:
    rows: tuple[SrRow, ...]
    variable_names: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.rows) < 10:
            raise ContractViolation("regression dataset needs at least 10 rows")
        for row in self.rows:
            values = (*row.inputs, row.target)
            if any(v != v or abs(v) == float("inf") for v in values):
                raise ContractViolation("dataset values must be finite")


def sr_rmse(fn: CandidateFn, rows: Sequence[SrRow]) -> float:
    """Root-mean-square error of the candidate over the rows."""
    if not rows:
        raise ContractViolation("cannot score an empty row list")
    total = 0.0
    for row in rows:
        err = float(fn(*row.inputs)) - row.target
        total += min(err * err, _SQ_CLAMP)
    return (total / len(rows)) ** 0.5


class SrTask(Task):
    id = "sr_growth"
    description = (
        "Recover the formula for a microbial culture's growth rate from "
        "observations of population density and substrate concentration. "
        "Lower prediction error is better."
    )
    template_source = TEMPLATE
    instance_count = 64  # rows

    def generate_instances(self, seed: int, count: int) -> list[SrRow]:
        if count < 1:
            raise ContractViolation("instance count must be >= 1")
        rng = random.Random(seed)
        truth = parse_expression(GROUND_TRUTH, VARIABLE_NAMES)
        rows = []
        for _ in range(count):
            n = rng.uniform(0.0, 12.0)
            s = rng.uniform(0.0, 5.0)
            target = eval_expression(truth, {"n": n, "s": s})
            rows.append(SrRow(inputs=(n, s), target=target))
        return rows

    def dataset(self) -> SrDataset:
        return SrDataset(rows=tuple(self.instances()), variable_names=VARIABLE_NAMES)

    def score_instance(self, fn: CandidateFn, instance: SrRow) -> float:
        err = float(fn(*instance.inputs)) - instance.target
        return min(err * err, _SQ_CLAMP)

    def aggregate(self, scores: Sequence[float]) -> float:
        if not scores:
            raise ContractViolation("cannot aggregate an empty score list")
        return (sum(scores) / len(scores)) ** 0.5
