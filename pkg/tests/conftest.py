from __future__ import annotations

import pytest

from algosmith.core import Candidate, EvalOutcome, EvalStatus, FitnessVector
from algosmith.codekit import normalized_hash


def make_candidate(
    cid: int,
    fitness=None,
    sample_index: int = 0,
    code: str = "",
    status: EvalStatus = EvalStatus.VALID,
    idea: str | None = None,
) -> Candidate:
    if fitness is not None:
        values = fitness if isinstance(fitness, (list, tuple)) else [fitness]
        outcome = EvalOutcome(EvalStatus.VALID, fitness=FitnessVector(values))
    else:
        outcome = EvalOutcome(status if status is not EvalStatus.VALID else EvalStatus.RUNTIME_ERROR)
    code = code or f"def f(a, b):\n    return a + {cid}\n"
    return Candidate(
        id=cid,
        code=code,
        outcome=outcome,
        idea=idea,
        sample_index=sample_index,
        normalized_hash=normalized_hash(code),
    )


@pytest.fixture
def candidate_factory():
    return make_candidate
