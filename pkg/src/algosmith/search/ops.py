"""Acceptance and selection rules shared by the search strategies."""

from __future__ import annotations

import math
import random
from typing import Optional, Sequence

from ..core import Candidate, ContractViolation, FitnessVector


def sa_accept(delta: float, temperature: float, u: float) -> bool:
    """Metropolis rule: accept improvements always, worsenings with
    probability exp(-delta/T). A frozen system (T == 0) accepts no worsening."""
    if temperature < 0:
        raise ContractViolation("temperature must be >= 0")
    if delta <= 0:
        return True
    if temperature == 0:
        return False
    return u < math.exp(-delta / temperature)


def tabu_admissible(
    candidate: Candidate,
    tabu_list: Sequence[str],
    global_best_fitness: Optional[FitnessVector],
) -> bool:
    """A move is admissible unless its hash is tabu, except by aspiration:
    beating the global best overrides the tabu status."""
    if candidate.normalized_hash not in tabu_list:
        return True
    if candidate.fitness is None or global_best_fitness is None:
        return False
    return candidate.fitness.scalar < global_best_fitness.scalar


def rank_proportional_weights(n: int) -> list[float]:
    """Selection weights 1/(rank+1), normalized; rank 0 is the best."""
    if n < 1:
        raise ContractViolation("need at least one ranked candidate")
    raw = [1.0 / (rank + 1) for rank in range(n)]
    total = sum(raw)
    return [w / total for w in raw]


def select_parents(
    ranked: Sequence[Candidate], k: int, rng: random.Random
) -> list[Candidate]:
    """Draw k parents (with replacement) rank-proportionally from a
    best-first list."""
    if not ranked:
        raise ContractViolation("cannot select parents from an empty population")
    weights = rank_proportional_weights(len(ranked))
    return rng.choices(list(ranked), weights=weights, k=k)
