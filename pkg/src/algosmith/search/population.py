"""Populations and islands: bounded, hash-deduplicated candidate pools."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from ..core import Candidate, ContractViolation, candidate_order_key


@dataclass
class Population:
    """Valid candidates only; no two members share a normalized hash."""

    capacity: int
    members: list[Candidate] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ContractViolation("population capacity must be >= 1")

    def hashes(self) -> set[str]:
        return {c.normalized_hash for c in self.members}

    def try_add(self, candidate: Candidate) -> bool:
        """Admit a valid, unseen candidate; evict the worst when over capacity.

        Returns whether the candidate is a member afterwards (a newcomer that
        is itself the eviction victim was not admitted).
        """
        if not candidate.is_valid:
            return False
        if candidate.normalized_hash in self.hashes():
            return False
        self.members.append(candidate)
        self.members.sort(key=candidate_order_key)
        if len(self.members) > self.capacity:
            evicted = self.members.pop()
            return evicted is not candidate
        return True

    @property
    def best(self) -> Optional[Candidate]:
        return min(self.members, key=candidate_order_key) if self.members else None


def eoh_survivor_selection(
    members: list[Candidate], offspring: list[Candidate], capacity: int
) -> list[Candidate]:
    """Union parents and offspring, dedup by hash (earlier candidate wins),
    keep the best ``capacity`` by scalar fitness."""
    merged = sorted(
        [c for c in members + offspring if c.is_valid],
        key=lambda c: c.sample_index,
    )
    by_hash: dict[str, Candidate] = {}
    for c in merged:
        by_hash.setdefault(c.normalized_hash, c)
    survivors = sorted(by_hash.values(), key=candidate_order_key)
    return survivors[:capacity]


@dataclass
class Island:
    """One semi-isolated subpopulation of the island model."""

    id: int
    population: Population
    staleness: int = 0

    @property
    def best(self) -> Optional[Candidate]:
        return self.population.best


def island_reset(islands: list[Island], rng: random.Random) -> list[int]:
    """Empty the worse half of islands, reseeding each from a surviving best.

    Islands are ranked by their best fitness (empty islands count worst);
    each reset island receives a copy of a uniformly chosen survivor's best
    candidate. Returns the ids of the islands that were reset.
    """
    if len(islands) < 2:
        raise ContractViolation("island reset needs at least 2 islands")

    def island_key(island: Island) -> tuple:
        best = island.best
        if best is None:
            return (1, 0.0, island.id)
        return (0, best.fitness.scalar, island.id)

    ranked = sorted(islands, key=island_key)
    half = len(islands) // 2
    survivors = ranked[: len(islands) - half]
    losers = ranked[len(islands) - half :]
    donors = [isl for isl in survivors if isl.best is not None]
    if not donors:
        return []
    reset_ids = []
    for island in losers:
        donor = donors[rng.randrange(len(donors))]
        island.population = Population(capacity=island.population.capacity)
        island.population.try_add(donor.best)
        island.staleness = 0
        reset_ids.append(island.id)
    return reset_ids
