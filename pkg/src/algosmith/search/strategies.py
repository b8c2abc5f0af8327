"""The search methods, as strategies over a shared coordinator loop.

Each strategy turns its internal state into a batch of prompts (propose)
and folds the evaluated candidates back in (observe). The coordinator owns
budgets, events, and best-so-far tracking; strategies own only their
population/incumbent state. A strategy must tolerate observing fewer
candidates than it proposed: the final generation is trimmed to the budget.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from ..core import Budget, Candidate, ConfigError, candidate_order_key
from ..llm import Prompt
from ..tasks import Task
from . import prompts as P
from .config import MethodConfig
from .multiobj import (
    crowding_distance,
    fast_nondominated_sort,
    moead_weights,
    update_ideal,
    moead_update,
    weight_neighborhoods,
)
from .ops import sa_accept, select_parents, tabu_admissible
from .population import Island, Population, eoh_survivor_selection, island_reset


@dataclass(frozen=True)
class Proposal:
    prompt: Prompt
    operator: str
    parent_ids: tuple[int, ...] = ()


class Strategy:
    """Base class; subclasses fill in propose/observe."""

    multi_objective = False

    def __init__(self, config: MethodConfig, task: Task, budget: Budget) -> None:
        self.config = config
        self.task = task
        self.budget = budget
        self.rng = random.Random(config.rng_seed)

    def seed(self, candidate: Candidate) -> None:
        """Register the pre-evaluated template candidate (valid ones only)."""

    def propose(self) -> list[Proposal]:
        raise NotImplementedError

    def observe(self, evaluated: Sequence[Candidate]) -> None:
        raise NotImplementedError

    def state_snapshot(self) -> dict:
        return {}

    def _base(self, operator: str = "create") -> Proposal:
        return Proposal(prompt=P.base_prompt(self.task, operator), operator=operator)


class RandomSamplingStrategy(Strategy):
    """Repeated independent draws from the task prompt."""

    def propose(self) -> list[Proposal]:
        return [self._base()]

    def observe(self, evaluated: Sequence[Candidate]) -> None:
        pass


class _IncumbentStrategy(Strategy):
    """Shared plumbing for the single-incumbent neighborhood methods."""

    def __init__(self, config: MethodConfig, task: Task, budget: Budget) -> None:
        super().__init__(config, task, budget)
        self.incumbent: Optional[Candidate] = None

    def seed(self, candidate: Candidate) -> None:
        self.incumbent = candidate

    def _improves(self, candidate: Candidate) -> bool:
        if not candidate.is_valid:
            return False
        if self.incumbent is None:
            return True
        return candidate.fitness.scalar < self.incumbent.fitness.scalar

    def state_snapshot(self) -> dict:
        snap: dict = {"incumbent_id": self.incumbent.id if self.incumbent else None}
        if self.incumbent is not None:
            snap["incumbent_fitness"] = list(self.incumbent.fitness.values)
        return snap


class OnePlusOneStrategy(_IncumbentStrategy):
    """(1+1) evolutionary program search: keep strict improvements only."""

    def propose(self) -> list[Proposal]:
        if self.incumbent is None:
            return [self._base()]
        return [
            Proposal(
                prompt=P.modify_prompt(self.task, self.incumbent),
                operator="modify",
                parent_ids=(self.incumbent.id,),
            )
        ]

    def observe(self, evaluated: Sequence[Candidate]) -> None:
        for c in evaluated:
            if self._improves(c):
                self.incumbent = c


class SaStrategy(_IncumbentStrategy):
    """Simulated annealing with geometric cooling every 10 samples."""

    def __init__(self, config: MethodConfig, task: Task, budget: Budget) -> None:
        super().__init__(config, task, budget)
        self.samples_seen = 0

    @property
    def temperature(self) -> float:
        return self.config.sa_t0 * self.config.sa_alpha ** (self.samples_seen // 10)

    def propose(self) -> list[Proposal]:
        if self.incumbent is None:
            return [self._base()]
        return [
            Proposal(
                prompt=P.modify_prompt(self.task, self.incumbent),
                operator="modify",
                parent_ids=(self.incumbent.id,),
            )
        ]

    def observe(self, evaluated: Sequence[Candidate]) -> None:
        for c in evaluated:
            self.samples_seen += 1
            if not c.is_valid:
                continue
            if self.incumbent is None:
                self.incumbent = c
                continue
            delta = c.fitness.scalar - self.incumbent.fitness.scalar
            if sa_accept(delta, self.temperature, self.rng.random()):
                self.incumbent = c

    def state_snapshot(self) -> dict:
        snap = super().state_snapshot()
        snap["temperature"] = self.temperature
        return snap


class TabuStrategy(_IncumbentStrategy):
    """Move to any non-tabu neighbor; aspiration overrides the tabu list."""

    def __init__(self, config: MethodConfig, task: Task, budget: Budget) -> None:
        super().__init__(config, task, budget)
        self.tabu: deque[str] = deque(maxlen=config.tabu_len)
        self.global_best: Optional[Candidate] = None

    def seed(self, candidate: Candidate) -> None:
        super().seed(candidate)
        self.global_best = candidate
        self.tabu.append(candidate.normalized_hash)

    def propose(self) -> list[Proposal]:
        if self.incumbent is None:
            return [self._base()]
        return [
            Proposal(
                prompt=P.modify_prompt(self.task, self.incumbent),
                operator="modify",
                parent_ids=(self.incumbent.id,),
            )
        ]

    def observe(self, evaluated: Sequence[Candidate]) -> None:
        for c in evaluated:
            if not c.is_valid:
                continue
            best_fitness = self.global_best.fitness if self.global_best else None
            if not tabu_admissible(c, list(self.tabu), best_fitness):
                continue
            self.incumbent = c
            self.tabu.append(c.normalized_hash)
            if best_fitness is None or c.fitness.scalar < best_fitness.scalar:
                self.global_best = c

    def state_snapshot(self) -> dict:
        snap = super().state_snapshot()
        snap["tabu"] = list(self.tabu)
        return snap


class IlsStrategy(_IncumbentStrategy):
    """Iterated local search: perturb after ils_stall non-improving steps."""

    def __init__(self, config: MethodConfig, task: Task, budget: Budget) -> None:
        super().__init__(config, task, budget)
        self.stall = 0
        self._perturbing = False

    def propose(self) -> list[Proposal]:
        if self.incumbent is None:
            return [self._base()]
        if self.stall >= self.config.ils_stall:
            self._perturbing = True
            return [
                Proposal(
                    prompt=P.perturb_prompt(self.task, self.incumbent),
                    operator="perturb",
                    parent_ids=(self.incumbent.id,),
                )
            ]
        self._perturbing = False
        return [
            Proposal(
                prompt=P.modify_prompt(self.task, self.incumbent),
                operator="modify",
                parent_ids=(self.incumbent.id,),
            )
        ]

    def observe(self, evaluated: Sequence[Candidate]) -> None:
        for c in evaluated:
            if self._perturbing:
                if c.is_valid:  # restart from wherever the perturbation landed
                    self.incumbent = c
                    self.stall = 0
                continue
            if self._improves(c):
                self.incumbent = c
                self.stall = 0
            else:
                self.stall += 1

    def state_snapshot(self) -> dict:
        snap = super().state_snapshot()
        snap["stall"] = self.stall
        return snap


class VnsStrategy(_IncumbentStrategy):
    """Variable neighborhood search: escalate rewrite strength on failure."""

    def __init__(self, config: MethodConfig, task: Task, budget: Budget) -> None:
        super().__init__(config, task, budget)
        self.level = 1

    def propose(self) -> list[Proposal]:
        if self.incumbent is None:
            return [self._base()]
        return [
            Proposal(
                prompt=P.vns_prompt(self.task, self.incumbent, self.level),
                operator=f"vns_level_{self.level}",
                parent_ids=(self.incumbent.id,),
            )
        ]

    def observe(self, evaluated: Sequence[Candidate]) -> None:
        for c in evaluated:
            if self._improves(c):
                self.incumbent = c
                self.level = 1
            else:
                self.level = self.level + 1 if self.level < self.config.vns_levels else 1

    def state_snapshot(self) -> dict:
        snap = super().state_snapshot()
        snap["level"] = self.level
        return snap


EOH_OPERATORS = ("eoh_create", "eoh_combine", "eoh_modify", "eoh_tune")
_EOH_PARENT_COUNT = {"eoh_create": 2, "eoh_combine": 2, "eoh_modify": 1, "eoh_tune": 1}


class EohStrategy(Strategy):
    """Genetic population over idea+code pairs with four prompt operators."""

    def __init__(self, config: MethodConfig, task: Task, budget: Budget) -> None:
        super().__init__(config, task, budget)
        self.members: list[Candidate] = []

    def seed(self, candidate: Candidate) -> None:
        self.members = eoh_survivor_selection([candidate], [], self.config.pop_size)

    def _ranked(self) -> list[Candidate]:
        return sorted(self.members, key=candidate_order_key)

    def propose(self) -> list[Proposal]:
        if not self.members:
            return [self._base() for _ in EOH_OPERATORS]
        ranked = self._ranked()
        batch = []
        for operator in EOH_OPERATORS:
            parents = select_parents(ranked, _EOH_PARENT_COUNT[operator], self.rng)
            batch.append(
                Proposal(
                    prompt=P.eoh_prompt(self.task, operator, parents),
                    operator=operator,
                    parent_ids=tuple(c.id for c in parents),
                )
            )
        return batch

    def observe(self, evaluated: Sequence[Candidate]) -> None:
        self.members = eoh_survivor_selection(
            self.members, list(evaluated), self.config.pop_size
        )

    def state_snapshot(self) -> dict:
        return {
            "population": [
                {"id": c.id, "fitness": list(c.fitness.values)} for c in self._ranked()
            ]
        }


class FunSearchStrategy(Strategy):
    """Island model: per-prompt best-program ladders, periodic resets."""

    ISLAND_CAPACITY = 10
    PROMPT_VERSIONS = 2

    def __init__(self, config: MethodConfig, task: Task, budget: Budget) -> None:
        super().__init__(config, task, budget)
        self.islands = [
            Island(id=i, population=Population(capacity=self.ISLAND_CAPACITY))
            for i in range(config.num_islands)
        ]
        self.reset_period = max(1, budget.max_samples // 4)
        self.samples_seen = 0
        self._since_reset = 0
        self._current: Island = self.islands[0]

    def seed(self, candidate: Candidate) -> None:
        for island in self.islands:
            island.population.try_add(candidate)

    def propose(self) -> list[Proposal]:
        island = self.islands[self.rng.randrange(len(self.islands))]
        self._current = island
        count = self.config.samples_per_prompt
        if island.best is None:
            return [self._base() for _ in range(count)]
        ladder = sorted(island.population.members, key=candidate_order_key)
        shown = ladder[: self.PROMPT_VERSIONS][::-1]  # worse first, best last
        prompt = P.funsearch_prompt(self.task, shown)
        parent_ids = tuple(c.id for c in shown)
        return [
            Proposal(prompt=prompt, operator="funsearch", parent_ids=parent_ids)
            for _ in range(count)
        ]

    def observe(self, evaluated: Sequence[Candidate]) -> None:
        improved = False
        for c in evaluated:
            self.samples_seen += 1
            self._since_reset += 1
            if c.is_valid and self._current.population.try_add(c):
                improved = True
        self._current.staleness = 0 if improved else self._current.staleness + 1
        if self._since_reset >= self.reset_period and len(self.islands) >= 2:
            island_reset(self.islands, self.rng)
            self._since_reset = 0

    def state_snapshot(self) -> dict:
        return {
            "islands": [
                {
                    "id": isl.id,
                    "size": len(isl.population.members),
                    "best_fitness": (
                        list(isl.best.fitness.values) if isl.best else None
                    ),
                }
                for isl in self.islands
            ]
        }


def _dedup_earlier_wins(candidates: list[Candidate]) -> list[Candidate]:
    by_hash: dict[str, Candidate] = {}
    for c in sorted(candidates, key=lambda c: c.sample_index):
        by_hash.setdefault(c.normalized_hash, c)
    return list(by_hash.values())


def nsga2_survivors(pool: list[Candidate], capacity: int) -> list[Candidate]:
    """Environmental selection: fill by front rank, break by crowding."""
    pool = _dedup_earlier_wins([c for c in pool if c.is_valid])
    if len(pool) <= capacity:
        return sorted(pool, key=lambda c: c.sample_index)
    fronts = fast_nondominated_sort([c.fitness for c in pool])
    survivors: list[Candidate] = []
    for front in fronts:
        if len(survivors) + len(front) <= capacity:
            survivors.extend(pool[i] for i in front)
            continue
        distances = crowding_distance([pool[i].fitness for i in front])
        order = sorted(
            range(len(front)),
            key=lambda j: (-distances[j], pool[front[j]].sample_index),
        )
        for j in order[: capacity - len(survivors)]:
            survivors.append(pool[front[j]])
        break
    return sorted(survivors, key=lambda c: c.sample_index)


def nsga2_ranked(members: list[Candidate]) -> list[Candidate]:
    """Best-first ordering: front rank, then crowding distance."""
    if not members:
        return []
    fronts = fast_nondominated_sort([c.fitness for c in members])
    ranked: list[Candidate] = []
    for front in fronts:
        distances = crowding_distance([members[i].fitness for i in front])
        order = sorted(
            range(len(front)),
            key=lambda j: (-distances[j], members[front[j]].sample_index),
        )
        ranked.extend(members[front[j]] for j in order)
    return ranked


class MoEohStrategy(Strategy):
    """EoH offspring generation with non-dominated-sorting survival."""

    multi_objective = True

    def __init__(self, config: MethodConfig, task: Task, budget: Budget) -> None:
        super().__init__(config, task, budget)
        self.members: list[Candidate] = []

    def seed(self, candidate: Candidate) -> None:
        self.members = [candidate]

    def propose(self) -> list[Proposal]:
        if not self.members:
            return [self._base() for _ in EOH_OPERATORS]
        ranked = nsga2_ranked(self.members)
        batch = []
        for operator in EOH_OPERATORS:
            parents = select_parents(ranked, _EOH_PARENT_COUNT[operator], self.rng)
            batch.append(
                Proposal(
                    prompt=P.eoh_prompt(self.task, operator, parents),
                    operator=operator,
                    parent_ids=tuple(c.id for c in parents),
                )
            )
        return batch

    def observe(self, evaluated: Sequence[Candidate]) -> None:
        self.members = nsga2_survivors(
            self.members + list(evaluated), self.config.pop_size
        )

    def state_snapshot(self) -> dict:
        return {
            "population": [
                {"id": c.id, "fitness": list(c.fitness.values)} for c in self.members
            ]
        }


class MoeadStrategy(Strategy):
    """Decomposition into scalar subproblems along a weight lattice."""

    multi_objective = True

    def __init__(self, config: MethodConfig, task: Task, budget: Budget) -> None:
        super().__init__(config, task, budget)
        if config.pop_size < 2:
            raise ConfigError("moead needs pop_size >= 2 (one per weight vector)")
        self.weights = moead_weights(2, config.pop_size - 1)
        self.neighborhoods = weight_neighborhoods(
            self.weights, config.moead_neighbors
        )
        self.incumbents: list[Optional[Candidate]] = [None] * len(self.weights)
        self.z_star: Optional[list[float]] = None
        self.cursor = 0

    def seed(self, candidate: Candidate) -> None:
        self.incumbents = [candidate] * len(self.weights)
        self.z_star = update_ideal(self.z_star, candidate.fitness)

    def propose(self) -> list[Proposal]:
        i = self.cursor
        self.cursor = (self.cursor + 1) % len(self.weights)
        self._pending = i
        neighbor_incumbents = [
            self.incumbents[j] for j in self.neighborhoods[i] if self.incumbents[j]
        ]
        if not neighbor_incumbents:
            base = self._base()
            return [Proposal(base.prompt, f"moead_{i}", base.parent_ids)]
        parents = [
            neighbor_incumbents[self.rng.randrange(len(neighbor_incumbents))]
            for _ in range(2)
        ]
        if parents[0].id == parents[1].id:
            prompt = P.eoh_prompt(self.task, "eoh_modify", parents[:1])
            parent_ids: tuple[int, ...] = (parents[0].id,)
        else:
            prompt = P.eoh_prompt(self.task, "eoh_combine", parents)
            parent_ids = tuple(c.id for c in parents)
        return [Proposal(prompt=prompt, operator=f"moead_{i}", parent_ids=parent_ids)]

    def observe(self, evaluated: Sequence[Candidate]) -> None:
        i = getattr(self, "_pending", (self.cursor - 1) % len(self.weights))
        for c in evaluated:
            if not c.is_valid:
                continue
            self.z_star = update_ideal(self.z_star, c.fitness)
            if all(slot is None for slot in self.incumbents):
                self.incumbents = [c] * len(self.weights)
                continue
            replaced = moead_update(
                [slot.fitness if slot else None for slot in self.incumbents],
                c.fitness,
                self.neighborhoods[i],
                self.weights,
                self.z_star,
            )
            for j in replaced:
                self.incumbents[j] = c

    def state_snapshot(self) -> dict:
        return {
            "z_star": self.z_star,
            "incumbents": [
                {"id": c.id, "fitness": list(c.fitness.values)} if c else None
                for c in self.incumbents
            ],
        }


STRATEGIES = {
    "random_sampling": RandomSamplingStrategy,
    "one_plus_one_eps": OnePlusOneStrategy,
    "sa": SaStrategy,
    "tabu": TabuStrategy,
    "ils": IlsStrategy,
    "vns": VnsStrategy,
    "eoh": EohStrategy,
    "funsearch": FunSearchStrategy,
    "moeoh_nsga2": MoEohStrategy,
    "moead": MoeadStrategy,
}


def build_strategy(config: MethodConfig, task: Task, budget: Budget) -> Strategy:
    try:
        factory = STRATEGIES[config.method]
    except KeyError:
        raise ConfigError(f"unknown method {config.method!r}") from None
    return factory(config, task, budget)
