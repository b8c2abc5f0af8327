"""Online bin packing: evolve the bin-priority function.

Items arrive one at a time and must be placed immediately. The candidate
scores every feasible open bin; the item goes to the highest-scoring one
(ties to the lowest bin index) or opens a new bin when none fits. The
per-instance score is the excess-bin ratio against the total-size lower
bound, so 0.0 means the packing matched the bound.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from ..core import ContractViolation
from .base import CandidateFn, Task

TEMPLATE = '''def priority(item: scalar, remaining: scalar):
    """Score one feasible open bin for the next item in online bin packing.

    item: size of the item that must be placed now (1 <= item <= capacity).
    remaining: free capacity of the candidate bin (remaining >= item).

    The item is placed into the feasible bin with the highest score; if no
    open bin can take it, a new bin is opened. Return a number; larger
    means more preferred.
    """
    return item - remaining
'''


@dataclass(frozen=True)
class ObpInstance:
    capacity: int
    item_sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.item_sizes:
            raise ContractViolation("bin-packing instance needs at least one item")
        if any(s < 1 or s > self.capacity for s in self.item_sizes):
            raise ContractViolation("item sizes must lie in [1, capacity]")

    @property
    def lower_bound(self) -> int:
        return math.ceil(sum(self.item_sizes) / self.capacity)


def pack_online(fn: CandidateFn, instance: ObpInstance) -> list[int]:
    """Simulate online placement; returns the remaining capacity per bin."""
    bins: list[int] = []
    for item in instance.item_sizes:
        best_idx = -1
        best_score = -math.inf
        for idx, free in enumerate(bins):
            if free < item:
                continue
            score = float(fn(float(item), float(free)))
            if score > best_score:
                best_score = score
                best_idx = idx
        if best_idx < 0:
            bins.append(instance.capacity - item)
        else:
            bins[best_idx] -= item
    return bins


class ObpTask(Task):
    id = "obp"
    description = (
        "Design a priority function for online bin packing: items of known "
        "size arrive one at a time and each must immediately go into an open "
        "bin with enough free capacity, or a new bin. Fewer bins is better."
    )
    template_source = TEMPLATE
    default_capacity = 100
    items_per_instance = 500

    def generate_instances(self, seed: int, count: int) -> list[ObpInstance]:
        if count < 1:
            raise ContractViolation("instance count must be >= 1")
        rng = random.Random(seed)
        cap = self.default_capacity
        return [
            ObpInstance(
                capacity=cap,
                item_sizes=tuple(
                    rng.randint(1, cap) for _ in range(self.items_per_instance)
                ),
            )
            for _ in range(count)
        ]

    def score_instance(self, fn: CandidateFn, instance: ObpInstance) -> float:
        bins = pack_online(fn, instance)
        return len(bins) / instance.lower_bound - 1.0
