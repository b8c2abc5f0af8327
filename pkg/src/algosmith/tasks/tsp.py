"""Traveling salesman: evolve the next-node priority for greedy construction.

The tour starts at node 0. At each step the candidate scores every
unvisited node from a few scalar features; the highest-scoring node is
visited next (ties to the lowest index) and the tour closes back to the
start. Fitness is the mean closed-tour length, minimized.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from ..core import ContractViolation
from .base import CandidateFn, Task

TEMPLATE = '''def priority(dist: scalar, dist_back: scalar, remaining: scalar):
    """Score one unvisited city as the next stop of a growing tour.

    dist: distance from the current city to the candidate city.
    dist_back: distance from the candidate city back to the starting city.
    remaining: how many cities would still be unvisited after this move.

    The candidate city with the highest score is visited next. Return a
    number; larger means more preferred.
    """
    return -dist
'''


@dataclass(frozen=True)
class TspInstance:
    coords: tuple[tuple[float, float], ...]
    distances: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.coords)
        if n < 3:
            raise ContractViolation("TSP instance needs at least 3 nodes")
        if len(self.distances) != n or any(len(row) != n for row in self.distances):
            raise ContractViolation("distance matrix shape must match coords")


def instance_from_coords(coords: list[tuple[float, float]]) -> TspInstance:
    n = len(coords)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            dx = coords[i][0] - coords[j][0]
            dy = coords[i][1] - coords[j][1]
            row.append(math.hypot(dx, dy))
        rows.append(tuple(row))
    return TspInstance(coords=tuple(coords), distances=tuple(rows))


def build_tour(fn: CandidateFn, instance: TspInstance) -> list[int]:
    """Greedy construction from node 0; returns the visit order."""
    n = len(instance.coords)
    d = instance.distances
    unvisited = list(range(1, n))
    tour = [0]
    current = 0
    while unvisited:
        best_node = -1
        best_score = -math.inf
        left_after = len(unvisited) - 1
        for node in unvisited:
            score = float(fn(d[current][node], d[node][0], float(left_after)))
            if score > best_score:
                best_score = score
                best_node = node
        unvisited.remove(best_node)
        tour.append(best_node)
        current = best_node
    return tour


def tour_length(tour: list[int], instance: TspInstance) -> float:
    d = instance.distances
    total = 0.0
    for a, b in zip(tour, tour[1:]):
        total += d[a][b]
    return total + d[tour[-1]][tour[0]]


class TspTask(Task):
    id = "tsp_construct"
    description = (
        "Design a constructive heuristic for the traveling salesman problem: "
        "starting from a fixed city, repeatedly pick the next city to visit "
        "until the closed tour is complete. Shorter tours are better."
    )
    template_source = TEMPLATE
    nodes_per_instance = 50

    def generate_instances(self, seed: int, count: int) -> list[TspInstance]:
        if count < 1:
            raise ContractViolation("instance count must be >= 1")
        rng = random.Random(seed)
        out = []
        for _ in range(count):
            coords = [
                (rng.random(), rng.random()) for _ in range(self.nodes_per_instance)
            ]
            out.append(instance_from_coords(coords))
        return out

    def score_instance(self, fn: CandidateFn, instance: TspInstance) -> float:
        tour = build_tour(fn, instance)
        if sorted(tour) != list(range(len(instance.coords))):
            raise ContractViolation("constructed tour is not a permutation")
        return tour_length(tour, instance)
