"""Multi-objective selection machinery: Pareto fronts, crowding, decomposition."""

from __future__ import annotations

import math
from typing import Optional, Sequence

from ..core import ContractViolation, FitnessVector, dominates

WEIGHT_EPS = 1e-6  # zero weights are lifted here so no subproblem degenerates


def fast_nondominated_sort(points: Sequence[FitnessVector]) -> list[list[int]]:
    """Partition indices into Pareto fronts (front 0 = non-dominated set)."""
    n = len(points)
    if n == 0:
        return []
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    domination_count = [0] * n
    fronts: list[list[int]] = [[]]
    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            if dominates(points[p], points[q]):
                dominated_by[p].append(q)
            elif dominates(points[q], points[p]):
                domination_count[p] += 1
        if domination_count[p] == 0:
            fronts[0].append(p)
    i = 0
    while fronts[i]:
        nxt: list[int] = []
        for p in fronts[i]:
            for q in dominated_by[p]:
                domination_count[q] -= 1
                if domination_count[q] == 0:
                    nxt.append(q)
        nxt.sort()
        fronts.append(nxt)
        i += 1
    fronts.pop()
    return fronts


def crowding_distance(front: Sequence[FitnessVector]) -> list[float]:
    """Density estimate per front member; boundary points get +inf."""
    n = len(front)
    if n == 0:
        return []
    m = len(front[0])
    distances = [0.0] * n
    for k in range(m):
        order = sorted(range(n), key=lambda i: front[i][k])
        distances[order[0]] = math.inf
        distances[order[-1]] = math.inf
        span = front[order[-1]][k] - front[order[0]][k]
        if span <= 0.0:
            continue  # zero range contributes nothing
        for pos in range(1, n - 1):
            i = order[pos]
            if distances[i] == math.inf:
                continue
            gap = front[order[pos + 1]][k] - front[order[pos - 1]][k]
            distances[i] += gap / span
    return distances


def moead_weights(m: int, h: int) -> list[tuple[float, ...]]:
    """Simplex-lattice weight vectors; bi-objective only (h+1 vectors)."""
    if m != 2:
        raise ContractViolation("decomposition weights support exactly 2 objectives")
    if h < 1:
        raise ContractViolation("lattice parameter must be >= 1")
    return [(i / h, 1.0 - i / h) for i in range(h + 1)]


def tchebycheff(
    f: FitnessVector, w: Sequence[float], z_star: Sequence[float]
) -> float:
    """Weighted Chebyshev distance to the ideal point z*."""
    if not (len(f) == len(w) == len(z_star)):
        raise ContractViolation("tchebycheff requires equal-length inputs")
    best = -math.inf
    for fi, wi, zi in zip(f, w, z_star):
        weight = wi if wi > 0.0 else WEIGHT_EPS
        best = max(best, weight * abs(fi - zi))
    return best


def weight_neighborhoods(
    weights: Sequence[Sequence[float]], size: int
) -> list[list[int]]:
    """For each weight vector, the indices of its ``size`` nearest vectors."""
    size = min(size, len(weights))
    out = []
    for i, wi in enumerate(weights):
        ranked = sorted(
            range(len(weights)),
            key=lambda j: (sum((a - b) ** 2 for a, b in zip(wi, weights[j])), j),
        )
        out.append(ranked[:size])
    return out


def update_ideal(z_star: Optional[list[float]], f: FitnessVector) -> list[float]:
    """Componentwise running minimum of observed fitness."""
    if z_star is None:
        return list(f)
    if len(z_star) != len(f):
        raise ContractViolation("ideal point length mismatch")
    return [min(z, v) for z, v in zip(z_star, f)]


def moead_update(
    incumbents: list[Optional[FitnessVector]],
    offspring: FitnessVector,
    neighbor_indices: Sequence[int],
    weights: Sequence[Sequence[float]],
    z_star: Sequence[float],
    max_replacements: int = 2,
) -> list[int]:
    """Replace neighbor incumbents the offspring strictly improves.

    Returns the indices replaced (the caller swaps in the offspring
    candidate there). At most ``max_replacements`` subproblems change per
    offspring; an empty incumbent slot counts as a replacement.
    """
    replaced: list[int] = []
    for j in neighbor_indices:
        if len(replaced) >= max_replacements:
            break
        incumbent = incumbents[j]
        if incumbent is not None:
            new_value = tchebycheff(offspring, weights[j], z_star)
            old_value = tchebycheff(incumbent, weights[j], z_star)
            if not new_value < old_value:
                continue
        replaced.append(j)
    return replaced
