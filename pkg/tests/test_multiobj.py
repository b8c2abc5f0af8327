from __future__ import annotations

import math
import random

import pytest

from algosmith.core import ContractViolation, FitnessVector, dominates
from algosmith.search import (
    crowding_distance,
    fast_nondominated_sort,
    moead_update,
    moead_weights,
    tchebycheff,
    update_ideal,
    weight_neighborhoods,
)


def fv(*values):
    return FitnessVector(values)


def brute_force_fronts(points):
    """Peeling oracle: repeatedly remove the currently non-dominated set."""
    remaining = list(range(len(points)))
    fronts = []
    while remaining:
        front = [
            i
            for i in remaining
            if not any(dominates(points[j], points[i]) for j in remaining if j != i)
        ]
        fronts.append(sorted(front))
        remaining = [i for i in remaining if i not in front]
    return fronts


class TestFastNondominatedSort:
    def test_simple_two_fronts(self):
        fronts = fast_nondominated_sort([fv(1, 2), fv(2, 1), fv(3, 3)])
        assert fronts == [[0, 1], [2]]

    def test_single_point(self):
        assert fast_nondominated_sort([fv(1, 1)]) == [[0]]

    def test_empty(self):
        assert fast_nondominated_sort([]) == []

    def test_matches_brute_force_oracle(self):
        rng = random.Random(123)
        for _ in range(200):
            m = rng.choice([2, 3])
            n = rng.randint(1, 64)
            points = [
                fv(*(rng.randint(0, 8) for _ in range(m))) for _ in range(n)
            ]
            got = [sorted(front) for front in fast_nondominated_sort(points)]
            assert got == brute_force_fronts(points)

    def test_partition_property(self):
        rng = random.Random(7)
        points = [fv(rng.random(), rng.random()) for _ in range(40)]
        fronts = fast_nondominated_sort(points)
        flat = sorted(i for front in fronts for i in front)
        assert flat == list(range(40))
        for k, front in enumerate(fronts):
            later = [i for f in fronts[k:] for i in f]
            for i in front:
                assert not any(
                    dominates(points[j], points[i]) for j in later if j != i
                )


class TestCrowdingDistance:
    def test_boundary_and_interior(self):
        distances = crowding_distance([fv(1, 3), fv(2, 2), fv(3, 1)])
        assert distances[0] == math.inf
        assert distances[2] == math.inf
        assert distances[1] == pytest.approx(2.0)

    def test_two_points_both_infinite(self):
        assert crowding_distance([fv(1, 2), fv(2, 1)]) == [math.inf, math.inf]

    def test_identical_points_zero_interior(self):
        distances = crowding_distance([fv(1, 1)] * 4)
        assert sorted(distances)[:2] == [0.0, 0.0]


class TestMoeadWeights:
    def test_lattice(self):
        assert moead_weights(2, 4) == [
            (0.0, 1.0),
            (0.25, 0.75),
            (0.5, 0.5),
            (0.75, 0.25),
            (1.0, 0.0),
        ]

    def test_h_one(self):
        assert moead_weights(2, 1) == [(0.0, 1.0), (1.0, 0.0)]

    def test_sum_to_one(self):
        for w in moead_weights(2, 13):
            assert w[0] + w[1] == pytest.approx(1.0)

    def test_three_objectives_unsupported(self):
        with pytest.raises(ContractViolation):
            moead_weights(3, 4)


class TestTchebycheff:
    def test_direct_formula(self):
        assert tchebycheff(fv(2, 4), (0.5, 0.5), (1, 1)) == pytest.approx(1.5)

    def test_ideal_point_is_zero(self):
        assert tchebycheff(fv(3, 7), (0.4, 0.6), (3, 7)) == 0.0

    def test_zero_weight_epsilon(self):
        value = tchebycheff(fv(2, 9), (1.0, 0.0), (1, 1))
        assert value == pytest.approx(max(1.0 * 1.0, 1e-6 * 8.0))


class TestIdealPoint:
    def test_componentwise_running_min(self):
        z = update_ideal(None, fv(1, 5))
        z = update_ideal(z, fv(4, 0))
        assert z == [1.0, 0.0]


class TestNeighborhoods:
    def test_self_is_nearest(self):
        weights = moead_weights(2, 9)
        hoods = weight_neighborhoods(weights, 3)
        for i, hood in enumerate(hoods):
            assert hood[0] == i
            assert len(hood) == 3


class TestMoeadUpdate:
    def test_replacement_cap(self):
        incumbents = [fv(5, 5)] * 4
        replaced = moead_update(
            incumbents,
            fv(0, 0),
            neighbor_indices=[0, 1, 2, 3],
            weights=[(0.25, 0.75)] * 4,
            z_star=[0, 0],
        )
        assert len(replaced) == 2

    def test_no_replacement_when_worse(self):
        incumbents = [fv(0, 0)] * 3
        replaced = moead_update(
            incumbents,
            fv(5, 5),
            neighbor_indices=[0, 1, 2],
            weights=[(0.5, 0.5)] * 3,
            z_star=[0, 0],
        )
        assert replaced == []

    def test_strict_improvement_required(self):
        incumbents = [fv(2, 2)]
        replaced = moead_update(
            incumbents, fv(2, 2), [0], [(0.5, 0.5)], z_star=[0, 0]
        )
        assert replaced == []
