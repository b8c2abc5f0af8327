from __future__ import annotations

import math
import random

import pytest

from algosmith.codekit import parse_dsl_function
from algosmith.core import ContractViolation
from algosmith.tasks import (
    ObpInstance,
    SrDataset,
    complexity_objective,
    generate_instances,
    get_task,
    list_tasks,
    sr_rmse,
)
from algosmith.tasks.obp import pack_online
from algosmith.tasks.sr import SrRow
from algosmith.tasks.tsp import build_tour, instance_from_coords, tour_length


def best_fit(item, remaining):
    return item - remaining  # tightest feasible bin wins


class TestRegistry:
    def test_built_in_tasks(self):
        assert list_tasks() == ["obp", "sr_growth", "tsp_construct"]

    def test_unknown_task(self):
        from algosmith.core import ConfigError

        with pytest.raises(ConfigError, match="obp"):
            get_task("nope")

    def test_templates_parse(self):
        for task_id in list_tasks():
            template = get_task(task_id).template
            assert template.docstring
            assert template.params


class TestObp:
    def test_seven_threes_capacity_eight(self):
        # 7 items of size 3, capacity 8: best fit packs pairs -> 4 bins
        # against the size lower bound ceil(21/8)=3, so score 4/3 - 1 = 1/3.
        instance = ObpInstance(capacity=8, item_sizes=(3,) * 7)
        score = get_task("obp").score_instance(best_fit, instance)
        assert abs(score - 1.0 / 3.0) <= 1e-9

    def test_perfect_packing_scores_zero(self):
        instance = ObpInstance(capacity=10, item_sizes=(6, 4, 6, 4))
        score = get_task("obp").score_instance(best_fit, instance)
        assert score == 0.0

    def test_empty_items_rejected(self):
        with pytest.raises(ContractViolation):
            ObpInstance(capacity=10, item_sizes=())

    def test_oversized_item_rejected(self):
        with pytest.raises(ContractViolation):
            ObpInstance(capacity=10, item_sizes=(11,))

    def test_ties_go_to_lowest_bin_index(self):
        # Constant priority: every feasible bin ties, so the first fits.
        instance = ObpInstance(capacity=10, item_sizes=(2, 2, 2))
        bins = pack_online(lambda item, remaining: 0.0, instance)
        assert bins == [4]

    def test_lower_bound_never_beaten(self):
        rng = random.Random(5)
        task = get_task("obp")
        for _ in range(10):
            sizes = tuple(rng.randint(1, 40) for _ in range(60))
            instance = ObpInstance(capacity=40, item_sizes=sizes)
            worst = task.score_instance(lambda i, r: rng.random(), instance)
            assert worst >= 0.0

    def test_default_generation_sizes_in_range(self):
        instances = generate_instances("obp", seed=11, count=8)
        assert len(instances) == 8
        for inst in instances:
            assert len(inst.item_sizes) == 500
            assert all(1 <= s <= 100 for s in inst.item_sizes)


class TestTsp:
    def test_unit_square_corners(self):
        instance = instance_from_coords([(0, 0), (0, 1), (1, 1), (1, 0)])
        score = get_task("tsp_construct").score_instance(
            lambda dist, dist_back, remaining: -dist, instance
        )
        assert abs(score - 4.0) <= 1e-9

    def test_three_collinear_nodes_any_priority(self):
        instance = instance_from_coords([(0, 0), (1, 0), (2, 0)])
        task = get_task("tsp_construct")
        for fn in (
            lambda d, b, r: -d,
            lambda d, b, r: d,
            lambda d, b, r: 0.0,
        ):
            assert abs(task.score_instance(fn, instance) - 4.0) <= 1e-9

    def test_length_matches_independent_recomputation(self):
        rng = random.Random(17)
        coords = [(rng.random(), rng.random()) for _ in range(8)]
        instance = instance_from_coords(coords)
        tour = build_tour(lambda d, b, r: -d, instance)
        assert sorted(tour) == list(range(8))
        expected = 0.0
        for a, b in zip(tour, tour[1:] + tour[:1]):
            expected += math.dist(coords[a], coords[b])
        assert abs(tour_length(tour, instance) - expected) <= 1e-9

    def test_distance_matrix_consistent(self):
        instance = generate_instances("tsp_construct", seed=3, count=1)[0]
        n = len(instance.coords)
        for i in range(n):
            assert instance.distances[i][i] == 0.0
            for j in range(n):
                assert abs(
                    instance.distances[i][j] - math.dist(instance.coords[i], instance.coords[j])
                ) <= 1e-9
                assert instance.distances[i][j] == instance.distances[j][i]

    def test_tours_are_permutations_for_odd_priorities(self):
        instance = generate_instances("tsp_construct", seed=9, count=1)[0]
        for fn in (lambda d, b, r: math.sin(d * 50), lambda d, b, r: b - d):
            tour = build_tour(fn, instance)
            assert sorted(tour) == list(range(len(instance.coords)))


class TestSr:
    def _rows(self):
        return [SrRow(inputs=(float(x),), target=2.0 * x) for x in (1, 2, 3)]

    def test_exact_recovery(self):
        assert sr_rmse(lambda x: 2.0 * x, self._rows()) == 0.0

    def test_known_rmse(self):
        # candidate "x": residuals 1, 2, 3 -> RMSE sqrt(14/3)
        got = sr_rmse(lambda x: x, self._rows())
        assert abs(got - math.sqrt(14.0 / 3.0)) <= 1e-12

    def test_ground_truth_scores_exactly_zero(self):
        task = get_task("sr_growth")
        fn = parse_dsl_function(
            "def growth(n, s):\n    return 1.2 * (s / (s + 0.5)) * n * (1 - n / 10)\n"
        )
        scores = [
            task.score_instance(lambda *args: fn(dict(zip(fn.params, args))), row)
            for row in task.instances()
        ]
        assert task.aggregate(scores) == 0.0

    def test_protected_candidate_is_finite(self):
        task = get_task("sr_growth")
        fn = parse_dsl_function("def growth(n, s):\n    return n / 0\n")
        value = task.aggregate(
            [
                task.score_instance(lambda *a: fn(dict(zip(fn.params, a))), row)
                for row in task.instances()
            ]
        )
        assert math.isfinite(value)

    def test_dataset_invariants(self):
        task = get_task("sr_growth")
        dataset = task.dataset()
        assert len(dataset.rows) == 64
        with pytest.raises(ContractViolation):
            SrDataset(rows=tuple(self._rows()), variable_names=("x",))


class TestGenerateInstances:
    @pytest.mark.parametrize("task_id", ["obp", "tsp_construct", "sr_growth"])
    def test_deterministic(self, task_id):
        a = generate_instances(task_id, seed=42, count=3)
        b = generate_instances(task_id, seed=42, count=3)
        assert a == b

    @pytest.mark.parametrize("task_id", ["obp", "tsp_construct", "sr_growth"])
    def test_seed_changes_instances(self, task_id):
        a = generate_instances(task_id, seed=1, count=3)
        b = generate_instances(task_id, seed=2, count=3)
        assert a != b

    def test_count_validated(self):
        with pytest.raises(ContractViolation):
            generate_instances("obp", seed=1, count=0)


class TestComplexity:
    def test_dsl_node_count(self):
        assert complexity_objective("def f(a, b):\n    return a + b\n") == 3.0
        assert complexity_objective("def f(a):\n    return a\n") == 1.0

    def test_opaque_code_token_count(self):
        code = "def f(a):\n    while a:\n        a -= 1\n    return a\n"
        assert complexity_objective(code) == float(len("def f(a): while a: a -= 1 return a".split()))

    def test_normalize_equal_codes_equal_complexity(self):
        a = "def f(a, b):\n    return a + b  # sum\n"
        b = "def f(a, b):\n        return a + b\n"
        assert complexity_objective(a) == complexity_objective(b)
