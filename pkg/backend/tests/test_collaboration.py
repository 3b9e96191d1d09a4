import itertools
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from app.core.config import get_settings
from app.core.errors import DelegationError, NoEligibleTree, NoExecutableTree
from app.models.foon import FunctionalUnit, MotionNode, ObjectNode
from app.models.inventory import RobotProfile
from app.models.plan import Executor, TaskTree
from app.services.collaboration import (
    assign_human_steps,
    best_plan,
    describe_plan,
    joint_success,
    max_delegable,
    optimal_m,
    product,
    rank_trees,
    sweep,
    unit_rate,
)
from app.services.foon_parser import parse_object_spec, read_kitchen_file, read_profile_file, read_subgraph_file
from app.services.network import merge
from app.services.retrieval import retrieve_all


def chain(rates, start_id=1, tag="s"):
    """A linear tree with one unit per rate; returns the tree and a matching profile."""
    units = tuple(
        FunctionalUnit(
            id=start_id + i,
            inputs=[ObjectNode(label=f"{tag}{i}")],
            outputs=[ObjectNode(label=f"{tag}{i + 1}")],
            motion=MotionNode(label=f"step{i}"),
        )
        for i in range(len(rates))
    )
    goal = ObjectNode(label=f"{tag}{len(rates)}")
    return TaskTree(goal=goal, units=units), {u.id: r for u, r in zip(units, rates)}


def by_ids(trees, ids):
    return next(t for t in trees if t.unit_set == frozenset(ids))


# mashed potato: two paths sharing the mash step


def test_potato_m0(potato_trees, potato_profile):
    best = best_plan(potato_trees, potato_profile, 0)
    assert best.plan.tree.unit_set == {1, 2, 3}
    assert best.plan.total_success == pytest.approx(0.285, abs=1e-9)
    assert best.plan.human_count == 0


def test_potato_m1(potato_trees, potato_profile):
    best = best_plan(potato_trees, potato_profile, 1)
    assert best.plan.tree.unit_set == {3, 4, 5}
    assert best.plan.total_success == pytest.approx(0.8075, abs=1e-9)
    assert best.alternatives[1].total_success == pytest.approx(0.7125, abs=1e-9)
    human = [s.unit.motion.label for s in best.plan.steps if s.executor is Executor.HUMAN]
    assert human == ["microwave"]


def test_potato_m2_two_co_optimal_plans(potato_trees, potato_profile):
    best = best_plan(potato_trees, potato_profile, 2)
    assert len(best.co_optimal) == 2
    assert all(p.total_success == pytest.approx(0.95, abs=1e-9) for p in best.co_optimal)
    # equal length, so the lexicographically smaller id set wins
    assert best.plan.tree.unit_set == {1, 2, 3}


def test_potato_m_beyond_every_tree(potato_trees, potato_profile):
    with pytest.raises(NoEligibleTree, match="M exceeds all tree lengths"):
        best_plan(potato_trees, potato_profile, 3)


def test_potato_optimal_m(potato_trees, potato_profile):
    assert optimal_m(potato_trees, potato_profile) == 2
    assert optimal_m(potato_trees, potato_profile, epsilon=0.2) == 1
    assert optimal_m(potato_trees, potato_profile, epsilon=0.9) == 0


def test_optimal_m_rejects_bad_epsilon(potato_trees, potato_profile):
    with pytest.raises(DelegationError):
        optimal_m(potato_trees, potato_profile, epsilon=0)


# tea and single stir unit


def test_tea_totals(tea_trees, tea_profile):
    assert best_plan(tea_trees, tea_profile, 0).plan.total_success == pytest.approx(6.859e-5, abs=1e-9)
    assert best_plan(tea_trees, tea_profile, 3).plan.total_success == pytest.approx(0.6859, abs=1e-9)


def test_tea_delegates_the_weakest_steps(tea_trees, tea_profile):
    plan = assign_human_steps(tea_trees[0], tea_profile, 3)
    human = sorted(s.unit.motion.label for s in plan.steps if s.executor is Executor.HUMAN)
    assert human == ["heat", "scoop", "stir"]


def test_tea_tie_break_prefers_lower_id(tea_trees, tea_profile):
    # scoop (5) and stir (6) share the rate 0.1
    plan = assign_human_steps(tea_trees[0], tea_profile, 2)
    human = sorted(s.unit.id for s in plan.steps if s.executor is Executor.HUMAN)
    assert human == [3, 5]


def test_stir_scores_075(fixtures_dir):
    foon = merge([read_subgraph_file(fixtures_dir / "stir.txt")])
    profile = read_profile_file(fixtures_dir / "stir_profile.json")
    goal = parse_object_spec("tea cup{contains,stirred}[sugar,tea]")
    trees = retrieve_all(foon, goal, read_kitchen_file(fixtures_dir / "stir_kitchen.txt"))
    assert len(trees) == 1
    assert joint_success(trees[0], profile) == pytest.approx(0.75, abs=1e-12)
    assert best_plan(trees, profile, 0).plan.total_success == pytest.approx(0.75, abs=1e-12)


# rates and assignment


def test_rate_lookup_precedence():
    profile = RobotProfile(default=0.5, motions={"stir": 0.75}, units={7: 0.2})
    stir = FunctionalUnit(
        id=7, inputs=[ObjectNode(label="a")], outputs=[ObjectNode(label="b")], motion=MotionNode(label="Stir")
    )
    assert unit_rate(profile, stir) == 0.2
    assert unit_rate(profile, stir.model_copy(update={"id": 8})) == 0.75
    assert unit_rate(profile, stir.model_copy(update={"id": 8, "motion": MotionNode(label="pour")})) == 0.5


def test_assignment_bounds():
    tree, rates = chain([0.5, 0.6, 0.7])
    profile = RobotProfile(default=1.0, units=rates)
    assert max_delegable(tree) == 2
    with pytest.raises(DelegationError, match="non-negative"):
        assign_human_steps(tree, profile, -1)
    with pytest.raises(DelegationError, match="entire task"):
        assign_human_steps(tree, profile, 3)
    assert assign_human_steps(tree, profile, 2).human_count == 2


def test_empty_tree_only_at_m0():
    tree = TaskTree(goal=ObjectNode(label="toast"))
    profile = RobotProfile(default=0.9)
    plan = assign_human_steps(tree, profile, 0)
    assert plan.total_success == 1.0
    assert plan.vacuous
    with pytest.raises(DelegationError):
        assign_human_steps(tree, profile, 1)


def test_impaired_assistant_only_takes_steps_it_does_better():
    tree, rates = chain([0.9, 0.4, 0.6])
    profile = RobotProfile(default=1.0, units=rates, assistant=0.5)
    plan = assign_human_steps(tree, profile, 2)
    assert plan.human_count == 1
    assert plan.rates == (0.9, 0.5, 0.6)
    assert plan.total_success == pytest.approx(0.9 * 0.5 * 0.6)


def test_assignment_matches_brute_force_on_random_trees():
    rnd = random.Random(5)
    for _ in range(50):
        n = rnd.randint(1, 12)
        rates = [rnd.uniform(0.01, 1.0) for _ in range(n)]
        if rnd.random() < 0.3:
            rates[rnd.randrange(n)] = rates[0]
        tree, unit_rates = chain(rates)
        profile = RobotProfile(default=1.0, units=unit_rates)
        for m in range(n):
            plan = assign_human_steps(tree, profile, m)
            brute = max(
                math.prod(1.0 if i in chosen else r for i, r in enumerate(rates))
                for chosen in map(set, itertools.combinations(range(n), m))
            )
            assert abs(plan.total_success - brute) <= 1e-12
            assert plan.human_count == m


def test_best_plan_needs_trees(potato_profile):
    with pytest.raises(NoExecutableTree):
        best_plan([], potato_profile, 0)


# sweep


def test_tea_sweep(tea_trees, tea_profile):
    report = sweep(tea_trees, tea_profile)
    assert [e.m for e in report.entries] == [0, 1, 2, 3, 4, 5]
    assert report.success(0) == pytest.approx(6.859e-5, abs=1e-9)
    assert report.success(3) == pytest.approx(0.6859, abs=1e-9)
    assert not any(e.drop_flag for e in report.entries)


@pytest.mark.parametrize("name", ["potato", "tea"])
def test_per_tree_success_is_monotone(request, name):
    trees = request.getfixturevalue(f"{name}_trees")
    profile = request.getfixturevalue(f"{name}_profile")
    for tree in trees:
        scores = [assign_human_steps(tree, profile, m).total_success for m in range(max_delegable(tree) + 1)]
        assert all(b >= a for a, b in zip(scores, scores[1:]))


def test_drop_when_the_short_tree_drops_out():
    short, short_rates = chain([0.9] * 3, start_id=1, tag="a")
    long, long_rates = chain([0.5] * 8, start_id=10, tag="a")
    goal = ObjectNode(label="dish")
    short = TaskTree(goal=goal, units=short.units)
    long = TaskTree(goal=goal, units=long.units)
    profile = RobotProfile(default=1.0, units={**short_rates, **long_rates})

    report = sweep([short, long], profile)
    assert len(report.entries) == 8
    assert [e.drop_flag for e in report.entries] == [False, False, False, True, False, False, False, False]
    drop = report.entries[3]
    assert drop.tree_changed
    assert drop.best_success == pytest.approx(0.5**5)
    assert report.success(2) == pytest.approx(0.9)


def test_sweep_past_every_tree_leaves_absent_rows(potato_trees, potato_profile):
    report = sweep(potato_trees, potato_profile, max_m=4)
    assert [e.absent for e in report.entries] == [False, False, False, True, True]
    table = report.to_table().splitlines()
    assert table[0] == "m\tbest_success\tbest_tree_ids\ttree_changed\tdrop_flag"
    assert table[1] == "0\t0.285\t1,2,3\t0\t0"
    assert table[2].startswith("1\t0.8075\t5,4,3\t1\t")
    assert table[4] == "3\t\t\t0\t0"
    assert len(table) == 6


def test_sweep_frame_columns(potato_trees, potato_profile):
    frame = sweep(potato_trees, potato_profile).to_frame()
    assert list(frame.columns) == ["m", "best_success", "best_tree_ids", "tree_changed", "drop_flag"]
    assert frame["best_success"].is_monotonic_increasing


# ranking and rendering


def test_rank_trees(potato_trees, potato_profile):
    by_success = rank_trees(potato_trees, potato_profile, by="success")
    assert [t.unit_set for t in by_success] == [{1, 2, 3}, {3, 4, 5}]
    by_length = rank_trees(list(reversed(potato_trees)), by="length")
    assert [t.sorted_ids for t in by_length] == [(1, 2, 3), (3, 4, 5)]
    with pytest.raises(DelegationError):
        rank_trees(potato_trees, None, by="success")


def test_describe_plan(potato_trees, potato_profile):
    plan = best_plan(potato_trees, potato_profile, 1).plan
    lines = describe_plan(plan)
    assert len(lines) == 3
    assert lines[0].startswith("1. [ROBOT 85.00%] peel")
    assert lines[1] == "2. [HUMAN] Please microwave potato{peeled}, microwave to obtain potato{cooked}. (unit 4)"
    assert lines[2].endswith("(unit 3)")


def test_joint_success_of_potato_paths(potato_trees, potato_profile):
    assert joint_success(by_ids(potato_trees, {1, 2, 3}), potato_profile) == pytest.approx(0.285)
    assert joint_success(by_ids(potato_trees, {3, 4, 5}), potato_profile) == pytest.approx(0.008075)


# numerics

rate = st.floats(min_value=1e-3, max_value=1.0)


@given(st.lists(rate, min_size=1, max_size=64))
def test_log_space_product_matches_direct_product(rates):
    assert abs(product(rates) - math.prod(rates)) <= 1e-12


def test_product_underflow_is_a_delegation_error():
    tree, rates = chain([1e-200, 1e-200])
    profile = RobotProfile(default=1.0, units=rates)
    with pytest.raises(DelegationError, match="underflows"):
        joint_success(tree, profile)
    with pytest.raises(DelegationError, match="underflows"):
        assign_human_steps(tree, profile, 0)
    # one delegated step lifts the product back into range
    assert assign_human_steps(tree, profile, 1).total_success == pytest.approx(1e-200, rel=1e-12)


@given(st.lists(rate, min_size=1, max_size=12))
def test_all_but_one_delegated_leaves_the_best_robot_step(rates):
    tree, unit_rates = chain(rates)
    profile = RobotProfile(default=1.0, units=unit_rates)
    plan = assign_human_steps(tree, profile, len(rates) - 1)
    assert plan.total_success == pytest.approx(max(rates), abs=1e-12)


@pytest.mark.parametrize("epsilon", ["0.001", "0.2", "0.9"])
def test_epsilon_only_moves_optimal_m(monkeypatch, potato_trees, potato_profile, epsilon):
    baseline = [best_plan(potato_trees, potato_profile, m) for m in range(3)]
    monkeypatch.setenv("FOON_EPSILON", epsilon)
    get_settings.cache_clear()
    assert [best_plan(potato_trees, potato_profile, m) for m in range(3)] == baseline
    assert optimal_m(potato_trees, potato_profile) == optimal_m(potato_trees, potato_profile, epsilon=float(epsilon))

