"""
Success-rate scoring and human-assistant delegation.

A task tree succeeds only if every step does, so its joint success is the
product of per-unit rates. Handing M steps to the assistant replaces those
rates with ``assistant_rate``; the best M steps to hand over are the ones
that raise the product most.
"""

from typing import List, Literal, Optional, Sequence

import numpy as np
from loguru import logger

from ..core.config import get_settings
from ..core.errors import DelegationError, NoEligibleTree, NoExecutableTree
from ..models.foon import FunctionalUnit
from ..models.inventory import RobotProfile
from ..models.plan import BestPlan, DelegationPlan, Executor, SweepEntry, SweepReport, TaskTree

CO_OPTIMAL_TOLERANCE = 1e-12


def unit_rate(profile: RobotProfile, unit: FunctionalUnit) -> float:
    if unit.id is not None and unit.id in profile.unit_rates:
        return profile.unit_rates[unit.id]
    return profile.motion_rates.get(unit.motion.key, profile.default_rate)


def product(rates: Sequence[float]) -> float:
    """Joint success of independent steps, accumulated as a sum of logs."""
    if len(rates) == 0:
        return 1.0
    log_total = float(np.sum(np.log(np.asarray(rates, dtype=float))))
    total = float(np.exp(log_total))
    if total == 0.0:
        raise DelegationError(f"joint success underflows double precision (log success {log_total:.1f})")
    return total


def joint_success(tree: TaskTree, profile: RobotProfile) -> float:
    if not tree.units:
        logger.warning(f"Empty task tree for {tree.goal}: joint success is the vacuous product 1.0")
        return 1.0
    return product([unit_rate(profile, u) for u in tree.units])


def max_delegable(tree: TaskTree) -> int:
    return max(tree.length - 1, 0)


def assign_human_steps(tree: TaskTree, profile: RobotProfile, m: int) -> DelegationPlan:
    n = tree.length
    if m < 0:
        raise DelegationError(f"M must be non-negative, got {m}")
    if m > max_delegable(tree):
        raise DelegationError(
            f"assistant would perform the entire task (M={m}, N={n}; M may be at most N-1)"
        )

    robot = [unit_rate(profile, u) for u in tree.units]
    # Smallest rates first, lowest id on ties. With an impaired assistant only
    # steps it does at least as well as the robot are handed over.
    order = sorted(range(n), key=lambda i: (robot[i], tree.units[i].id))
    human = {i for i in order[:m] if robot[i] <= profile.assistant_rate}

    assignment = tuple(Executor.HUMAN if i in human else Executor.ROBOT for i in range(n))
    rates = tuple(profile.assistant_rate if i in human else robot[i] for i in range(n))
    if n == 0:
        logger.warning(f"Empty task tree for {tree.goal}: joint success is the vacuous product 1.0")
    return DelegationPlan(
        tree=tree,
        m=m,
        assignment=assignment,
        rates=rates,
        total_success=product(rates),
        vacuous=n == 0,
    )


def _preference(plan: DelegationPlan):
    return (plan.tree.length, plan.tree.sorted_ids)


def best_plan(trees: Sequence[TaskTree], profile: RobotProfile, m: int) -> BestPlan:
    if not trees:
        raise NoExecutableTree("no executable tree to choose from")
    if m < 0:
        raise DelegationError(f"M must be non-negative, got {m}")
    eligible = [t for t in trees if m <= max_delegable(t)]
    if not eligible:
        longest = max(t.length for t in trees)
        raise NoEligibleTree(f"M exceeds all tree lengths (M={m}, longest tree has N={longest})")

    plans = [assign_human_steps(t, profile, m) for t in eligible]
    plans.sort(key=lambda p: (-p.total_success, _preference(p)))
    top = plans[0].total_success
    co_optimal = tuple(p for p in plans if top - p.total_success <= CO_OPTIMAL_TOLERANCE)
    co_optimal = tuple(sorted(co_optimal, key=_preference))
    return BestPlan(plan=co_optimal[0], co_optimal=co_optimal, alternatives=tuple(plans))


def optimal_m(trees: Sequence[TaskTree], profile: RobotProfile, epsilon: Optional[float] = None) -> int:
    """Largest M whose gain over M-1 is at least ``epsilon``; 0 when no step clears it."""
    epsilon = get_settings().epsilon if epsilon is None else epsilon
    if epsilon <= 0:
        raise DelegationError(f"epsilon must be positive, got {epsilon}")
    if not trees:
        raise NoExecutableTree("no executable tree to choose from")

    scores = [best_plan(trees, profile, m).plan.total_success for m in range(max(max_delegable(t) for t in trees) + 1)]
    chosen = 0
    for m in range(1, len(scores)):
        if scores[m] - scores[m - 1] >= epsilon:
            chosen = m
    logger.info(f"Optimal M={chosen} (epsilon={epsilon}, S={[round(s, 6) for s in scores]})")
    return chosen


def sweep(trees: Sequence[TaskTree], profile: RobotProfile, max_m: Optional[int] = None) -> SweepReport:
    if not trees:
        raise NoExecutableTree("no executable tree to sweep")
    if max_m is None:
        max_m = max(max_delegable(t) for t in trees)

    entries: List[SweepEntry] = []
    previous: Optional[SweepEntry] = None
    for m in range(max_m + 1):
        try:
            best = best_plan(trees, profile, m)
        except NoEligibleTree:
            entries.append(SweepEntry(m=m))
            continue
        ids = best.plan.tree.ids
        present = previous is not None and not previous.absent
        entry = SweepEntry(
            m=m,
            best_success=best.plan.total_success,
            best_tree_ids=ids,
            co_optimal_count=len(best.co_optimal),
            tree_changed=present and previous.best_tree_ids != ids,
            drop_flag=present and best.plan.total_success < previous.best_success - CO_OPTIMAL_TOLERANCE,
        )
        if entry.drop_flag:
            logger.info(f"M={m}: best success drops to {entry.best_success:.6g}; shorter trees no longer eligible")
        entries.append(entry)
        previous = entry
    return SweepReport(goal=str(trees[0].goal), entries=tuple(entries))


def rank_trees(
    trees: Sequence[TaskTree],
    profile: Optional[RobotProfile] = None,
    by: Literal["success", "length"] = "success",
) -> List[TaskTree]:
    """Order trees by joint success (robot alone) or by fewest units."""
    if by == "length":
        return sorted(trees, key=lambda t: (t.length, t.sorted_ids))
    if profile is None:
        raise DelegationError("ranking by success needs a robot profile")
    return sorted(trees, key=lambda t: (-joint_success(t, profile), t.length, t.sorted_ids))


def describe_plan(plan: DelegationPlan) -> List[str]:
    """One line per step; assistant steps read as instructions."""
    lines = []
    for n, step in enumerate(plan.steps, start=1):
        unit = step.unit
        if step.executor is Executor.HUMAN:
            ins = ", ".join(str(o) for o in unit.inputs)
            outs = ", ".join(str(o) for o in unit.outputs)
            lines.append(f"{n}. [HUMAN] Please {unit.motion.label} {ins} to obtain {outs}. (unit {unit.id})")
        else:
            lines.append(f"{n}. [ROBOT {step.rate:.2%}] {unit.describe()} (unit {unit.id})")
    return lines
