import json
from typing import Dict, List, Optional

from langgraph.graph import END
from loguru import logger

from ..core.cache import cache_key, get_cache, set_cache
from ..core.errors import NoExecutableTree
from ..models.foon import UniversalFoon
from ..models.plan import ExpansionLimits, TaskTree
from ..services.collaboration import best_plan, optimal_m
from ..services.exporter import dump_document, network_document
from ..services.foon_parser import write_kitchen
from ..services.retrieval import greedy_retrieve, retrieve_all
from ..services.simulation import failure_report, simulate
from .state import PlanningState


def _trees_key(state: PlanningState) -> str:
    limits: Optional[ExpansionLimits] = state.get("limits")
    return cache_key(
        "trees",
        dump_document(network_document(state["network"])),
        str(state["goal"].key),
        write_kitchen(state["kitchen"]),
        limits.model_dump_json() if limits else "",
    )


def _trees_from_ids(foon: UniversalFoon, goal, id_lists: List[List[int]]) -> List[TaskTree]:
    return [TaskTree(goal=goal, units=tuple(foon.get_unit(i) for i in ids)) for ids in id_lists]


def retrieve_node(state: PlanningState) -> Dict:
    goal = state["goal"]
    if state.get("strategy", "exhaustive") == "greedy":
        tree = greedy_retrieve(state["network"], goal, state["kitchen"], state.get("limits"))
        return {"trees": [tree], "messages": [f"Greedy retrieval: units {list(tree.ids)}"]}

    key = _trees_key(state)
    cached = get_cache(key)
    if cached is not None:
        trees = _trees_from_ids(state["network"], goal, json.loads(cached))
        logger.debug(f"Task trees for {goal} served from cache")
    else:
        trees = retrieve_all(state["network"], goal, state["kitchen"], state.get("limits"))
        set_cache(key, json.dumps([list(t.ids) for t in trees]))

    if not trees:
        raise NoExecutableTree(f"no executable tree for {goal} with this kitchen")
    return {"trees": trees, "messages": [f"Retrieved {len(trees)} executable task tree(s)"]}


def delegate_node(state: PlanningState) -> Dict:
    trees, profile = state["trees"], state["profile"]
    m = state.get("m")
    if m is None:
        m = optimal_m(trees, profile, state.get("epsilon"))
        chosen_by = "optimal_m"
    else:
        chosen_by = "m"
    best = best_plan(trees, profile, m)
    plan = best.plan
    logger.info(f"Chosen plan at M={m}: units {list(plan.tree.ids)}, joint success {plan.total_success:.6g}")
    return {
        "best": best,
        "chosen_m": m,
        "chosen_by": chosen_by,
        "messages": [f"M={m} ({chosen_by}): {plan.human_count} HUMAN step(s), success {plan.total_success:.6g}"],
    }


def simulate_node(state: PlanningState) -> Dict:
    result = simulate(state["best"].plan, state["trials"], state.get("seed"), state.get("workers"))
    return {
        "simulation": result,
        "failures": failure_report(result),
        "messages": [f"Simulated {result.trials} trial(s): empirical {result.empirical_rate:.4f}"],
    }


def should_simulate(state: PlanningState) -> str:
    return "simulate" if state.get("trials") else END
