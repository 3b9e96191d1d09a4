from typing import Optional

from langgraph.graph import END, StateGraph

from ..models.foon import ObjectNode, UniversalFoon
from ..models.inventory import KitchenInventory, RobotProfile
from ..models.plan import ExpansionLimits
from .nodes import delegate_node, retrieve_node, should_simulate, simulate_node
from .state import PlanningState

workflow = StateGraph(PlanningState)

workflow.add_node("retrieve", retrieve_node)
workflow.add_node("delegate", delegate_node)
workflow.add_node("simulate", simulate_node)

workflow.set_entry_point("retrieve")
workflow.add_edge("retrieve", "delegate")
workflow.add_conditional_edges("delegate", should_simulate, {"simulate": "simulate", END: END})
workflow.add_edge("simulate", END)

graph = workflow.compile()


def run_planning(
    network: UniversalFoon,
    goal: ObjectNode,
    kitchen: KitchenInventory,
    profile: RobotProfile,
    m: Optional[int] = None,
    epsilon: Optional[float] = None,
    limits: Optional[ExpansionLimits] = None,
    strategy: str = "exhaustive",
    trials: int = 0,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> PlanningState:
    """Retrieve -> delegate -> (simulate when trials > 0). Domain errors propagate."""
    return graph.invoke(
        {
            "network": network,
            "goal": goal,
            "kitchen": kitchen,
            "profile": profile,
            "limits": limits,
            "strategy": strategy,
            "m": m,
            "epsilon": epsilon,
            "trials": trials,
            "seed": seed,
            "workers": workers,
            "messages": [],
        }
    )
