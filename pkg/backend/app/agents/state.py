import operator
from typing import Annotated, List, Literal, Optional, TypedDict

from ..models.foon import ObjectNode, UniversalFoon
from ..models.inventory import KitchenInventory, RobotProfile
from ..models.plan import BestPlan, ExpansionLimits, FailureEntry, SimulationResult, TaskTree


class PlanningState(TypedDict, total=False):
    network: UniversalFoon
    goal: ObjectNode
    kitchen: KitchenInventory
    profile: RobotProfile
    limits: Optional[ExpansionLimits]
    strategy: Literal["exhaustive", "greedy"]
    m: Optional[int]
    epsilon: Optional[float]
    trials: int  # 0 skips simulation
    seed: Optional[int]
    workers: Optional[int]
    trees: List[TaskTree]
    best: BestPlan
    chosen_m: int
    chosen_by: str
    simulation: SimulationResult
    failures: List[FailureEntry]
    messages: Annotated[List[str], operator.add]
