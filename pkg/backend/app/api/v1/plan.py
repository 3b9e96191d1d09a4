from typing import List, Literal, Optional

from fastapi import APIRouter, HTTPException
from loguru import logger
from pydantic import BaseModel, Field

from ...agents.graph import run_planning
from ...core.config import get_settings
from ...core.errors import FoonError, NoExecutableTree
from ...models.documents import NetworkDocument, PlanDocument, SimulationDocument
from ...models.inventory import KitchenInventory, RobotProfile
from ...models.plan import ExpansionLimits
from ...services.collaboration import sweep
from ...services.exporter import foon_from_document, plan_document, simulation_document
from ...services.foon_parser import parse_object_spec
from ...services.retrieval import retrieve_all

router = APIRouter(prefix="/plan", tags=["plan"])


class PlanBody(BaseModel):
    network: NetworkDocument
    goal: str = Field(..., description="label{states}[ingredients]")
    kitchen: List[str] = Field(default_factory=list, description="One item per entry, same syntax as goal")
    profile: RobotProfile
    m: Optional[int] = Field(None, ge=0)
    epsilon: Optional[float] = Field(None, gt=0)
    strategy: Literal["exhaustive", "greedy"] = "exhaustive"
    limits: Optional[ExpansionLimits] = None


class SweepBody(PlanBody):
    max_m: Optional[int] = Field(None, ge=0)


class SimulateBody(PlanBody):
    trials: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = Field(None, ge=0)


class PlanResponse(BaseModel):
    plan: PlanDocument
    trees: List[List[int]]
    messages: List[str] = []


class SweepRow(BaseModel):
    m: int
    best_success: Optional[float] = None
    best_tree_ids: Optional[List[int]] = None
    tree_changed: bool = False
    drop_flag: bool = False


def _inputs(body: PlanBody):
    foon = foon_from_document(body.network)
    goal = parse_object_spec(body.goal)
    kitchen = KitchenInventory(items=[parse_object_spec(item) for item in body.kitchen])
    return foon, goal, kitchen


def _fail(e: FoonError):
    logger.warning(f"Planning request rejected: {e}")
    raise HTTPException(status_code=e.http_status, detail=str(e))


@router.post("/retrieve", response_model=PlanResponse)
def retrieve_plan(body: PlanBody):
    """Enumerate task trees, pick M (given or optimal) and return the delegation plan."""
    try:
        foon, goal, kitchen = _inputs(body)
        state = run_planning(
            foon, goal, kitchen, body.profile,
            m=body.m, epsilon=body.epsilon, limits=body.limits, strategy=body.strategy,
        )
    except FoonError as e:
        _fail(e)

    best = state["best"]
    return PlanResponse(
        plan=plan_document(best.plan, body.profile.name, best.co_optimal, state["chosen_by"]),
        trees=[list(t.ids) for t in state["trees"]],
        messages=state["messages"],
    )


@router.post("/sweep", response_model=List[SweepRow])
def sweep_plan(body: SweepBody):
    try:
        foon, goal, kitchen = _inputs(body)
        trees = retrieve_all(foon, goal, kitchen, body.limits)
        if not trees:
            raise NoExecutableTree(f"no executable tree for {goal} with this kitchen")
        report = sweep(trees, body.profile, body.max_m)
    except FoonError as e:
        _fail(e)

    return [
        SweepRow(
            m=e.m,
            best_success=e.best_success,
            best_tree_ids=list(e.best_tree_ids) if e.best_tree_ids else None,
            tree_changed=e.tree_changed,
            drop_flag=e.drop_flag,
        )
        for e in report.entries
    ]


@router.post("/simulate", response_model=SimulationDocument)
def simulate_plan(body: SimulateBody):
    try:
        foon, goal, kitchen = _inputs(body)
        state = run_planning(
            foon, goal, kitchen, body.profile,
            m=body.m, epsilon=body.epsilon, limits=body.limits, strategy=body.strategy,
            trials=body.trials or get_settings().trials, seed=body.seed,
        )
    except FoonError as e:
        _fail(e)

    return simulation_document(state["best"].plan, state["simulation"], state["failures"])
