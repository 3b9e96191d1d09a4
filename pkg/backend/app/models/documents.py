"""
Versioned structured export.

Every document carries ``schema_version`` (mandatory on import) and a ``kind``
discriminator. Version 1 kinds:

    network     - all functional units with their ids
    plan        - a delegation plan: goal, M, units in execution order and
                  one step entry (unit id, executor, rate) per unit
    simulation  - a Monte Carlo result together with its failure ranking
"""

from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, Field

from .foon import FunctionalUnit
from .plan import Executor, FailureEntry, SimulationResult

SCHEMA_VERSION = 1


class NetworkDocument(BaseModel):
    schema_version: Literal[1]
    kind: Literal["network"] = "network"
    units: List[FunctionalUnit]


class PlanStepDocument(BaseModel):
    unit_id: int
    motion: str
    executor: Executor
    rate: float
    instruction: str = ""


class PlanDocument(BaseModel):
    schema_version: Literal[1]
    kind: Literal["plan"] = "plan"
    goal: str
    robot: str = ""
    m: int
    total_success: float
    units: List[FunctionalUnit]
    steps: List[PlanStepDocument]
    co_optimal: List[List[int]] = Field(default_factory=list)
    chosen_by: Optional[str] = None


class SimulationDocument(BaseModel):
    schema_version: Literal[1]
    kind: Literal["simulation"] = "simulation"
    goal: str
    m: int
    result: SimulationResult
    failures: List[FailureEntry] = Field(default_factory=list)


Document = Annotated[Union[NetworkDocument, PlanDocument, SimulationDocument], Field(discriminator="kind")]
