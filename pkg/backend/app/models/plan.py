from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .foon import FunctionalUnit, ObjectNode


class Executor(str, Enum):
    ROBOT = "ROBOT"
    HUMAN = "HUMAN"


class ExpansionLimits(BaseModel):
    max_nodes: int = Field(100_000, ge=1)
    max_children: int = Field(4096, ge=1)
    max_depth: int = Field(64, ge=1)

    @classmethod
    def from_settings(cls, settings, **overrides) -> "ExpansionLimits":
        values = {
            "max_nodes": settings.max_nodes,
            "max_children": settings.max_children,
            "max_depth": settings.max_depth,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class TaskTree(BaseModel):
    """An executable unit sequence for one goal, dependencies first."""

    model_config = ConfigDict(frozen=True)

    goal: ObjectNode
    units: Tuple[FunctionalUnit, ...] = ()

    @property
    def length(self) -> int:
        return len(self.units)

    @property
    def ids(self) -> Tuple[int, ...]:
        return tuple(u.id for u in self.units)

    @property
    def sorted_ids(self) -> Tuple[int, ...]:
        return tuple(sorted(self.ids))

    @property
    def unit_set(self) -> FrozenSet[int]:
        return frozenset(self.ids)


class TreeMetrics(BaseModel):
    length: int
    unit_ids: List[int]
    depth: int


class PlanStep(BaseModel):
    unit: FunctionalUnit
    executor: Executor
    rate: float


class DelegationPlan(BaseModel):
    """A task tree with every step assigned to the robot or the human assistant."""

    model_config = ConfigDict(frozen=True)

    tree: TaskTree
    m: int = Field(ge=0)
    assignment: Tuple[Executor, ...]
    rates: Tuple[float, ...]
    total_success: float = Field(gt=0, le=1)
    vacuous: bool = False

    @model_validator(mode="after")
    def _check_shape(self) -> "DelegationPlan":
        n = self.tree.length
        if len(self.assignment) != n or len(self.rates) != n:
            raise ValueError("assignment and rates must have one entry per unit")
        if self.human_count > self.m:
            raise ValueError(f"{self.human_count} HUMAN steps tagged but M={self.m}")
        return self

    @property
    def human_count(self) -> int:
        return sum(1 for e in self.assignment if e is Executor.HUMAN)

    @property
    def steps(self) -> List[PlanStep]:
        return [
            PlanStep(unit=unit, executor=executor, rate=rate)
            for unit, executor, rate in zip(self.tree.units, self.assignment, self.rates)
        ]


class BestPlan(BaseModel):
    plan: DelegationPlan
    co_optimal: Tuple[DelegationPlan, ...]
    # every eligible plan, best first
    alternatives: Tuple[DelegationPlan, ...] = ()


class SweepEntry(BaseModel):
    m: int
    best_success: Optional[float] = None
    best_tree_ids: Optional[Tuple[int, ...]] = None
    co_optimal_count: int = 0
    tree_changed: bool = False
    drop_flag: bool = False

    @property
    def absent(self) -> bool:
        return self.best_success is None


class SweepReport(BaseModel):
    goal: str
    entries: Tuple[SweepEntry, ...]

    def success(self, m: int) -> Optional[float]:
        return self.entries[m].best_success

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "m": e.m,
                "best_success": e.best_success,
                "best_tree_ids": ",".join(str(i) for i in e.best_tree_ids) if e.best_tree_ids else None,
                "tree_changed": int(e.tree_changed),
                "drop_flag": int(e.drop_flag),
            }
            for e in self.entries
        ]
        return pd.DataFrame(rows, columns=["m", "best_success", "best_tree_ids", "tree_changed", "drop_flag"])

    def to_table(self) -> str:
        """Tab-separated, header row first; absent entries leave the value cells empty."""
        return self.to_frame().to_csv(sep="\t", index=False, na_rep="", float_format="%.10g", lineterminator="\n")


class SimulationResult(BaseModel):
    trials: int = Field(ge=1)
    successes: int = Field(ge=0)
    empirical_rate: float
    per_unit_failure_counts: Dict[int, int]
    unit_motions: Dict[int, str] = Field(default_factory=dict)
    seed: int
    analytic_rate: float

    @model_validator(mode="after")
    def _check_counts(self) -> "SimulationResult":
        if self.successes > self.trials:
            raise ValueError("more successes than trials")
        if sum(self.per_unit_failure_counts.values()) != self.trials - self.successes:
            raise ValueError("failure counts do not add up to the failed trials")
        return self

    @property
    def standard_error(self) -> float:
        p = self.analytic_rate
        return (p * (1 - p) / self.trials) ** 0.5

    def within_sigma(self, k: float = 3.0) -> bool:
        return abs(self.empirical_rate - self.analytic_rate) <= k * self.standard_error


class FailureEntry(BaseModel):
    unit_id: int
    motion: str = ""
    failures: int
    share: float
