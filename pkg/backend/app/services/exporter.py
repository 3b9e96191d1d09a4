"""
Graph and structured exports.

The graph view is a networkx DiGraph with one node per distinct object
(``kind="object"``, drawn as an ellipse) and one per functional unit
(``kind="motion"``, drawn as a box). Edges run object -> motion for inputs
and motion -> object for outputs. For plans, motion nodes also carry the
step's rate and executor. ``to_dot`` hands that graph to ``graphviz.Digraph`` and returns the DOT source.

The structured form is the versioned JSON schema in ``models.documents``.
"""

from typing import Dict, Iterable, List, Optional, Sequence, Union

import graphviz
import networkx as nx
from loguru import logger
from pydantic import TypeAdapter, ValidationError

from ..core.errors import ParseError
from ..models.documents import (
    SCHEMA_VERSION,
    Document,
    NetworkDocument,
    PlanDocument,
    PlanStepDocument,
    SimulationDocument,
)
from ..models.foon import FunctionalUnit, ObjectKey, Subgraph, UniversalFoon
from ..models.plan import DelegationPlan, FailureEntry, SimulationResult, TaskTree
from .collaboration import describe_plan
from .foon_parser import parse_object_spec
from .network import merge

_document_adapter = TypeAdapter(Document)


def _motion_id(unit: FunctionalUnit) -> str:
    return f"u{unit.id}"


def build_graph(units: Sequence[FunctionalUnit], plan: Optional[DelegationPlan] = None) -> nx.DiGraph:
    graph = nx.DiGraph()
    objects: Dict[ObjectKey, str] = {}

    def object_node(node) -> str:
        key = node.key
        if key not in objects:
            objects[key] = f"o{len(objects) + 1}"
            graph.add_node(objects[key], kind="object", shape="ellipse", label=str(node))
        return objects[key]

    steps = {}
    if plan is not None:
        steps = {s.unit.id: s for s in plan.steps}

    for unit in units:
        motion = _motion_id(unit)
        attrs = {"kind": "motion", "shape": "box", "label": unit.motion.label, "unit_id": unit.id}
        step = steps.get(unit.id)
        if step is not None:
            attrs["rate"] = step.rate
            attrs["executor"] = step.executor.value
            attrs["label"] = f"{unit.motion.label}\n{step.executor.value} {step.rate:.2%}"
        graph.add_node(motion, **attrs)
        for obj in unit.inputs:
            graph.add_edge(object_node(obj), motion)
        for obj in unit.outputs:
            graph.add_edge(motion, object_node(obj))

    check_bipartite(graph)
    return graph


def check_bipartite(graph: nx.DiGraph) -> None:
    kinds = nx.get_node_attributes(graph, "kind")
    for a, b in graph.edges:
        if kinds[a] == kinds[b]:
            raise ValueError(f"edge {a} -> {b} joins two {kinds[a]} nodes")


def network_graph(foon: UniversalFoon) -> nx.DiGraph:
    return build_graph(foon.units)


def plan_graph(plan: DelegationPlan) -> nx.DiGraph:
    return build_graph(plan.tree.units, plan)


def to_dot(graph: nx.DiGraph, name: str = "foon") -> str:
    dot = graphviz.Digraph(name=name)
    for node, data in graph.nodes(data=True):
        attrs = {"shape": data["shape"], "class": data["kind"]}
        if "rate" in data:
            attrs["rate"] = format(data["rate"], ".10g")
            attrs["executor"] = data["executor"]
        dot.node(node, label=graphviz.nohtml(data["label"].replace("\n", "\\n")), **attrs)
    for a, b in graph.edges:
        dot.edge(a, b)
    return dot.source


def network_document(foon: UniversalFoon) -> NetworkDocument:
    return NetworkDocument(schema_version=SCHEMA_VERSION, units=list(foon.units))


def foon_from_document(doc: NetworkDocument) -> UniversalFoon:
    if all(u.id is not None for u in doc.units):
        try:
            return UniversalFoon(units=tuple(doc.units))
        except ValidationError as e:
            raise ParseError(f"invalid network document: {e.errors()[0]['msg']}") from None
    logger.debug("Network document without unit ids; merging to assign them")
    return merge([Subgraph(name="document", units=doc.units)])


def plan_document(
    plan: DelegationPlan,
    robot: str = "",
    co_optimal: Iterable[DelegationPlan] = (),
    chosen_by: Optional[str] = None,
) -> PlanDocument:
    instructions = describe_plan(plan)
    steps = [
        PlanStepDocument(
            unit_id=step.unit.id,
            motion=step.unit.motion.label,
            executor=step.executor,
            rate=step.rate,
            instruction=instructions[i],
        )
        for i, step in enumerate(plan.steps)
    ]
    return PlanDocument(
        schema_version=SCHEMA_VERSION,
        goal=str(plan.tree.goal),
        robot=robot,
        m=plan.m,
        total_success=plan.total_success,
        units=list(plan.tree.units),
        steps=steps,
        co_optimal=[list(p.tree.ids) for p in co_optimal],
        chosen_by=chosen_by,
    )


def plan_from_document(doc: PlanDocument) -> DelegationPlan:
    if [s.unit_id for s in doc.steps] != [u.id for u in doc.units]:
        raise ParseError("plan document steps do not match its units")
    tree = TaskTree(goal=parse_object_spec(doc.goal), units=tuple(doc.units))
    try:
        return DelegationPlan(
            tree=tree,
            m=doc.m,
            assignment=tuple(s.executor for s in doc.steps),
            rates=tuple(s.rate for s in doc.steps),
            total_success=doc.total_success,
            vacuous=not doc.units,
        )
    except ValidationError as e:
        raise ParseError(f"invalid plan document: {e.errors()[0]['msg']}") from None


def simulation_document(plan: DelegationPlan, result: SimulationResult, failures: List[FailureEntry]) -> SimulationDocument:
    return SimulationDocument(
        schema_version=SCHEMA_VERSION,
        goal=str(plan.tree.goal),
        m=plan.m,
        result=result,
        failures=failures,
    )


def dump_document(doc: Union[NetworkDocument, PlanDocument, SimulationDocument]) -> str:
    return doc.model_dump_json(indent=2) + "\n"


def load_document(text: str) -> Union[NetworkDocument, PlanDocument, SimulationDocument]:
    try:
        return _document_adapter.validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "document"
        raise ParseError(f"invalid structured document: {where}: {first['msg']}") from None

