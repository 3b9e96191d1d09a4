"""
Task-tree retrieval over a universal FOON.

Exhaustive retrieval builds a *path forest* backwards from the goal: each root
is one unit producing the goal, and each child node is one combination of
units that together produce the inputs of every unit in its parent (one
producer picked per input, Cartesian product over the choices). A unit never
reappears below itself. Every root-to-leaf path, flattened and ordered, is a
candidate task tree; the kitchen only comes in at that last step, so one
forest serves any kitchen.

Greedy retrieval is the cheaper kitchen-driven search. It walks the same forest
lazily, depth first in id order, and stops at the first executable tree;
branches with a leaf input the kitchen lacks are cut where they appear.
"""

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple

from loguru import logger

from ..core.config import get_settings
from ..core.errors import ExpansionLimitExceeded, GoalNotProducible, PlanningFailure
from ..models.foon import FunctionalUnit, ObjectKey, ObjectNode, UniversalFoon, UnitSignature
from ..models.inventory import KitchenInventory
from ..models.plan import ExpansionLimits, TaskTree, TreeMetrics
from .network import producers_of


@dataclass(eq=False)
class PathTreeNode:
    units: Tuple[FunctionalUnit, ...]
    parent: Optional["PathTreeNode"] = None
    children: List["PathTreeNode"] = field(default_factory=list)
    depth: int = 0

    @property
    def unit_ids(self) -> Tuple[int, ...]:
        return tuple(u.id for u in self.units)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def lineage(self) -> Iterator["PathTreeNode"]:
        node: Optional[PathTreeNode] = self
        while node is not None:
            yield node
            node = node.parent

    def ancestor_signatures(self) -> Set[UnitSignature]:
        """Signatures of units in this node and every node above it."""
        return {u.signature for node in self.lineage() for u in node.units}


@dataclass
class CandidateExpansion:
    # One entry per (unit, input) of the node; an empty entry is a leaf input.
    per_input_candidates: List[Tuple[FunctionalUnit, ...]]

    @property
    def choices(self) -> List[Tuple[FunctionalUnit, ...]]:
        return [c for c in self.per_input_candidates if c]

    @property
    def product_size(self) -> int:
        choices = self.choices
        return math.prod(len(c) for c in choices) if choices else 0

    def combinations(self) -> Iterator[Tuple[FunctionalUnit, ...]]:
        return itertools.product(*self.choices)


@dataclass
class PathForest:
    goal: ObjectNode
    roots: List[PathTreeNode]
    node_count: int = 0
    depth: int = 0

    def walk(self) -> Iterator[PathTreeNode]:
        stack = list(reversed(self.roots))
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def leaf_paths(self) -> Iterator[Tuple[PathTreeNode, ...]]:
        """Root-to-leaf paths, depth first, roots in id order."""
        for root in self.roots:
            stack: List[Tuple[PathTreeNode, Tuple[PathTreeNode, ...]]] = [(root, (root,))]
            while stack:
                node, path = stack.pop()
                if node.is_leaf:
                    yield path
                    continue
                for child in reversed(node.children):
                    stack.append((child, path + (child,)))

    @property
    def stats(self) -> dict:
        return {
            "roots": len(self.roots),
            "nodes": self.node_count,
            "leaves": sum(1 for n in self.walk() if n.is_leaf),
            "depth": self.depth,
        }


def find_roots(foon: UniversalFoon, goal: ObjectNode) -> List[PathTreeNode]:
    roots = [PathTreeNode(units=(unit,)) for unit in producers_of(foon, goal)]
    if not roots:
        raise GoalNotProducible(f"goal not producible: no unit outputs {goal}")
    return roots


def candidate_expansion(foon: UniversalFoon, node: PathTreeNode) -> CandidateExpansion:
    excluded = node.ancestor_signatures()
    per_input = []
    for unit in node.units:
        for obj in unit.inputs:
            per_input.append(tuple(p for p in producers_of(foon, obj) if p.signature not in excluded))
    return CandidateExpansion(per_input_candidates=per_input)


def build_path_forest(
    foon: UniversalFoon,
    goal: ObjectNode,
    limits: Optional[ExpansionLimits] = None,
) -> PathForest:
    limits = limits or ExpansionLimits.from_settings(get_settings())
    roots = find_roots(foon, goal)
    forest = PathForest(goal=goal, roots=roots, node_count=len(roots))
    queue = deque(roots)

    def partial() -> dict:
        return {"nodes": forest.node_count, "pending": len(queue), "depth": forest.depth}

    while queue:
        node = queue.popleft()
        expansion = candidate_expansion(foon, node)
        size = expansion.product_size
        if size == 0:
            continue
        if size > limits.max_children:
            raise ExpansionLimitExceeded(
                f"{size} combinations below units {list(node.unit_ids)} (max_children={limits.max_children})",
                partial(),
            )
        if node.depth + 1 > limits.max_depth:
            raise ExpansionLimitExceeded(f"depth {node.depth + 1} (max_depth={limits.max_depth})", partial())

        seen: Set[frozenset] = set()
        for combo in expansion.combinations():
            chosen: Dict[int, FunctionalUnit] = {u.id: u for u in combo}
            key = frozenset(chosen)
            if key in seen:
                continue
            seen.add(key)
            child = PathTreeNode(
                units=tuple(chosen[i] for i in sorted(chosen)),
                parent=node,
                depth=node.depth + 1,
            )
            node.children.append(child)
            forest.node_count += 1
            forest.depth = max(forest.depth, child.depth)
            if forest.node_count > limits.max_nodes:
                raise ExpansionLimitExceeded(f"more than {limits.max_nodes} nodes", partial())
            queue.append(child)

    logger.info(f"Path forest for {goal}: {forest.node_count} nodes, {len(roots)} root(s), depth {forest.depth}")
    return forest


def order_units(
    units: Iterable[FunctionalUnit],
    root: FunctionalUnit,
    available: Iterable[ObjectKey],
) -> Optional[Tuple[FunctionalUnit, ...]]:
    """
    Execution order for a unit set: a unit runs once all its inputs are
    available (kitchen or earlier outputs), lowest id first, ``root`` last.
    Returns None when no such order exists.
    """
    have = set(available)
    pending = sorted((u for u in units if u.id != root.id), key=lambda u: u.id)
    ordered: List[FunctionalUnit] = []
    while pending:
        ready = next((u for u in pending if all(o.key in have for o in u.inputs)), None)
        if ready is None:
            return None
        pending.remove(ready)
        ordered.append(ready)
        have.update(o.key for o in ready.outputs)
    if not all(o.key in have for o in root.inputs):
        return None
    ordered.append(root)
    return tuple(ordered)


def is_executable(tree: TaskTree, kitchen: KitchenInventory) -> bool:
    have = set(kitchen.keys)
    for unit in tree.units:
        if not all(o.key in have for o in unit.inputs):
            return False
        have.update(o.key for o in unit.outputs)
    if tree.units and not tree.units[-1].produces(tree.goal):
        return False
    return True


def enumerate_task_trees(forest: PathForest, kitchen: KitchenInventory) -> List[TaskTree]:
    """Every executable task tree in the forest, one per distinct unit set, in DFS order."""
    trees: List[TaskTree] = []
    found: Set[frozenset] = set()
    tried: Set[Tuple[frozenset, int]] = set()
    paths = 0
    for path in forest.leaf_paths():
        paths += 1
        root = path[0].units[0]
        units = {u.id: u for node in path for u in node.units}
        key = frozenset(units)
        if key in found or (key, root.id) in tried:
            continue
        tried.add((key, root.id))
        ordered = order_units(units.values(), root, kitchen.keys)
        if ordered is None:
            continue
        found.add(key)
        trees.append(TaskTree(goal=forest.goal, units=ordered))
    logger.info(f"Enumerated {len(trees)} executable task tree(s) from {paths} path(s)")
    return trees


def retrieve_all(
    foon: UniversalFoon,
    goal: ObjectNode,
    kitchen: KitchenInventory,
    limits: Optional[ExpansionLimits] = None,
) -> List[TaskTree]:
    return enumerate_task_trees(build_path_forest(foon, goal, limits), kitchen)


def _leaf_inputs_available(node: PathTreeNode, expansion: CandidateExpansion, kitchen: KitchenInventory) -> bool:
    """Inputs nothing below ``node`` can produce must come from the kitchen or a unit on its path."""
    have = set(kitchen.keys)
    have.update(o.key for above in node.lineage() for u in above.units for o in u.outputs)
    inputs = [obj for unit in node.units for obj in unit.inputs]
    return all(cands or obj.key in have for obj, cands in zip(inputs, expansion.per_input_candidates))


def greedy_retrieve(
    foon: UniversalFoon,
    goal: ObjectNode,
    kitchen: KitchenInventory,
    limits: Optional[ExpansionLimits] = None,
) -> TaskTree:
    """
    First executable task tree of a lazy depth-first walk over the path forest.

    Producers are tried in id order and branches whose leaf inputs are missing
    from the kitchen are cut as soon as they appear, so the walk usually stops
    long before the forest is complete. Every tree it returns is one that
    ``enumerate_task_trees`` also yields for the same kitchen.
    """
    if kitchen.contains(goal):
        logger.info(f"{goal} is already in the kitchen; nothing to do")
        return TaskTree(goal=goal, units=())
    limits = limits or ExpansionLimits.from_settings(get_settings())
    roots = find_roots(foon, goal)
    visited = 0

    def descend(node: PathTreeNode) -> Optional[Tuple[FunctionalUnit, ...]]:
        nonlocal visited
        visited += 1
        if visited > limits.max_nodes:
            raise ExpansionLimitExceeded(f"greedy walk passed {limits.max_nodes} nodes", {"nodes": visited})
        expansion = candidate_expansion(foon, node)
        if not _leaf_inputs_available(node, expansion, kitchen):
            return None
        if expansion.product_size == 0:
            lineage = list(node.lineage())
            units = {u.id: u for above in lineage for u in above.units}
            return order_units(units.values(), lineage[-1].units[0], kitchen.keys)
        if node.depth + 1 > limits.max_depth:
            raise ExpansionLimitExceeded(f"depth {node.depth + 1} (max_depth={limits.max_depth})", {"nodes": visited})

        seen: Set[frozenset] = set()
        for combo in expansion.combinations():
            chosen: Dict[int, FunctionalUnit] = {u.id: u for u in combo}
            key = frozenset(chosen)
            if key in seen:
                continue
            seen.add(key)
            child = PathTreeNode(units=tuple(chosen[i] for i in sorted(chosen)), parent=node, depth=node.depth + 1)
            found = descend(child)
            if found is not None:
                return found
        return None

    for root in roots:
        ordered = descend(root)
        if ordered is not None:
            logger.info(f"Greedy retrieval for {goal}: {len(ordered)} unit(s) {[u.id for u in ordered]} after {visited} node(s)")
            return TaskTree(goal=goal, units=ordered)
    raise PlanningFailure(f"no satisfiable task tree for {goal} with this kitchen")


def tree_metrics(tree: TaskTree) -> TreeMetrics:
    depths: List[int] = []
    for i, unit in enumerate(tree.units):
        needs = {o.key for o in unit.inputs}
        feeding = [
            depths[j]
            for j, earlier in enumerate(tree.units[:i])
            if any(o.key in needs for o in earlier.outputs)
        ]
        depths.append(1 + max(feeding, default=0))
    return TreeMetrics(length=tree.length, unit_ids=list(tree.ids), depth=max(depths, default=0))
