from typing import Dict, Sequence, Tuple

from loguru import logger

from ..core.errors import MergeError
from ..models.foon import (
    FunctionalUnit,
    ObjectNode,
    Subgraph,
    UniversalFoon,
    UnitSignature,
    object_identity,
    unit_equals,
)

__all__ = [
    "object_identity",
    "unit_equals",
    "merge",
    "producers_of",
    "consumers_of",
    "network_to_subgraph",
]


def _presentation(unit: FunctionalUnit) -> tuple:
    # Picks one representative among equal units regardless of argument order.
    return (
        unit.motion.label,
        tuple(sorted(str(o) for o in unit.inputs)),
        tuple(sorted(str(o) for o in unit.outputs)),
        tuple(str(o) for o in unit.inputs),
        tuple(str(o) for o in unit.outputs),
    )


def merge(subgraphs: Sequence[Subgraph]) -> UniversalFoon:
    """
    Union of all functional units, duplicates removed.

    Ids are the 1-based rank of each unit's signature (motion, sorted input
    identities, sorted output identities), so the result does not depend on
    the order or grouping of the subgraphs.
    """
    if not subgraphs:
        raise MergeError("nothing to merge")

    distinct: Dict[UnitSignature, FunctionalUnit] = {}
    total = 0
    for subgraph in subgraphs:
        if not subgraph.units:
            raise MergeError(f"subgraph '{subgraph.name}' has no functional units")
        for unit in subgraph.units:
            total += 1
            sig = unit.signature
            kept = distinct.get(sig)
            if kept is None or _presentation(unit) < _presentation(kept):
                distinct[sig] = unit

    units = tuple(
        distinct[sig].model_copy(update={"id": rank})
        for rank, sig in enumerate(sorted(distinct), start=1)
    )
    logger.info(f"Merged {total} units from {len(subgraphs)} subgraph(s) into {len(units)}")
    return UniversalFoon(units=units)


def producers_of(foon: UniversalFoon, node: ObjectNode) -> Tuple[FunctionalUnit, ...]:
    """Units with ``node`` among their outputs, in id order."""
    usage = foon.object_index.get(object_identity(node))
    if usage is None:
        return ()
    return tuple(foon.get_unit(i) for i in usage.producers)


def consumers_of(foon: UniversalFoon, node: ObjectNode) -> Tuple[FunctionalUnit, ...]:
    usage = foon.object_index.get(object_identity(node))
    if usage is None:
        return ()
    return tuple(foon.get_unit(i) for i in usage.consumers)


def network_to_subgraph(foon: UniversalFoon, name: str = "universal") -> Subgraph:
    return Subgraph(name=name, units=foon.units)
