from typing import Dict, FrozenSet, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_serializer, field_validator, model_validator

ObjectKey = Tuple[str, Tuple[str, ...], Tuple[str, ...]]
UnitSignature = Tuple[str, Tuple[ObjectKey, ...], Tuple[ObjectKey, ...]]


def _normalize(text: str) -> str:
    return text.strip().lower()


def _clean_labels(value, what: str) -> FrozenSet[str]:
    if value is None:
        return frozenset()
    if isinstance(value, str):
        value = [value]
    cleaned = set()
    for item in value:
        item = str(item).strip()
        if not item:
            raise ValueError(f"{what} label is empty")
        cleaned.add(item)
    return frozenset(cleaned)


class ObjectNode(BaseModel):
    """An object in a given state, optionally holding other objects (tea cup with tea and sugar)."""

    model_config = ConfigDict(frozen=True)

    label: str
    states: FrozenSet[str] = frozenset()
    ingredients: FrozenSet[str] = frozenset()

    @field_validator("label")
    @classmethod
    def _label_not_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("object label is empty")
        return value.strip()

    @field_validator("states", mode="before")
    @classmethod
    def _clean_states(cls, value):
        return _clean_labels(value, "state")

    @field_validator("ingredients", mode="before")
    @classmethod
    def _clean_ingredients(cls, value):
        return _clean_labels(value, "ingredient")

    @field_serializer("states", "ingredients")
    def _sorted(self, value: FrozenSet[str]) -> List[str]:
        return sorted(value)

    @property
    def key(self) -> ObjectKey:
        return object_identity(self)

    def __str__(self) -> str:
        text = self.label
        if self.states:
            text += "{" + ",".join(sorted(self.states)) + "}"
        if self.ingredients:
            text += "[" + ",".join(sorted(self.ingredients)) + "]"
        return text


class MotionNode(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str

    @field_validator("label")
    @classmethod
    def _label_not_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("motion label is empty")
        return value.strip()

    @property
    def key(self) -> str:
        return _normalize(self.label)


class FunctionalUnit(BaseModel):
    """
    One manipulation: input objects, a single motion, output objects.

    Edges only run object -> motion (inputs) and motion -> object (outputs),
    so a unit is bipartite by construction.
    """

    model_config = ConfigDict(frozen=True)

    id: Optional[int] = None
    inputs: Tuple[ObjectNode, ...] = Field(min_length=1)
    outputs: Tuple[ObjectNode, ...] = Field(min_length=1)
    motion: MotionNode

    @property
    def signature(self) -> UnitSignature:
        """Canonical form used for duplicate detection and id ranking."""
        return (
            self.motion.key,
            tuple(sorted(o.key for o in self.inputs)),
            tuple(sorted(o.key for o in self.outputs)),
        )

    def produces(self, node: ObjectNode) -> bool:
        key = node.key
        return any(o.key == key for o in self.outputs)

    def describe(self) -> str:
        ins = ", ".join(str(o) for o in self.inputs)
        outs = ", ".join(str(o) for o in self.outputs)
        return f"{self.motion.label}: {ins} -> {outs}"


class Subgraph(BaseModel):
    """Functional units of one demonstration, in the order they happened."""

    name: str = ""
    units: Tuple[FunctionalUnit, ...] = Field(min_length=1)


class ObjectUsage(BaseModel):
    producers: Tuple[int, ...] = ()
    consumers: Tuple[int, ...] = ()


def object_identity(node: ObjectNode) -> ObjectKey:
    return (
        _normalize(node.label),
        tuple(sorted({_normalize(s) for s in node.states})),
        tuple(sorted({_normalize(i) for i in node.ingredients})),
    )


def unit_equals(a: FunctionalUnit, b: FunctionalUnit) -> bool:
    return a.signature == b.signature


def build_object_index(units) -> Dict[ObjectKey, ObjectUsage]:
    producers: Dict[ObjectKey, set] = {}
    consumers: Dict[ObjectKey, set] = {}
    for unit in units:
        for obj in unit.outputs:
            producers.setdefault(obj.key, set()).add(unit.id)
        for obj in unit.inputs:
            consumers.setdefault(obj.key, set()).add(unit.id)
    return {
        key: ObjectUsage(
            producers=tuple(sorted(producers.get(key, ()))),
            consumers=tuple(sorted(consumers.get(key, ()))),
        )
        for key in sorted(producers.keys() | consumers.keys())
    }


class UniversalFoon(BaseModel):
    """Deduplicated union of subgraphs. Immutable once built."""

    model_config = ConfigDict(frozen=True)

    units: Tuple[FunctionalUnit, ...]

    _by_id: Dict[int, FunctionalUnit] = PrivateAttr(default_factory=dict)
    _index: Dict[ObjectKey, ObjectUsage] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def _check_units(self) -> "UniversalFoon":
        seen_ids = set()
        seen_signatures = set()
        for unit in self.units:
            if unit.id is None:
                raise ValueError("every unit in a universal FOON needs an id")
            if unit.id in seen_ids:
                raise ValueError(f"duplicate unit id {unit.id}")
            if unit.signature in seen_signatures:
                raise ValueError(f"unit {unit.id} duplicates another unit")
            seen_ids.add(unit.id)
            seen_signatures.add(unit.signature)
        return self

    def model_post_init(self, __context) -> None:
        self._by_id = {u.id: u for u in self.units}
        self._index = build_object_index(self.units)

    @property
    def object_index(self) -> Dict[ObjectKey, ObjectUsage]:
        return self._index

    def get_unit(self, unit_id: int) -> FunctionalUnit:
        return self._by_id[unit_id]

    def __len__(self) -> int:
        return len(self.units)
