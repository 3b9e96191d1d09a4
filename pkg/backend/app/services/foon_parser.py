"""
Readers and writers for the planner's text inputs.

Subgraph file (UTF-8, LF, tab-separated, one record per line):

    # comment          ignored (a leading comment names the subgraph)
    O<TAB>label        starts an object node
    S<TAB>state        adds a state to the current object (repeatable)
    I<TAB>ingredient   adds an ingredient to the current object (repeatable)
    M<TAB>motion       the unit's motion; objects before it are inputs, after it outputs
    //                 ends the functional unit

Kitchen file: one object per line, ``label{state,...}[ingredient,...]``,
braces and brackets optional, blank lines and ``#`` comments skipped.

Profile file: a JSON object

    {"name": "nao", "default": 0.9, "assistant": 1.0,
     "motions": {"stir": 0.75, "heat": "1%"},
     "units": {"4": 0.01}}

Rates are fractions or percent strings and must lie in (0, 1].
"""

import json
import re
from pathlib import Path
from typing import List, Optional

from loguru import logger
from pydantic import ValidationError

from ..core.errors import ParseError, ProfileError
from ..models.foon import FunctionalUnit, MotionNode, ObjectNode, Subgraph
from ..models.inventory import KitchenInventory, RobotProfile

_ITEM = re.compile(
    r"^(?P<label>[^{}\[\]]+?)\s*"
    r"(?:\{(?P<states>[^{}\[\]]*)\})?\s*"
    r"(?:\[(?P<ingredients>[^{}\[\]]*)\])?$"
)


class _UnitBuilder:
    def __init__(self, start: int):
        self.start = start
        self.inputs: List[ObjectNode] = []
        self.outputs: List[ObjectNode] = []
        self.motion: Optional[str] = None
        self._label: Optional[str] = None
        self._states: List[str] = []
        self._ingredients: List[str] = []

    @property
    def has_object(self) -> bool:
        return self._label is not None

    def begin_object(self, label: str) -> None:
        self.flush_object()
        self._label = label

    def add_state(self, state: str) -> None:
        self._states.append(state)

    def add_ingredient(self, ingredient: str) -> None:
        self._ingredients.append(ingredient)

    def flush_object(self) -> None:
        if self._label is None:
            return
        node = ObjectNode(label=self._label, states=self._states, ingredients=self._ingredients)
        (self.outputs if self.motion is not None else self.inputs).append(node)
        self._label, self._states, self._ingredients = None, [], []

    def build(self) -> FunctionalUnit:
        return FunctionalUnit(inputs=self.inputs, outputs=self.outputs, motion=MotionNode(label=self.motion))


def parse_subgraph(text: str, name: Optional[str] = None) -> Subgraph:
    units: List[FunctionalUnit] = []
    builder: Optional[_UnitBuilder] = None
    header: Optional[str] = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if header is None and not units and builder is None:
                header = stripped[1:].strip()
            continue

        if stripped == "//":
            if builder is None:
                raise ParseError("'//' without a functional unit", lineno)
            builder.flush_object()
            if builder.motion is None:
                raise ParseError("functional unit has no motion line", lineno)
            if not builder.outputs:
                raise ParseError("functional unit has no output objects", lineno)
            units.append(builder.build())
            builder = None
            continue

        tag, sep, value = line.partition("\t")
        tag, value = tag.strip(), value.strip()
        if not sep:
            raise ParseError(f"expected '<tag><TAB><value>', got {line!r}", lineno)
        if tag not in ("O", "S", "I", "M"):
            raise ParseError(f"unknown record tag {tag!r}", lineno)
        if not value:
            raise ParseError(f"'{tag}' record has an empty value", lineno)

        if builder is None:
            builder = _UnitBuilder(lineno)

        if tag == "O":
            builder.begin_object(value)
        elif tag in ("S", "I"):
            if not builder.has_object:
                raise ParseError(f"'{tag}' record outside an object", lineno)
            if tag == "S":
                builder.add_state(value)
            else:
                builder.add_ingredient(value)
        else:
            if builder.motion is not None:
                raise ParseError("second motion line in one functional unit", lineno)
            builder.flush_object()
            if not builder.inputs:
                raise ParseError("functional unit has no input objects", lineno)
            builder.motion = value

    if builder is not None:
        raise ParseError("functional unit is not terminated by '//'", builder.start)
    if not units:
        raise ParseError("no functional units")

    return Subgraph(name=name if name is not None else (header or ""), units=units)


def _object_lines(node: ObjectNode) -> List[str]:
    lines = [f"O\t{node.label}"]
    lines += [f"S\t{s}" for s in sorted(node.states)]
    lines += [f"I\t{i}" for i in sorted(node.ingredients)]
    return lines


def write_subgraph(subgraph: Subgraph) -> str:
    """Canonical form: sorted states and ingredients, one trailing newline."""
    lines: List[str] = []
    if subgraph.name:
        lines.append(f"# {subgraph.name}")
    for unit in subgraph.units:
        for node in unit.inputs:
            lines += _object_lines(node)
        lines.append(f"M\t{unit.motion.label}")
        for node in unit.outputs:
            lines += _object_lines(node)
        lines.append("//")
    return "\n".join(lines) + "\n"


def _split(group: Optional[str]) -> List[str]:
    if not group:
        return []
    return [part.strip() for part in group.split(",") if part.strip()]


def parse_object_spec(spec: str, line: Optional[int] = None) -> ObjectNode:
    """``tea cup{contains}[sugar,tea]`` -> ObjectNode."""
    match = _ITEM.match(spec.strip())
    if not match:
        raise ParseError(f"malformed object {spec!r}; expected label{{states}}[ingredients]", line)
    return ObjectNode(
        label=match.group("label"),
        states=_split(match.group("states")),
        ingredients=_split(match.group("ingredients")),
    )


def parse_kitchen(text: str) -> KitchenInventory:
    items = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        items.append(parse_object_spec(stripped, lineno))
    kitchen = KitchenInventory(items=items)
    if len(kitchen) < len(items):
        logger.debug(f"Kitchen: dropped {len(items) - len(kitchen)} duplicate item(s)")
    return kitchen


def write_kitchen(kitchen: KitchenInventory) -> str:
    return "".join(f"{item}\n" for item in kitchen.items)


def parse_profile(text: str) -> RobotProfile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProfileError(f"invalid JSON: {e.msg}", e.lineno) from None
    if not isinstance(data, dict):
        raise ProfileError("profile must be a JSON object")
    try:
        return RobotProfile.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "profile"
        raise ProfileError(f"{where}: {first['msg']}") from None


def write_profile(profile: RobotProfile) -> str:
    data = profile.model_dump(by_alias=True)
    data["units"] = {str(k): v for k, v in sorted(data["units"].items())}
    data["motions"] = dict(sorted(data["motions"].items()))
    return json.dumps(data, indent=2) + "\n"


def _read(path: Path) -> str:
    return Path(path).read_text(encoding="utf-8")


def read_subgraph_file(path: Path) -> Subgraph:
    path = Path(path)
    try:
        return parse_subgraph(_read(path), name=path.stem)
    except ParseError as e:
        raise e.with_source(str(path)) from None


def read_kitchen_file(path: Path) -> KitchenInventory:
    try:
        return parse_kitchen(_read(path))
    except ParseError as e:
        raise e.with_source(str(path)) from None


def read_profile_file(path: Path) -> RobotProfile:
    try:
        return parse_profile(_read(path))
    except ParseError as e:
        raise e.with_source(str(path)) from None
