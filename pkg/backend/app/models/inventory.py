from typing import Dict, FrozenSet, Tuple

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator

from .foon import ObjectKey, ObjectNode


def coerce_rate(value, key: str) -> float:
    """Accept 0.75 or "75%"; reject anything outside (0, 1]."""
    raw = value
    try:
        if isinstance(value, str):
            text = value.strip()
            value = float(text[:-1]) / 100 if text.endswith("%") else float(text)
        else:
            value = float(value)
    except (TypeError, ValueError):
        raise ValueError(f"success rate for '{key}' is not a number: {raw!r}") from None
    if not 0 < value <= 1:
        raise ValueError(f"success rate for '{key}' must be in (0, 1], got {raw!r}")
    return value


class KitchenInventory(BaseModel):
    """Objects (with states and contents) the robot can find in its environment."""

    model_config = ConfigDict(frozen=True)

    items: Tuple[ObjectNode, ...] = ()

    _keys: FrozenSet[ObjectKey] = PrivateAttr(default_factory=frozenset)

    @field_validator("items")
    @classmethod
    def _dedupe(cls, items: Tuple[ObjectNode, ...]) -> Tuple[ObjectNode, ...]:
        unique: Dict[ObjectKey, ObjectNode] = {}
        for item in items:
            unique.setdefault(item.key, item)
        return tuple(unique[key] for key in sorted(unique))

    def model_post_init(self, __context) -> None:
        self._keys = frozenset(item.key for item in self.items)

    @property
    def keys(self) -> FrozenSet[ObjectKey]:
        return self._keys

    def contains(self, node: ObjectNode) -> bool:
        return node.key in self._keys

    def __len__(self) -> int:
        return len(self.items)


class RobotProfile(BaseModel):
    """
    Success rates for one robot.

    Lookup precedence: ``unit_rates[id]`` > ``motion_rates[label]`` > ``default_rate``.
    ``assistant_rate`` applies to steps handed to the human assistant.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    name: str = "robot"
    unit_rates: Dict[int, float] = Field(default_factory=dict, alias="units")
    motion_rates: Dict[str, float] = Field(default_factory=dict, alias="motions")
    default_rate: float = Field(alias="default")
    assistant_rate: float = Field(1.0, alias="assistant")

    @field_validator("unit_rates", mode="before")
    @classmethod
    def _unit_rates(cls, value):
        rates = {}
        for key, rate in (value or {}).items():
            try:
                unit_id = int(key)
            except (TypeError, ValueError):
                raise ValueError(f"unit id '{key}' is not an integer") from None
            rates[unit_id] = coerce_rate(rate, f"units.{key}")
        return rates

    @field_validator("motion_rates", mode="before")
    @classmethod
    def _motion_rates(cls, value):
        rates = {}
        for key, rate in (value or {}).items():
            label = str(key).strip().lower()
            if not label:
                raise ValueError("motion label is empty")
            rates[label] = coerce_rate(rate, f"motions.{key}")
        return rates

    @field_validator("default_rate", mode="before")
    @classmethod
    def _default_rate(cls, value):
        return coerce_rate(value, "default")

    @field_validator("assistant_rate", mode="before")
    @classmethod
    def _assistant_rate(cls, value):
        return coerce_rate(value, "assistant")
