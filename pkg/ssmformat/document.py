"""
Document model of the ``.ssm`` format. A parsed document holds canonical
values (polynomials and Grassmann elements), so two documents are equal
exactly when they describe the same objects.
"""
from __future__ import annotations

from enum import Enum
from typing import Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from algebra.grassmann import GrassmannElement
from algebra.superpoly import SuperDomainSignature, SuperPolynomial

__all__ = [
    "MapRole",
    "ROLE_ARITY",
    "SpaceDecl",
    "BundleDecl",
    "ChartDecl",
    "OverlapDecl",
    "MapDecl",
    "MapRef",
    "CheckTask",
    "SolveTask",
    "TransitionTask",
    "BerezinianTask",
    "SemigroupTask",
    "HomotopyCheckTask",
    "HomotopyAverageTask",
    "Task",
    "Document",
]


class MapRole(str, Enum):
    coordinate = "coordinate"
    transition = "transition"
    projection = "projection"
    section = "section"
    trivialization = "trivialization"
    bundle_transition = "bundle_transition"
    cross = "cross"
    named = "named"

    @classmethod
    def _missing_(cls, value: object) -> "MapRole":
        if not isinstance(value, str):
            raise ValueError(f"Unknown map role: {value}")
        val = value.strip().lower()
        synonyms = {
            "phi": "coordinate",
            "chart": "coordinate",
            "glue": "transition",
            "pi": "projection",
            "lambda": "trivialization",
            "bundle-transition": "bundle_transition",
            "tilde": "cross",
            "homotopy": "named",
        }
        if val in synonyms:
            return cls(synonyms[val])
        return super()._missing_(val)


ROLE_ARITY = {
    MapRole.coordinate: 1,
    MapRole.transition: 2,
    MapRole.projection: 2,
    MapRole.section: 1,
    MapRole.trivialization: 1,
    MapRole.bundle_transition: 2,
    MapRole.cross: 2,
    MapRole.named: 2,
}


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class SpaceDecl(_Frozen):
    name: str
    signature: SuperDomainSignature


class BundleDecl(_Frozen):
    total: str
    base: str
    fiber: str


class ChartDecl(_Frozen):
    name: str
    semi: bool = False
    second: bool = False


class OverlapDecl(_Frozen):
    charts: Tuple[str, ...]

    @field_validator("charts")
    @classmethod
    def _at_least_two(cls, v: Tuple[str, ...]) -> Tuple[str, ...]:
        if len(v) < 2:
            raise ValueError("an overlap names at least two charts")
        return v


class MapDecl(_Frozen):
    """``role[indices]`` for role maps, ``name[SOURCE, TARGET]`` for named ones."""

    role: MapRole
    name: str
    indices: Tuple[str, ...]
    source: SuperDomainSignature
    target: SuperDomainSignature
    components: Tuple[SuperPolynomial, ...]

    @model_validator(mode="after")
    def _check_shape(self) -> "MapDecl":
        if len(self.indices) != ROLE_ARITY[self.role]:
            raise ValueError(f"{self.name} takes {ROLE_ARITY[self.role]} indices")
        if len(self.components) != self.target.dimension:
            raise ValueError(f"{self.name} needs {self.target.dimension} components")
        return self

    @property
    def key(self) -> Tuple[str, ...]:
        if self.role is MapRole.named:
            return (self.name,)
        return (self.role.value,) + self.indices


class MapRef(_Frozen):
    """Reference to a declared map: ``f`` or ``transition[A,B]``."""

    role: MapRole
    name: str
    indices: Tuple[str, ...] = ()

    @property
    def key(self) -> Tuple[str, ...]:
        if self.role is MapRole.named:
            return (self.name,)
        return (self.role.value,) + self.indices

    def render(self) -> str:
        if self.role is MapRole.named:
            return self.name
        return f"{self.role.value}[{', '.join(self.indices)}]"


class CheckTask(_Frozen):
    kind: Literal["check"] = "check"
    n_max: Optional[int] = Field(default=None, ge=1)
    reflexive: bool = False


class SolveTask(_Frozen):
    """``coefficient * X = rhs`` in the Grassmann algebra."""

    kind: Literal["solve"] = "solve"
    coefficient: GrassmannElement
    rhs: GrassmannElement


class TransitionTask(_Frozen):
    kind: Literal["transition"] = "transition"
    first: str
    second: str
    degree: Optional[int] = Field(default=None, ge=0)


class BerezinianTask(_Frozen):
    kind: Literal["berezinian"] = "berezinian"
    target: MapRef
    at: Tuple[GrassmannElement, ...] = ()


class SemigroupTask(_Frozen):
    kind: Literal["semigroup"] = "semigroup"
    chart: str
    n_max: int = Field(ge=1)


class HomotopyCheckTask(_Frozen):
    kind: Literal["homotopy-check"] = "homotopy-check"
    parameter: Literal["even", "odd"]
    big_map: MapRef
    start_map: MapRef
    end_map: MapRef
    endpoints: Tuple[GrassmannElement, GrassmannElement]


class HomotopyAverageTask(_Frozen):
    kind: Literal["homotopy-average"] = "homotopy-average"
    start_map: MapRef
    end_map: MapRef
    endpoints: Tuple[GrassmannElement, GrassmannElement]
    degree: Optional[int] = Field(default=None, ge=0)


Task = Union[
    CheckTask,
    SolveTask,
    TransitionTask,
    BerezinianTask,
    SemigroupTask,
    HomotopyCheckTask,
    HomotopyAverageTask,
]


class Document(_Frozen):
    algebra: int = Field(ge=1)
    spaces: Tuple[SpaceDecl, ...] = ()
    bundle: Optional[BundleDecl] = None
    charts: Tuple[ChartDecl, ...] = ()
    overlaps: Tuple[OverlapDecl, ...] = ()
    maps: Tuple[MapDecl, ...] = ()
    tasks: Tuple[Task, ...] = ()

    def space(self, name: str) -> SpaceDecl:
        for s in self.spaces:
            if s.name == name:
                return s
        raise KeyError(name)

    def find_map(self, key: Tuple[str, ...]) -> Optional[MapDecl]:
        for m in self.maps:
            if m.key == key:
                return m
        return None
