"""
JSON file formats shared by the command line and the HTTP service.

Instance:        {"classes": [3, 3, 3], "edges": [[0, 0, 0], ...]}
Colour config:   {"d": 2, "classes": [[["1", "0"], ["-1/2", "1/3"], ...], ...]}
"""
import json
from fractions import Fraction
from pathlib import Path
from typing import List, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from src.hypergraph.core import ClassShape, OctahedralSystem, PartiteHypergraph
from src.hypergraph.errors import ShapeError


class InstanceFile(BaseModel):
    classes: List[int] = Field(..., min_length=1)
    edges: List[List[int]] = Field(default_factory=list)

    @field_validator("classes")
    @classmethod
    def _positive(cls, sizes: List[int]) -> List[int]:
        if any(m < 1 for m in sizes):
            raise ValueError(f"class sizes must be positive, got {sizes}")
        return sizes

    @model_validator(mode="after")
    def _edges_fit(self) -> "InstanceFile":
        for e in self.edges:
            if len(e) != len(self.classes):
                raise ValueError(f"edge {e} does not have {len(self.classes)} positions")
            for p, m in zip(e, self.classes):
                if not 0 <= p < m:
                    raise ValueError(f"edge {e} has a position outside its class")
        return self

    @property
    def shape(self) -> ClassShape:
        return ClassShape(tuple(self.classes))

    def to_hypergraph(self) -> PartiteHypergraph:
        return PartiteHypergraph(self.shape, frozenset(tuple(e) for e in self.edges))

    def to_system(self) -> OctahedralSystem:
        """The edge set as an OctahedralSystem, without checking parity"""
        return OctahedralSystem(self.shape, frozenset(tuple(e) for e in self.edges))

    @classmethod
    def from_hypergraph(cls, system: PartiteHypergraph) -> "InstanceFile":
        return cls(**system.to_instance())


class ColourConfigFile(BaseModel):
    d: int = Field(..., ge=1)
    classes: List[List[List[str]]]

    @field_validator("classes", mode="before")
    @classmethod
    def _stringify(cls, value):
        # integers and floats written by hand are accepted and read exactly
        return [[[str(c) for c in point] for point in cls_points] for cls_points in value]

    @model_validator(mode="after")
    def _dimensions(self) -> "ColourConfigFile":
        if len(self.classes) != self.d + 1:
            raise ValueError(f"a configuration in dimension {self.d} needs {self.d + 1} classes")
        for points in self.classes:
            if not points:
                raise ValueError("every colour class needs at least one point")
            for point in points:
                if len(point) != self.d:
                    raise ValueError(f"point {point} does not have {self.d} coordinates")
                for c in point:
                    try:
                        Fraction(c)
                    except (ValueError, ZeroDivisionError):
                        raise ValueError(f"coordinate {c!r} is not an exact rational")
        return self

    def coordinates(self) -> List[List[tuple]]:
        return [[tuple(Fraction(c) for c in point) for point in points] for points in self.classes]

    @classmethod
    def from_coordinates(cls, d: int, classes) -> "ColourConfigFile":
        return cls(d=d, classes=[[[_fraction_text(c) for c in p] for p in points] for points in classes])


def _fraction_text(value: Fraction) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _read_json(source: Union[str, Path]) -> dict:
    try:
        return json.loads(Path(source).read_text())
    except json.JSONDecodeError as e:
        raise ShapeError(f"{source}: invalid JSON ({e})")


def load_instance(source: Union[str, Path]) -> InstanceFile:
    try:
        return InstanceFile.model_validate(_read_json(source))
    except ValidationError as e:
        raise ShapeError(f"{source}: {e.errors()[0]['msg']}")


def load_colour_config(source: Union[str, Path]) -> ColourConfigFile:
    try:
        return ColourConfigFile.model_validate(_read_json(source))
    except ValidationError as e:
        raise ShapeError(f"{source}: {e.errors()[0]['msg']}")
