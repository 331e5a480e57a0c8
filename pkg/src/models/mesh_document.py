"""Mesh document model: the on-disk form of a simplicial mesh."""

from typing import List

from pydantic import BaseModel, Field, field_validator, model_validator

from .serialization import dumps


class MeshDocument(BaseModel):
    """{"dim": m, "vertices": [[x,(y)],...], "cells": [[i0,...,im],...]} with 0-based indices."""

    dim: int = Field(description="Spatial dimension", ge=1, le=2)
    vertices: List[List[float]] = Field(description="Vertex coordinates")
    cells: List[List[int]] = Field(description="Positively oriented vertex index tuples")

    @field_validator("vertices")
    @classmethod
    def validate_vertices(cls, v: List[List[float]]) -> List[List[float]]:
        if not v:
            raise ValueError("mesh document has no vertices")
        return v

    @model_validator(mode="after")
    def validate_shapes(self) -> "MeshDocument":
        for row in self.vertices:
            if len(row) != self.dim:
                raise ValueError(f"vertex {row} does not have {self.dim} coordinates")
        n_vertices = len(self.vertices)
        for cell in self.cells:
            if len(cell) != self.dim + 1:
                raise ValueError(f"cell {cell} does not have {self.dim + 1} vertices")
            if any(i < 0 or i >= n_vertices for i in cell):
                raise ValueError("vertex index out of range")
        return self

    def to_json(self) -> str:
        return dumps({"dim": self.dim, "vertices": self.vertices, "cells": self.cells})
