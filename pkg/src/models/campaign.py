"""Verification campaign documents."""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from .serialization import dumps


class MeshKind(str, Enum):
    TWO_EQUILATERAL = "two_equilateral"
    RECT = "rect"
    INTERVAL = "interval"
    FILE = "file"


class MeshSpec(BaseModel):
    """How to obtain the mesh of an entry: a builder with its flags, or a mesh document path."""

    kind: MeshKind = MeshKind.RECT
    width: float = Field(1.0, gt=0.0)
    height: float = Field(1.0, gt=0.0)
    nx: int = Field(4, ge=1)
    ny: int = Field(4, ge=1)
    perturb: float = Field(0.0, ge=0.0, lt=0.3)
    seed: int = 0
    interval: Tuple[float, float] = (0.0, 1.0)
    cells: int = Field(8, ge=1)
    path: Optional[str] = None

    @model_validator(mode="after")
    def validate_kind(self) -> "MeshSpec":
        if self.kind == MeshKind.FILE and not self.path:
            raise ValueError("a file mesh needs a path")
        if self.interval[1] <= self.interval[0]:
            raise ValueError("interval end must exceed its start")
        return self

    @property
    def dim(self) -> Optional[int]:
        if self.kind == MeshKind.INTERVAL:
            return 1
        if self.kind == MeshKind.FILE:
            return None
        return 2


class PenaltySpec(BaseModel):
    """A constant penalty, distinct values on the two sides of internal facets, or an explicit table."""

    value: float = Field(1.0, ge=0.0)
    plus: Optional[float] = Field(None, ge=0.0)
    minus: Optional[float] = Field(None, ge=0.0)
    table: Optional[List[Tuple[int, int, float]]] = Field(
        None, description="(cell, local facet, lambda) rows; missing facets use `value`"
    )

    @model_validator(mode="after")
    def validate_sides(self) -> "PenaltySpec":
        if (self.plus is None) != (self.minus is None):
            raise ValueError("two-sided penalties need both plus and minus")
        if self.plus is not None and self.table is not None:
            raise ValueError("give either two-sided values or a table, not both")
        if self.table is not None and any(row[2] < 0.0 for row in self.table):
            raise ValueError("penalty values must be nonnegative")
        return self

    @property
    def two_sided(self) -> bool:
        return self.plus is not None


class BoundaryKind(str, Enum):
    RANDOM = "random"
    ZERO = "zero"


class BoundarySpec(BaseModel):
    kind: BoundaryKind = BoundaryKind.RANDOM
    seed: Optional[int] = Field(None, description="Defaults to the campaign seed")


class RegionSamplerSpec(BaseModel):
    count: int = Field(10, ge=0)
    seed: Optional[int] = None
    regions: Optional[List[List[int]]] = Field(None, description="Explicit regions replace the sampler")


class ToleranceOverrides(BaseModel):
    closedness: Optional[float] = Field(None, gt=0.0)
    local: Optional[float] = Field(None, gt=0.0)
    strong: Optional[float] = Field(None, gt=0.0)
    conservativity: Optional[float] = Field(None, gt=0.0)
    jump: Optional[float] = Field(None, gt=0.0)
    schur: Optional[float] = Field(None, gt=0.0)
    reciprocity: Optional[float] = Field(None, gt=0.0)

    def present(self) -> Dict[str, float]:
        return {k: v for k, v in self.model_dump().items() if v is not None}


class CampaignEntry(BaseModel):
    """One (method, degree, system, mesh) configuration to verify."""

    name: Optional[str] = None
    method: str = Field(min_length=1)
    degree: int = Field(ge=0)
    system: str = Field("poisson", min_length=1, description="name[:key=value,...]")
    mesh: MeshSpec = Field(default_factory=MeshSpec)
    penalty: PenaltySpec = Field(default_factory=PenaltySpec)
    boundary: BoundarySpec = Field(default_factory=BoundarySpec)
    regions: RegionSamplerSpec = Field(default_factory=RegionSamplerSpec)
    expect_strong_fail: bool = False
    reciprocity: bool = Field(False, description="Also record the discrete reciprocity residual")

    @field_validator("method")
    @classmethod
    def validate_method(cls, v: str) -> str:
        return v.strip().lower()

    @property
    def label(self) -> str:
        return self.name or f"{self.method}-r{self.degree}-{self.system.split(':')[0]}-{self.mesh.kind.value}"


class VerifyCampaign(BaseModel):
    entries: List[CampaignEntry] = Field(min_length=1)
    output: Optional[str] = Field(None, description="Report directory; settings.output_dir when unset")
    seed: Optional[int] = None
    tolerances: ToleranceOverrides = Field(default_factory=ToleranceOverrides)

    @model_validator(mode="after")
    def validate_labels(self) -> "VerifyCampaign":
        labels = [entry.label for entry in self.entries]
        if len(labels) != len(set(labels)):
            raise ValueError("campaign entry labels must be unique")
        return self

    def to_json(self) -> str:
        return dumps(self)

    @classmethod
    def from_json(cls, text: str) -> "VerifyCampaign":
        return cls.model_validate_json(text)
