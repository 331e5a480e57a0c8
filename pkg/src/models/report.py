"""Verification report models for MSCL runs and the CG_H counterexample."""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field, ValidationInfo, field_validator

from .serialization import dumps


class SubCheck(BaseModel):
    """One named comparison between an expected and a computed quantity."""

    name: str = Field(min_length=1)
    expected: List[List[float]] = Field(description="Expected values as a matrix (scalars are 1x1)")
    computed: List[List[float]] = Field(description="Computed values, same shape as expected")
    error: float = Field(ge=0.0, description="Largest entrywise absolute deviation")
    tolerance: float = Field(gt=0.0)
    passed: bool

    @field_validator("computed")
    @classmethod
    def validate_shape(cls, v: List[List[float]], info: ValidationInfo) -> List[List[float]]:
        expected = info.data.get("expected")
        if expected is not None and [len(row) for row in v] != [len(row) for row in expected]:
            raise ValueError("computed and expected values differ in shape")
        return v


class CounterexampleRecord(BaseModel):
    """The CG_H Laplace computations on the equilateral triangle and the two-triangle mesh."""

    degree: int = 1
    labels: List[str] = Field(default_factory=list)
    checks: List[SubCheck] = Field(default_factory=list)
    strong_residual: float = Field(0.0, description="Normalized strong residual on the whole mesh")
    strong_absolute: float = Field(0.0, description="Infinity norm of the antisymmetric part")

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(check.passed for check in self.checks)

    @property
    def failed_checks(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]

    def to_json(self) -> str:
        return dumps({**self.model_dump(mode="json"), "passed": self.passed})


class StrongEntryModel(BaseModel):
    region: List[int] = Field(min_length=1)
    residual: float = Field(ge=0.0)
    absolute: float = Field(ge=0.0)


class MeshStats(BaseModel):
    dim: int = Field(ge=1, le=2)
    vertices: int = Field(ge=1)
    cells: int = Field(ge=1)
    facets: int = Field(ge=1)
    internal_facets: int = Field(ge=0)


class MsclReport(BaseModel):
    """Outcome of one verification entry."""

    name: str
    method: str
    degree: int
    system: str
    mesh: Optional[MeshStats] = None
    local_mscl_max: Optional[float] = None
    local_mscl_per_cell: List[float] = Field(default_factory=list)
    strong_entries: List[StrongEntryModel] = Field(default_factory=list)
    jump_identity_max: Optional[float] = None
    conservativity_max: Optional[float] = None
    schur_asymmetry: Optional[float] = None
    weak_mscl: Optional[float] = None
    closedness: Optional[float] = None
    reciprocity: Optional[float] = None
    newton_iters: Optional[int] = None
    expect_strong_fail: bool = False
    gates: Dict[str, bool] = Field(default_factory=dict)
    passed: bool = False
    error: Optional[str] = None

    @property
    def strong_max(self) -> Optional[float]:
        if not self.strong_entries:
            return None
        return max(entry.residual for entry in self.strong_entries)

    def summary_row(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "method": f"{self.method}(r={self.degree})",
            "system": self.system,
            "local": self.local_mscl_max,
            "strong": self.strong_max,
            "conservativity": self.conservativity_max,
            "schur": self.schur_asymmetry,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return dumps(self)

    @classmethod
    def from_json(cls, text: str) -> "MsclReport":
        return cls.model_validate_json(text)
