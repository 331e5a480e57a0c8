"""Base error classes for the HDG multisymplecticity workbench."""

import traceback
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence


class ErrorSeverity(str, Enum):
    """Error severity levels."""
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


class ErrorCategory(str, Enum):
    """Error categories for classification."""
    VALIDATION = "validation"
    CONFIGURATION = "configuration"
    MESH = "mesh"
    BASIS = "basis"
    SYSTEM = "system"
    ASSEMBLY = "assembly"
    SOLVER = "solver"
    VERIFICATION = "verification"


class WorkbenchError(Exception):
    """Base exception for all workbench errors."""

    def __init__(
        self,
        message: str,
        error_code: str = "UNKNOWN_ERROR",
        category: ErrorCategory = ErrorCategory.SOLVER,
        severity: ErrorSeverity = ErrorSeverity.MEDIUM,
        context: Optional[Dict[str, Any]] = None,
        recoverable: bool = False,
        original_error: Optional[Exception] = None,
    ):
        super().__init__(message)
        self.message = message
        self.error_code = error_code
        self.category = category
        self.severity = severity
        self.context = context or {}
        self.recoverable = recoverable
        self.original_error = original_error
        self.timestamp = datetime.now()
        self.traceback = traceback.format_exc()

    def to_dict(self) -> Dict[str, Any]:
        """Convert error to dictionary for logging/serialization."""
        return {
            "error_code": self.error_code,
            "message": self.message,
            "category": self.category.value,
            "severity": self.severity.value,
            "context": self.context,
            "recoverable": self.recoverable,
            "timestamp": self.timestamp.isoformat(),
            "original_error": str(self.original_error) if self.original_error else None,
        }


class ValidationError(WorkbenchError):
    """Error for invalid arguments or documents."""

    def __init__(self, message: str, field: Optional[str] = None, value: Any = None, **kwargs: Any):
        super().__init__(
            message=message,
            error_code="VALIDATION_ERROR",
            category=ErrorCategory.VALIDATION,
            severity=ErrorSeverity.LOW,
            context={"field": field, "value": value},
            **kwargs,
        )
        self.field = field
        self.value = value


class ConfigurationError(WorkbenchError):
    """Error for unresolvable configuration or campaign entries."""

    def __init__(self, message: str, setting: Optional[str] = None, **kwargs: Any):
        super().__init__(
            message=message,
            error_code="CONFIGURATION_ERROR",
            category=ErrorCategory.CONFIGURATION,
            severity=ErrorSeverity.LOW,
            context={"setting": setting},
            **kwargs,
        )
        self.setting = setting


class MeshError(WorkbenchError):
    """Error for invalid mesh construction."""

    def __init__(self, message: str, cell_id: Optional[int] = None, **kwargs: Any):
        super().__init__(
            message=message,
            error_code="MESH_ERROR",
            category=ErrorCategory.MESH,
            severity=ErrorSeverity.MEDIUM,
            context={"cell_id": cell_id},
            **kwargs,
        )
        self.cell_id = cell_id


class MeshFormatError(WorkbenchError):
    """Error for malformed mesh documents."""

    def __init__(self, message: str, path: Optional[str] = None, **kwargs: Any):
        super().__init__(
            message=message,
            error_code="MESH_FORMAT_ERROR",
            category=ErrorCategory.VALIDATION,
            severity=ErrorSeverity.LOW,
            context={"path": path},
            **kwargs,
        )
        self.path = path


class BasisError(WorkbenchError):
    """Error for unsupported polynomial spaces or quadrature requests."""

    def __init__(self, message: str, kind: Optional[str] = None, degree: Optional[int] = None, **kwargs: Any):
        super().__init__(
            message=message,
            error_code="BASIS_ERROR",
            category=ErrorCategory.BASIS,
            severity=ErrorSeverity.MEDIUM,
            context={"kind": kind, "degree": degree},
            **kwargs,
        )
        self.kind = kind
        self.degree = degree


class QuadratureError(BasisError):
    """Error for quadrature degrees beyond the supported range."""

    def __init__(self, message: str, degree: Optional[int] = None, **kwargs: Any):
        super().__init__(message, kind="quadrature", degree=degree, **kwargs)
        self.error_code = "QUADRATURE_ERROR"


class SystemDefinitionError(WorkbenchError):
    """Error for inconsistent or unknown canonical systems."""

    def __init__(self, message: str, system: Optional[str] = None, **kwargs: Any):
        super().__init__(
            message=message,
            error_code="SYSTEM_DEFINITION_ERROR",
            category=ErrorCategory.SYSTEM,
            severity=ErrorSeverity.MEDIUM,
            context={"system": system},
            **kwargs,
        )
        self.system = system


class ClosednessError(WorkbenchError):
    """Error raised when a construction needs a closed (multisymplectic) system."""

    def __init__(self, message: str, residual: float, system: Optional[str] = None, **kwargs: Any):
        super().__init__(
            message=message,
            error_code="CLOSEDNESS_ERROR",
            category=ErrorCategory.SYSTEM,
            severity=ErrorSeverity.MEDIUM,
            context={"residual": residual, "system": system},
            **kwargs,
        )
        self.residual = residual


class MethodError(WorkbenchError):
    """Error for unsupported method family/degree/dimension combinations."""

    def __init__(self, message: str, family: Optional[str] = None, degree: Optional[int] = None, **kwargs: Any):
        super().__init__(
            message=message,
            error_code="METHOD_ERROR",
            category=ErrorCategory.VALIDATION,
            severity=ErrorSeverity.LOW,
            context={"family": family, "degree": degree},
            **kwargs,
        )
        self.family = family
        self.degree = degree


class AssemblyError(WorkbenchError):
    """Error for inconsistent assembly state."""

    def __init__(self, message: str, cell_id: Optional[int] = None, **kwargs: Any):
        super().__init__(
            message=message,
            error_code="ASSEMBLY_ERROR",
            category=ErrorCategory.ASSEMBLY,
            severity=ErrorSeverity.HIGH,
            context={"cell_id": cell_id},
            **kwargs,
        )
        self.cell_id = cell_id


class SingularBlockError(WorkbenchError):
    """Error for a singular element block in a local solver."""

    def __init__(
        self,
        message: str,
        cell_id: int,
        penalties: Optional[Sequence[float]] = None,
        condition: Optional[float] = None,
        **kwargs: Any,
    ):
        penalty_list: List[float] = [float(p) for p in penalties] if penalties is not None else []
        super().__init__(
            message=message,
            error_code="SINGULAR_BLOCK",
            category=ErrorCategory.ASSEMBLY,
            severity=ErrorSeverity.HIGH,
            context={"cell_id": cell_id, "penalties": penalty_list, "condition": condition},
            **kwargs,
        )
        self.cell_id = cell_id
        self.penalties = penalty_list
        self.condition = condition


class ConvergenceError(WorkbenchError):
    """Error for Newton iterations that fail to converge."""

    def __init__(self, message: str, iterations: int, residual: float, **kwargs: Any):
        super().__init__(
            message=message,
            error_code="CONVERGENCE_ERROR",
            category=ErrorCategory.SOLVER,
            severity=ErrorSeverity.HIGH,
            context={"iterations": iterations, "residual": residual},
            **kwargs,
        )
        self.iterations = iterations
        self.residual = residual


class SingularJacobianError(WorkbenchError):
    """Error for a singular global (condensed) Jacobian."""

    def __init__(self, message: str, **kwargs: Any):
        super().__init__(
            message=message,
            error_code="SINGULAR_JACOBIAN",
            category=ErrorCategory.SOLVER,
            severity=ErrorSeverity.HIGH,
            **kwargs,
        )


class VerificationError(WorkbenchError):
    """Error for verification preconditions that do not hold."""

    def __init__(self, message: str, check: Optional[str] = None, **kwargs: Any):
        super().__init__(
            message=message,
            error_code="VERIFICATION_ERROR",
            category=ErrorCategory.VERIFICATION,
            severity=ErrorSeverity.MEDIUM,
            context={"check": check},
            **kwargs,
        )
        self.check = check
