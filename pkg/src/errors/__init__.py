"""Error handling module for the HDG multisymplecticity workbench."""

from .base import (
    AssemblyError,
    BasisError,
    ClosednessError,
    ConfigurationError,
    ConvergenceError,
    ErrorCategory,
    ErrorSeverity,
    MeshError,
    MeshFormatError,
    MethodError,
    QuadratureError,
    SingularBlockError,
    SingularJacobianError,
    SystemDefinitionError,
    ValidationError,
    VerificationError,
    WorkbenchError,
)

from .handlers import (
    EXIT_GATE_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    ErrorHandler,
    global_error_handler,
    handle_errors,
)

__all__ = [
    # Base errors
    "WorkbenchError",
    "ErrorCategory",
    "ErrorSeverity",
    "ValidationError",
    "ConfigurationError",

    # Domain errors
    "MeshError",
    "MeshFormatError",
    "BasisError",
    "QuadratureError",
    "SystemDefinitionError",
    "ClosednessError",
    "MethodError",
    "AssemblyError",
    "SingularBlockError",
    "ConvergenceError",
    "SingularJacobianError",
    "VerificationError",

    # Error handlers
    "ErrorHandler",
    "global_error_handler",
    "handle_errors",
    "EXIT_OK",
    "EXIT_GATE_FAILURE",
    "EXIT_USAGE",
]
