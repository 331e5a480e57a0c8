"""Error handlers for the HDG multisymplecticity workbench."""

import asyncio
import logging
from functools import wraps
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .base import (
    ErrorCategory,
    ErrorSeverity,
    ValidationError,
    WorkbenchError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_GATE_FAILURE = 1
EXIT_USAGE = 2


class ErrorHandler:
    """Converts, logs and counts errors; maps them to CLI exit codes."""

    def __init__(self) -> None:
        self.error_counts: Dict[str, int] = {}
        self.entry_errors: Dict[str, List[WorkbenchError]] = {}

    def handle_error(
        self,
        error: Exception,
        context: Optional[Dict[str, Any]] = None,
        entry: Optional[str] = None,
    ) -> WorkbenchError:
        """Normalize an error, log it and record it against an optional campaign entry."""
        context = context or {}

        if not isinstance(error, WorkbenchError):
            error = self.convert(error, context)

        self._log_error(error, context)
        self._update_error_counts(error)

        if entry is not None:
            self.entry_errors.setdefault(entry, []).append(error)

        return error

    def convert(self, error: Exception, context: Optional[Dict[str, Any]] = None) -> WorkbenchError:
        """Convert a foreign exception to a WorkbenchError."""
        context = context or {}
        error_type = type(error).__name__

        # LinAlgError subclasses ValueError
        if isinstance(error, np.linalg.LinAlgError):
            return WorkbenchError(
                message=str(error),
                error_code="LINALG_ERROR",
                category=ErrorCategory.SOLVER,
                severity=ErrorSeverity.HIGH,
                context=context,
                original_error=error,
            )
        elif isinstance(error, (ValueError, KeyError, TypeError)):
            return ValidationError(message=str(error), original_error=error)
        return WorkbenchError(
            message=str(error),
            error_code=f"CONVERTED_{error_type.upper()}",
            context=context,
            original_error=error,
        )

    def exit_code_for(self, error: Exception) -> int:
        """Exit code contract: usage/config problems are 2, numeric failures are 1."""
        if not isinstance(error, WorkbenchError):
            error = self.convert(error)
        if error.category in (ErrorCategory.VALIDATION, ErrorCategory.CONFIGURATION):
            return EXIT_USAGE
        return EXIT_GATE_FAILURE

    def _log_error(self, error: WorkbenchError, context: Dict[str, Any]) -> None:
        """Log the error with appropriate level."""
        log_data = {
            "error_code": error.error_code,
            "category": error.category.value,
            "severity": error.severity.value,
            "error_context": {**error.context, **context},
        }

        if error.severity == ErrorSeverity.CRITICAL:
            logger.critical(error.message, extra=log_data)
        elif error.severity == ErrorSeverity.HIGH:
            logger.error(error.message, extra=log_data)
        elif error.severity == ErrorSeverity.MEDIUM:
            logger.warning(error.message, extra=log_data)
        else:
            logger.info(error.message, extra=log_data)

    def _update_error_counts(self, error: WorkbenchError) -> None:
        """Update error occurrence counts."""
        key = f"{error.category.value}:{error.error_code}"
        self.error_counts[key] = self.error_counts.get(key, 0) + 1

    def get_error_stats(self) -> Dict[str, Any]:
        """Get error statistics."""
        return {
            "error_counts": self.error_counts.copy(),
            "total_errors": sum(self.error_counts.values()),
            "failed_entries": sorted(self.entry_errors.keys()),
        }


def handle_errors(
    handler: Optional[ErrorHandler] = None,
    context: Optional[Dict[str, Any]] = None,
) -> Callable:
    """Decorator converting foreign exceptions into WorkbenchError after logging them."""
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        async def async_wrapper(*args: Any, **kwargs: Any) -> Any:
            try:
                return await func(*args, **kwargs)
            except Exception as e:
                error_handler = handler or global_error_handler
                raise error_handler.handle_error(e, context) from e

        @wraps(func)
        def sync_wrapper(*args: Any, **kwargs: Any) -> Any:
            try:
                return func(*args, **kwargs)
            except Exception as e:
                error_handler = handler or global_error_handler
                raise error_handler.handle_error(e, context) from e

        return async_wrapper if asyncio.iscoroutinefunction(func) else sync_wrapper

    return decorator


# Global error handler instance
global_error_handler = ErrorHandler()
