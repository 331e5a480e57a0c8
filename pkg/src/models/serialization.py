"""Deterministic JSON text with floats written at 17 significant digits."""

import json
import math
from enum import Enum
from typing import Any, Mapping

import numpy as np
from pydantic import BaseModel


def format_float(value: float) -> str:
    """Round-trip exact decimal text for a double."""
    if not math.isfinite(value):
        return json.dumps(value)
    text = format(value, ".17g")
    if all(ch in "-0123456789" for ch in text):
        text += ".0"
    return text


def dumps(value: Any) -> str:
    """Serialize nested dicts/lists/models with fixed float precision and key order."""
    if isinstance(value, BaseModel):
        return dumps(value.model_dump(mode="json"))
    if value is None or isinstance(value, bool):
        return json.dumps(value)
    if isinstance(value, Enum):
        return dumps(value.value)
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, Mapping):
        items = (f"{json.dumps(str(k))}: {dumps(v)}" for k, v in value.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in value) + "]"
    raise TypeError(f"cannot serialize value of type {type(value).__name__}")
