"""Deterministic JSON output."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import numpy as np


def to_jsonable(obj: Any) -> Any:
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def dumps(obj: Any) -> str:
    # repr-based floats are the shortest strings that round-trip exactly
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False, ensure_ascii=False)
