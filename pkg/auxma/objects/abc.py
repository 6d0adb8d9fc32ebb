from dataclasses import fields, is_dataclass
from enum import Enum
from typing import Any, Tuple

import numpy as np


def jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays, enums and nested records into plain JSON values."""

    if hasattr(value, "to_json") and not isinstance(value, type):
        return value.to_json()
    if is_dataclass(value) and not isinstance(value, type):
        return {f.name: jsonable(getattr(value, f.name)) for f in fields(value)}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if np.isnan(value):
            return None
        if np.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


class Record:
    """Base for immutable report objects.

    Subclasses are frozen dataclasses; ``_skip_json`` names fields (usually
    large fields) that are left out of the JSON rendering.
    """

    _skip_json: Tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            f.name: jsonable(getattr(self, f.name))
            for f in fields(self)  # type: ignore[arg-type]
            if f.name not in self._skip_json
        }
