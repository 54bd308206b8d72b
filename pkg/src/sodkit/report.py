"""Verification reports shared by every workflow."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

from . import __version__


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return float(obj) if obj.denominator != 1 else int(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return _jsonable(obj.to_dict())
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    return obj


@dataclass
class VerificationReport:
    """One checked inequality: ``passed`` iff ratio <= bound + error_budget.

    ``anchor`` names the statement being checked in words; ``timing`` is only
    serialized on request so that reports stay byte-reproducible.
    """

    instance: dict
    quantities: dict
    bound: float
    bound_label: str
    anchor: str
    ratio: float
    error_budget: float = 0.0
    seeds: dict = field(default_factory=dict)
    timing: float | None = None
    extra_bounds: dict = field(default_factory=dict)
    version: str = __version__

    @property
    def passed(self) -> bool:
        return bool(self.ratio <= self.bound + self.error_budget)

    def to_dict(self, include_timing: bool = False) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        if not include_timing:
            d.pop("timing")
        return _jsonable(d)

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2)


def dumps(obj: Any) -> str:
    """Canonical JSON used by the CLI (sorted keys, fixed float formatting)."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2)
