"""Machine-readable verification reports."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable


def jsonable(x: Any) -> Any:
    """Best-effort conversion of exact values to JSON-friendly data."""
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, float) and (x != x or x in (float("inf"), float("-inf"))):
        return str(x)
    if hasattr(x, "item") and callable(x.item):  # numpy scalars
        return x.item()
    return x


@dataclass
class CheckReport:
    check: str
    parameters: dict = field(default_factory=dict)
    passed: bool = True
    witness: Any = None
    seconds: float = 0.0

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "parameters": jsonable(self.parameters),
            "pass": bool(self.passed),
            "witness": jsonable(self.witness),
            "seconds": round(self.seconds, 4),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def timed(check: str, parameters: dict, fn: Callable[[], tuple[bool, Any]]) -> CheckReport:
    """Run fn() -> (passed, witness) and wrap it in a report; exceptions become failures."""
    start = time.perf_counter()
    try:
        ok, witness = fn()
    except Exception as exc:  # reported, never swallowed silently
        ok, witness = False, {"error": f"{type(exc).__name__}: {exc}"}
    return CheckReport(check, parameters, bool(ok), witness, time.perf_counter() - start)
