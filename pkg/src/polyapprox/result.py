"""Result container shared by both Benson loops and the projection driver."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Polyhedron


def error_bound(q: int, eps: float, level: str = "y") -> float:
    """
    Worst-case Hausdorff error of an ``eps``-run.

    ``level="p"`` bounds the distance of the (q+1)-dimensional upper-image
    approximation, ``level="y"`` the distance of the body approximation.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if level == "p":
        return eps * math.sqrt(q + 1)
    if level == "y":
        return eps * math.sqrt(q * q + q - 1)
    raise ValueError(f"level must be 'p' or 'y', got {level!r}")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


@dataclass
class ApproxResult:
    p_level: Polyhedron
    kind: str
    eps: float
    certified_bound: float
    cuts: int
    scalarization_solves: int
    trace: list = field(default_factory=list)
    y_level: Polyhedron | None = None
    dual_outer: Polyhedron | None = None

    def to_json(self, with_trace: bool = False) -> dict:
        out = {
            "kind": self.kind,
            "eps": self.eps,
            "certified_bound": self.certified_bound,
            "p_level": self.p_level.to_json(),
        }
        if self.y_level is not None:
            out["y_level"] = self.y_level.to_json()
        out["cuts"] = self.cuts
        out["solves"] = self.scalarization_solves
        if with_trace:
            out["trace"] = _jsonable(self.trace)
        return out
