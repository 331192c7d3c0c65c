"""Residual reports: the uniform record every check produces."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


def verdict_for(value: float, tolerance: float, reject: float | None = None) -> str:
    """``pass`` iff ``value <= tolerance``; with a rejection threshold, values
    strictly between the two are ``inconclusive``."""
    if not np.isfinite(value):
        return FAIL
    if value <= tolerance:
        return PASS
    if reject is not None and value < reject:
        return INCONCLUSIVE
    return FAIL


@dataclass
class ResidualReport:
    case_id: str
    check: str
    points_sampled: int
    max_residual: float
    tolerance: float
    verdict: str
    seed: int | None = None
    runtime_ms: int = 0
    details: list = field(default_factory=list)
    reject: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "case_id": self.case_id,
            "check": self.check,
            "points_sampled": self.points_sampled,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "seed": self.seed,
            "details": [{"point": list(map(float, p)), "value": float(v)} for p, v in self.details],
        }
        if self.reject is not None:
            out["reject"] = self.reject
        if self.extra:
            out["extra"] = self.extra
        if timing:
            out["runtime_ms"] = self.runtime_ms
        return out

    def line(self) -> str:
        return (f"{self.verdict.upper():12s} {self.case_id} {self.check}: "
                f"max {self.max_residual:.3e} (tol {self.tolerance:.1e}, {self.points_sampled} pts)")


def evaluate(check: str, points: Iterable, fn: Callable, tolerance: float, *,
             reject: float | None = None, case_id: str = "", seed: int | None = None,
             worst: int = 5, extra: dict | None = None) -> ResidualReport:
    """Run ``fn`` at every point and reduce to a report (max over points)."""
    start = time.perf_counter()
    pts, vals = [], []
    for p in points:
        pts.append(np.atleast_1d(np.asarray(p, dtype=float)))
        vals.append(float(fn(p)))
    vals_arr = np.asarray(vals)
    worst_idx = np.argsort(-np.nan_to_num(vals_arr, nan=np.inf))[:worst] if len(vals) else []
    top = float(np.max(np.nan_to_num(vals_arr, nan=np.inf))) if len(vals) else 0.0
    return ResidualReport(
        case_id, check, len(pts), top, tolerance, verdict_for(top, tolerance, reject), seed,
        int(round(1000 * (time.perf_counter() - start))),
        [(pts[i], vals[i]) for i in worst_idx], reject, dict(extra or {}))


def single(check: str, value: float, tolerance: float, *, case_id: str = "",
           points: int = 0, seed: int | None = None, reject: float | None = None,
           extra: dict | None = None) -> ResidualReport:
    """A report for an already-reduced quantity."""
    return ResidualReport(case_id, check, points, float(value), tolerance,
                          verdict_for(float(value), tolerance, reject), seed,
                          0, [], reject, dict(extra or {}))
