from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class CheckReport:
    """Outcome of a property check: named residuals against tolerances.

    A case may carry its own tolerance; otherwise the report-wide one
    applies.  The report passes iff every residual is within tolerance.
    ``info`` holds measured values that are reported but not judged.
    """

    name: str
    tolerance: float
    cases: list[tuple[str, float, float | None]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def add(self, case: str, value: float, tol: float | None = None) -> None:
        self.cases.append((case, float(value), tol))

    def case_ok(self, value: float, tol: float | None) -> bool:
        limit = self.tolerance if tol is None else tol
        return not math.isnan(value) and value <= limit

    @property
    def passed(self) -> bool:
        return all(self.case_ok(v, t) for _, v, t in self.cases)

    @property
    def max_residual(self) -> float:
        return max((v for _, v, _ in self.cases), default=0.0)

    def failures(self) -> list[tuple[str, float]]:
        return [(c, v) for c, v, t in self.cases if not self.case_ok(v, t)]

    def merge(self, other: "CheckReport", prefix: str = "") -> None:
        for c, v, t in other.cases:
            limit = other.tolerance if t is None else t
            self.cases.append((prefix + c, v, None if limit == self.tolerance else limit))
        self.notes.extend(other.notes)

    def to_json(self) -> dict:
        residuals = []
        for case, value, tol in sorted(self.cases, key=lambda c: c[0]):
            entry = {"case": case, "value": _jsonable(value)}
            if tol is not None:
                entry["tolerance"] = tol
            residuals.append(entry)
        out = {
            "name": self.name,
            "pass": self.passed,
            "residuals": residuals,
            "tolerance": self.tolerance,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        if self.info:
            out["info"] = {k: _jsonable(v) for k, v in sorted(self.info.items())}
        return out

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {len(self.cases)} cases, max residual {self.max_residual:.3e} (tol {self.tolerance:g})"


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v
