"""
report.py

Check records and the report that collects them. Reports carry no timestamps,
so identical inputs produce identical files.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    anchor: str = ""

    @property
    def passed(self):
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)

    def to_dict(self):
        return {
            "name": self.name,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
            "anchor": self.anchor,
        }


@dataclass
class Report:
    """
    Named checks plus the derived quantities a run produced.

    meta always holds the seed and the effective configuration; derived holds
    weights, POVMs, dimensions and fidelities; notes hold plain statements about
    what a finite truncation can and cannot show.
    """

    meta: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    derived: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def add(self, name, residual, tolerance, anchor=""):
        check = Check(name, float(residual), float(tolerance), anchor)
        self.checks.append(check)
        return check

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failed(self):
        return [c for c in self.checks if not c.passed]

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        out = {"checks": [c.to_dict() for c in self.checks], "meta": self.meta}
        if self.derived:
            out["derived"] = self.derived
        if self.notes:
            out["notes"] = list(self.notes)
        return out
