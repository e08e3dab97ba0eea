"""Result record of one identity run."""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath

from ..precision import rat_str


@dataclass
class VerificationReport:
    id: str
    params: dict
    digits: int
    tolerance: object
    buckets: list = field(default_factory=list)
    comparisons: list = field(default_factory=list)
    derived: dict = field(default_factory=dict)
    solved: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    log: list = field(default_factory=list)
    constant: object = None

    def add_bucket(self, key, residual, status):
        e, k = key
        self.buckets.append({"exponent": rat_str(e), "logdeg": int(k),
                             "residual": mpmath.mpf(residual), "status": status})

    def compare(self, name, engine, reference, advisory=False, note=None):
        ref = abs(reference)
        err = abs(engine - reference) / ref if ref else abs(engine)
        row = {"name": name, "engine": engine, "reference": reference, "rel_err": err,
               "pass": bool(err < self.tolerance), "advisory": bool(advisory)}
        if note:
            row["note"] = note
        self.comparisons.append(row)
        return row["pass"]

    def step(self, rule, inputs=(), buckets=()):
        self.log.append({"rule": rule, "inputs": [str(x) for x in inputs],
                         "buckets": [f"{rat_str(e)}:{k}" for e, k in buckets]})

    @property
    def open(self) -> list:
        return [b for b in self.buckets if b["status"] == "open"]

    @property
    def max_residual(self):
        vals = [b["residual"] for b in self.buckets if b["status"] != "open"]
        return max(vals, default=mpmath.mpf(0))

    @property
    def passed(self) -> bool:
        checked = [b for b in self.buckets if b["status"] != "open"]
        if not checked and not self.comparisons:
            return False
        if any(b["residual"] >= self.tolerance for b in checked):
            return False
        return all(c["pass"] for c in self.comparisons if not c["advisory"])

    def log_degree_two_clean(self) -> bool:
        return all(b["residual"] < self.tolerance for b in self.buckets
                   if b["logdeg"] == 2 and b["status"] != "open")
