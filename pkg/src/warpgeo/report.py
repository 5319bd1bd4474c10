"""Residual bookkeeping and deterministic JSON/CSV emission."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field


@dataclass
class ResidualStats:
    """Aggregate of a nonnegative residual over sample points."""

    eq: str
    max: float = 0.0
    total: float = 0.0
    points: int = 0

    def add(self, value: float):
        v = abs(float(value))
        self.max = max(self.max, v)
        self.total += v
        self.points += 1

    @property
    def mean(self) -> float:
        return self.total / self.points if self.points else 0.0

    def to_json(self) -> dict:
        return {"eq": self.eq, "max": self.max, "mean": self.mean,
                "points": self.points}


@dataclass
class ResidualSet:
    """Ordered collection of ResidualStats keyed by residual id."""

    stats: dict = field(default_factory=dict)

    def add(self, eq: str, value: float):
        self.stats.setdefault(eq, ResidualStats(eq)).add(value)

    def __getitem__(self, eq: str) -> ResidualStats:
        return self.stats[eq]

    def __iter__(self):
        return iter(self.stats.values())

    def max_over(self, ids=None) -> float:
        ids = self.stats.keys() if ids is None else ids
        return max((self.stats[i].max for i in ids), default=0.0)

    def to_json(self) -> dict:
        return {eq: st.to_json() for eq, st in sorted(self.stats.items())}


def dump_json(obj, path):
    """Write canonical JSON: sorted keys, 2-space indent, trailing newline."""
    text = json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)
    with open(path, "w") as fh:
        fh.write(text + "\n")


def dump_csv(path, header, rows):
    """Write CSV with full-precision floats ('%.17g') and unix newlines."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [f"{x:.17g}" if isinstance(x, float) else x for x in row])
