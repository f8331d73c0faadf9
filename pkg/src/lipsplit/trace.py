"""Query records and run traces.

A trace stores one row per evaluated query in columnar numpy arrays (a
million-query run would be too heavy as per-record objects) and materializes
:class:`QueryRecord` views on demand.  Baseline traces (grid / random search)
have no scores or edge norms; those columns are ``None``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

import numpy as np

from .geometry import Point

__all__ = ["QueryRecord", "RunTrace", "write_trace_csv", "write_trace_json"]


@dataclass(frozen=True, slots=True)
class QueryRecord:
    """One evaluated query: 1-based index, raw and projected points, value,
    edge norm of the popped box, and the popped score (None for the root)."""

    t: int
    x_theta: Point
    x_omega: Point
    value: float
    edge_norm: Optional[float]
    score: Optional[float]


@dataclass
class RunTrace:
    """Ordered evaluations of one run, plus the metadata needed to re-run it."""

    dim: int
    algo: str
    points_theta: np.ndarray  # (T, n), raw query points
    points_omega: np.ndarray  # (T, n), clamped into the unit cube
    values: np.ndarray  # (T,)
    edge_norms: Optional[np.ndarray] = None  # (T,), optimizer runs only
    scores: Optional[np.ndarray] = None  # (T,), nan at t=1
    objective_id: Optional[str] = None
    lipschitz: Optional[float] = None
    prune: bool = False
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def record(self, t: int) -> QueryRecord:
        """Materialize the 1-based record ``t``."""
        if not 1 <= t <= len(self):
            raise IndexError(f"record index {t} out of range 1..{len(self)}")
        i = t - 1
        norm = None if self.edge_norms is None else float(self.edge_norms[i])
        score: Optional[float] = None
        if self.scores is not None:
            s = float(self.scores[i])
            score = None if math.isnan(s) else s
        return QueryRecord(
            t=t,
            x_theta=Point(tuple(float(c) for c in self.points_theta[i])),
            x_omega=Point(tuple(float(c) for c in self.points_omega[i])),
            value=float(self.values[i]),
            edge_norm=norm,
            score=score,
        )

    def records(self) -> Iterator[QueryRecord]:
        for t in range(1, len(self) + 1):
            yield self.record(t)

    def best_value(self) -> float:
        return float(self.values.min())


def _trace_rows(trace: RunTrace, f_min: Optional[float]):
    """Yield per-query rows: t, projected coords, value, score, edge_norm,
    and running simple/average regret (empty when f_min is unknown)."""
    running_sum = 0.0
    running_min = math.inf
    scores = trace.scores
    norms = trace.edge_norms
    for i in range(len(trace)):
        v = float(trace.values[i])
        running_sum += v
        running_min = min(running_min, v)
        score = "" if scores is None or math.isnan(float(scores[i])) else float(scores[i])
        norm = "" if norms is None else float(norms[i])
        if f_min is None:
            simple = average = ""
        else:
            simple = running_min - f_min
            average = running_sum / (i + 1) - f_min
        yield [i + 1, *(float(c) for c in trace.points_omega[i]), v, score, norm, simple, average]


def trace_csv_header(dim: int) -> list[str]:
    return (
        ["t"]
        + [f"x_{i}" for i in range(1, dim + 1)]
        + ["value", "score", "edge_norm", "simple_regret", "average_regret"]
    )


def write_trace_csv(trace: RunTrace, path: str | Path, f_min: Optional[float] = None) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(trace_csv_header(trace.dim))
        writer.writerows(_trace_rows(trace, f_min))


def write_trace_json(trace: RunTrace, path: str | Path, f_min: Optional[float] = None) -> None:
    header = trace_csv_header(trace.dim)
    rows = [
        {k: (None if v == "" else v) for k, v in zip(header, row)}
        for row in _trace_rows(trace, f_min)
    ]
    doc = {
        "meta": {
            "algo": trace.algo,
            "dim": trace.dim,
            "objective": trace.objective_id,
            "lipschitz": trace.lipschitz,
            "prune": trace.prune,
            **trace.meta,
        },
        "records": rows,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
