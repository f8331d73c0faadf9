"""Regret metrics and the analytic bounds evaluated as checkable numbers.

For a trace of T evaluations with known global minimum:
  simple regret   = best value so far - f_min
  average regret  = mean value - f_min
  cumulative      = T * average
The optimizer's cumulative regret is bounded by (1 + 2^(1/n)) * L * sum of
popped edge norms, and that sum is itself bounded by a closed-form
worst-case expression (attained when every box is expanded in level order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import edge_norm, wrap_domain
from .trace import RunTrace

__all__ = [
    "simple_regret",
    "average_regret",
    "cumulative_regret",
    "cumulative_regret_bound",
    "worstcase_edge_sum",
    "rate_bound_factor",
    "fit_rate",
    "check_sample_bounds",
    "RegretReport",
    "REPORT_FIELDS",
]

_NEG_TOL = 1e-12


def _values(trace: RunTrace | Sequence[float]) -> np.ndarray:
    vals = trace.values if isinstance(trace, RunTrace) else np.asarray(trace, dtype=float)
    if len(vals) == 0:
        raise ValueError("empty trace")
    return vals


def simple_regret(trace: RunTrace | Sequence[float], f_min: float) -> float:
    """Best evaluation so far minus the global minimum."""
    r = float(_values(trace).min()) - f_min
    if r < -_NEG_TOL:
        raise ValueError(f"simple regret {r} < 0: f_min is not a valid lower bound")
    return r


def average_regret(trace: RunTrace | Sequence[float], f_min: float) -> float:
    """Mean of all evaluations minus the global minimum; bounds simple regret."""
    return float(_values(trace).mean()) - f_min


def cumulative_regret(trace: RunTrace | Sequence[float], f_min: float) -> float:
    vals = _values(trace)
    return float(vals.sum()) - len(vals) * f_min


def cumulative_regret_bound(
    trace: RunTrace, L: Optional[float] = None, n: Optional[int] = None
) -> float:
    """Cumulative-regret bound (1 + 2^(1/n)) * L * sum of popped edge norms.

    Serialized as the ``lemma3_bound`` report field.
    """
    if trace.edge_norms is None:
        raise ValueError("trace has no edge norms (not an optimizer trace)")
    n = trace.dim if n is None else n
    L = trace.lipschitz if L is None else L
    theta = 2.0 ** (1.0 / n)
    return (1.0 + theta) * L * float(np.sum(trace.edge_norms))


def worstcase_edge_sum(T: int, n: int, root_norm: Optional[float] = None) -> float:
    """Largest possible sum of popped edge norms over T queries.

    Queries can exhaust at most the full levels 0..K-1 of the split tree
    (2^K - 1 boxes, the depth-d level holding 2^d boxes of norm V/2^(d/n))
    plus M = T - 2^K + 1 boxes at depth K.  Level order attains this, so the
    bound is exact for constant objectives.
    """
    if T < 1:
        raise ValueError(f"horizon must be >= 1, got {T}")
    V = edge_norm(wrap_domain(n).edge) if root_norm is None else root_norm
    K = T.bit_length() - 1
    M = T - (1 << K) + 1
    total = 0.0
    for i in range(K):
        total += (1 << i) * V / 2.0 ** (i / n)
    total += M * V / 2.0 ** (K / n)
    return total


def rate_bound_factor(T: int, n: int) -> float:
    """The looser geometric-sum bound (theta^(n-1)/(theta^(n-1)-1)) * V * T^((n-1)/n).

    Only meaningful for n >= 2 (the geometric ratio degenerates at n = 1).
    """
    if n < 2:
        raise ValueError("the geometric-sum bound requires n >= 2")
    theta = 2.0 ** (1.0 / n)
    V = edge_norm(wrap_domain(n).edge)
    g = theta ** (n - 1)
    return g / (g - 1.0) * V * T ** ((n - 1) / n)


def fit_rate(points: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log(average regret) against log(T).

    Expects at least four geometrically spaced horizons.  Regrets are
    floored at 1e-15 before taking logs; negative regrets are rejected.
    """
    if len(points) < 4:
        raise ValueError(f"need at least 4 horizons to fit a rate, got {len(points)}")
    horizons = [float(t) for t, _ in points]
    regrets = [float(r) for _, r in points]
    if any(t2 <= t1 for t1, t2 in zip(horizons, horizons[1:])):
        raise ValueError("horizons must be strictly increasing")
    if any(r < 0.0 for r in regrets):
        raise ValueError("negative average regret cannot be rate-fitted")
    logs = np.log([max(r, 1e-15) for r in regrets])
    slope = np.polyfit(np.log(horizons), logs, 1)[0]
    return float(slope)


REPORT_FIELDS = [
    "T",
    "simple",
    "average",
    "cumulative",
    "lemma3_bound",
    "edge_sum",
    "edge_sum_bound",
    "slope",
]


@dataclass(frozen=True)
class RegretReport:
    """Regret metrics of one run together with the analytic bound values."""

    T: int
    simple: float
    average: float
    cumulative: float
    lemma3_bound: Optional[float] = None
    edge_sum: Optional[float] = None
    edge_sum_bound: Optional[float] = None
    slope: Optional[float] = None

    @classmethod
    def from_trace(
        cls,
        trace: RunTrace,
        f_min: float,
        slope: Optional[float] = None,
    ) -> "RegretReport":
        T = len(trace)
        is_optimizer = trace.edge_norms is not None
        return cls(
            T=T,
            simple=simple_regret(trace, f_min),
            average=average_regret(trace, f_min),
            cumulative=cumulative_regret(trace, f_min),
            lemma3_bound=cumulative_regret_bound(trace) if is_optimizer else None,
            edge_sum=float(np.sum(trace.edge_norms)) if is_optimizer else None,
            edge_sum_bound=worstcase_edge_sum(T, trace.dim) if is_optimizer else None,
            slope=slope,
        )

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in REPORT_FIELDS}

    def to_csv_row(self) -> list:
        return [("" if v is None else v) for v in (getattr(self, f) for f in REPORT_FIELDS)]


def check_sample_bounds(trace: RunTrace, f_min: float, tol: float = 1e-9) -> float:
    """Per-sample regret check: f_1 - f_min <= L*||v_1|| and, for t >= 2,
    f_t - f_min <= (1 + 2^(1/n)) * L * ||v_t||.

    Returns the worst violation margin (positive means a bound was broken).
    """
    if trace.edge_norms is None:
        raise ValueError("per-sample bounds apply to optimizer traces only")
    L = trace.lipschitz
    theta = 2.0 ** (1.0 / trace.dim)
    gaps = trace.values - f_min
    allowed = (1.0 + theta) * L * trace.edge_norms
    allowed_first = L * float(trace.edge_norms[0])
    margins = gaps - allowed
    margins[0] = gaps[0] - allowed_first
    worst = float(margins.max())
    if worst > tol:
        t_bad = int(margins.argmax()) + 1
        raise AssertionError(
            f"per-sample regret bound violated at t={t_bad}: margin {worst:.3e}"
        )
    return worst
