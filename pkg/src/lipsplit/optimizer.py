"""Best-first bisection optimizer with certified lower-bound scores.

Each evaluated box spawns two children (its halves across the largest edge),
scored ``value - L * ||parent edge||``, which lower-bounds the objective over
each child's region.  The candidate with the lowest score is queried next;
ties prefer the larger box (breadth-first on degenerate inputs), then
creation order.

Two batch engines produce bit-identical traces: a compiled extension
(``lipsplit._core``) used when available, and the pure-Python loop below.
The :class:`OptimizerState` ask/tell interface is the embedding API for
external or expensive evaluators and is also what the audits introspect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heapify, heappop, heappush
from typing import Iterator, Optional

import numpy as np

from .errors import QueueExhausted
from .geometry import Box, Point, clamp01, edge_norm, project, split, wrap_domain
from .objectives import Objective
from .trace import QueryRecord, RunTrace

try:
    from . import _core
except ImportError:  # pure-Python fallback only
    _core = None

HAVE_COMPILED_CORE = _core is not None

__all__ = [
    "Candidate",
    "OptimizerState",
    "run",
    "HAVE_COMPILED_CORE",
]


@dataclass(frozen=True, slots=True)
class Candidate:
    """A pending query: a box, its certified lower bound, depth, and creation order."""

    box: Box
    score: float
    depth: int
    seq: int


class OptimizerState:
    """Mutable optimizer state for the ask/tell interaction pattern.

    Construction evaluates the root box center (the first query), so the
    trace always starts with one record and two scored candidates.
    """

    def __init__(
        self,
        objective: Objective,
        L: Optional[float] = None,
        prune: bool = False,
        _score_shift: float = 0.0,
    ) -> None:
        L = float(objective.lipschitz) if L is None else float(L)
        if not (math.isfinite(L) and L > 0.0):
            raise ValueError(f"Lipschitz constant must be positive and finite, got {L}")
        self.dim = objective.dim
        self.lipschitz = L
        self.prune = bool(prune)
        self.trace: list[QueryRecord] = []
        self._heap: list[tuple[float, int, int, Candidate]] = []
        self._seq = 1
        self._outstanding: dict[int, Candidate] = {}
        # deliberately-wrong scoring offset, used only by the negative tests
        # of the validation harness
        self._score_shift = float(_score_shift)

        root = wrap_domain(self.dim)
        x_omega = project(root.center)
        value = float(objective(x_omega.coords))
        if not math.isfinite(value):
            raise ValueError(f"objective returned non-finite value {value}")
        self.trace.append(
            QueryRecord(1, root.center, x_omega, value, edge_norm(root.edge), None)
        )
        self.best_value = value
        self._push_children(root, value, depth=0)

    @property
    def queue_size(self) -> int:
        return len(self._heap)

    @property
    def min_queue_score(self) -> Optional[float]:
        """Lowest queued score: a certified lower bound on the global minimum
        while pruning is off."""
        return self._heap[0][0] if self._heap else None

    def candidates(self) -> Iterator[Candidate]:
        """Current queue contents in unspecified order."""
        for _, _, _, cand in self._heap:
            yield cand

    def ask(self) -> Candidate:
        """Remove and return the candidate with the lowest score.

        Ties prefer the larger edge norm (equivalently the smaller depth),
        then the smaller creation number.
        """
        if not self._heap:
            raise QueueExhausted(
                "candidate queue exhausted: the incumbent best value is certified optimal"
            )
        _, _, seq, cand = heappop(self._heap)
        self._outstanding[seq] = cand
        return cand

    def tell(self, candidate: Candidate, value: float) -> None:
        """Record the evaluation of an asked candidate and spawn its children."""
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"objective value must be finite, got {value}")
        if self._outstanding.pop(candidate.seq, None) is None:
            raise ValueError(
                f"candidate seq={candidate.seq} was not returned by ask (or was already told)"
            )
        box = candidate.box
        self.trace.append(
            QueryRecord(
                len(self.trace) + 1,
                box.center,
                project(box.center),
                value,
                edge_norm(box.edge),
                candidate.score,
            )
        )
        improved = value < self.best_value
        if improved:
            self.best_value = value
        self._push_children(box, value, candidate.depth)
        if self.prune and improved:
            self._heap = [entry for entry in self._heap if entry[0] < self.best_value]
            heapify(self._heap)

    def step(self, objective: Objective) -> QueryRecord:
        """ask + evaluate at the projected center + tell, returning the new record."""
        cand = self.ask()
        x = project(cand.box.center)
        value = float(objective(x.coords))
        self.tell(cand, value)
        return self.trace[-1]

    def _push_children(self, box: Box, value: float, depth: int) -> None:
        score = value - self.lipschitz * edge_norm(box.edge)
        if self._score_shift:
            score += self._score_shift
        hi, lo = split(box)
        for child in (lo, hi):
            seq = self._seq
            self._seq += 1
            if self.prune and score >= self.best_value:
                continue
            heappush(self._heap, (score, depth + 1, seq, Candidate(child, score, depth + 1, seq)))


def _norm(values) -> float:
    s = 0.0
    for v in values:
        s += v * v
    return math.sqrt(s)


def _run_python(objective, n: int, L: float, T: int, prune: bool, gap_tol):
    """Pure-Python batch engine; bit-identical to the compiled core.

    All boxes at one depth share the same edge vector (the split axis cycles
    deterministically), so edges, norms, and split offsets are tabulated per
    depth and candidates carry only (score, depth, seq, center).
    """
    theta = 2.0 ** (1.0 / n)
    root = tuple(theta ** -(i + 1) for i in range(n))

    edge_rows = [root]
    norms = [_norm(root)]
    axis_at: list[int] = []
    half_at: list[float] = []

    def extend_tables(depth: int) -> None:
        while len(axis_at) <= depth:
            row = edge_rows[-1]
            best = -math.inf
            ax = 0
            for i, h in enumerate(row):
                if h > best:
                    best, ax = h, i
            z = row[ax] * 0.5
            child = row[:ax] + (row[ax] - z,) + row[ax + 1 :]
            axis_at.append(ax)
            half_at.append(z)
            edge_rows.append(child)
            norms.append(_norm(child))

    pts_theta = np.empty((T, n))
    pts_omega = np.empty((T, n))
    values = np.empty(T)
    norms_col = np.empty(T)
    scores_col = np.empty(T)

    omega = clamp01(root)
    val = float(objective(omega))
    if not math.isfinite(val):
        raise ValueError(f"objective returned non-finite value {val}")
    pts_theta[0] = root
    pts_omega[0] = omega
    values[0] = val
    norms_col[0] = norms[0]
    scores_col[0] = math.nan
    best = val

    heap: list[tuple[float, int, int, tuple[float, ...]]] = []
    seq = 1

    def push_children(center, depth, value):
        nonlocal seq, heap
        extend_tables(depth)
        score = value - L * norms[depth]
        ax = axis_at[depth]
        z = half_at[depth]
        lo = center[:ax] + (center[ax] - z,) + center[ax + 1 :]
        hi = center[:ax] + (center[ax] + z,) + center[ax + 1 :]
        for child in (lo, hi):
            child_seq = seq
            seq += 1
            if prune and score >= best:
                continue
            heappush(heap, (score, depth + 1, child_seq, child))

    push_children(root, 0, val)
    done = 1
    for t in range(1, T):
        if gap_tol is not None and heap and best - heap[0][0] <= gap_tol:
            break
        if not heap:
            raise QueueExhausted(
                f"candidate queue exhausted after {done} queries: best value is certified optimal"
            )
        score_popped, depth, _, center = heappop(heap)
        omega = clamp01(center)
        val = float(objective(omega))
        if not math.isfinite(val):
            raise ValueError(f"objective returned non-finite value {val}")
        pts_theta[t] = center
        pts_omega[t] = omega
        values[t] = val
        norms_col[t] = norms[depth]
        scores_col[t] = score_popped
        improved = val < best
        if improved:
            best = val
        push_children(center, depth, val)
        if prune and improved:
            heap = [entry for entry in heap if entry[0] < best]
            heapify(heap)
        done = t + 1

    return pts_theta, pts_omega, values, norms_col, scores_col, done


def run(
    objective: Objective,
    T: int,
    L: Optional[float] = None,
    *,
    prune: bool = False,
    gap_tol: Optional[float] = None,
    engine: str = "auto",
) -> RunTrace:
    """Run ``T`` queries against an objective and return the trace.

    ``L`` defaults to the objective's exact Lipschitz constant.  ``gap_tol``
    optionally stops early once ``best_value - min queue score <= gap_tol``
    (the min score lower-bounds the global minimum).  ``engine`` selects the
    compiled core ("compiled"), the pure-Python loop ("python"), or whichever
    is available ("auto"); both produce bit-identical traces.
    """
    if T < 1:
        raise ValueError(f"horizon must be >= 1, got {T}")
    L = float(objective.lipschitz) if L is None else float(L)
    if not (math.isfinite(L) and L > 0.0):
        raise ValueError(f"Lipschitz constant must be positive and finite, got {L}")
    if engine == "auto":
        engine = "compiled" if HAVE_COMPILED_CORE else "python"
    if engine == "compiled":
        if not HAVE_COMPILED_CORE:
            raise RuntimeError("compiled core is not available; build the extension or use engine='python'")
        gap = math.nan if gap_tol is None else float(gap_tol)
        cols = _core.run_loop(objective, objective.dim, L, T, prune, gap)
    elif engine == "python":
        cols = _run_python(objective, objective.dim, L, T, prune, gap_tol)
    else:
        raise ValueError(f"unknown engine {engine!r}; expected auto, python, or compiled")
    pts_theta, pts_omega, values, norms_col, scores_col, done = cols
    if done < T:
        pts_theta = pts_theta[:done].copy()
        pts_omega = pts_omega[:done].copy()
        values = values[:done].copy()
        norms_col = norms_col[:done].copy()
        scores_col = scores_col[:done].copy()
    return RunTrace(
        dim=objective.dim,
        algo="lipsplit",
        points_theta=pts_theta,
        points_omega=pts_omega,
        values=values,
        edge_norms=norms_col,
        scores=scores_col,
        objective_id=objective.id,
        lipschitz=L,
        prune=prune,
        meta={"engine": engine, "T_requested": T, "gap_tol": gap_tol},
    )
