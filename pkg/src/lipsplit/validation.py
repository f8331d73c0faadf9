"""Independent brute-force oracles that certify the optimizer's guarantees.

Three checkers, all deliberately naive:

* a dense-lattice region minimizer, against which every queued candidate's
  score must hold up as a lower bound;
* an exact partition audit proving the queued boxes tile the wrapped domain
  with disjoint interiors (integer split-path arithmetic, no float compares);
* a from-scratch re-implementation of the query loop using a linear-scan
  list, which must reproduce the optimizer's traces bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import QueueExhausted
from .geometry import Box, Point, box_volume, clamp01, edge_norm, split, wrap_domain
from .objectives import Objective, suite
from .optimizer import Candidate, OptimizerState, run
from .regret import check_sample_bounds, cumulative_regret, cumulative_regret_bound, worstcase_edge_sum
from .trace import RunTrace

__all__ = [
    "region_min_oracle",
    "lattice_slack",
    "score_audit",
    "PartitionReport",
    "partition_audit",
    "reference_run",
    "traces_equal",
    "full_audit",
]

_ORACLE_BUDGET = 10**7


def region_min_oracle(objective: Objective, box: Box, m: int) -> float:
    """Minimum of f(project(x)) over the m-per-axis lattice of the box region.

    The result is within L * (lattice cell diagonal) of the true region
    minimum; use :func:`lattice_slack` for the guaranteed slack.
    """
    if m < 2:
        raise ValueError(f"need at least 2 lattice points per axis, got {m}")
    n = box.dim
    if m**n > _ORACLE_BUDGET:
        raise ValueError(f"lattice of {m}^{n} points exceeds the oracle budget")
    axes = [
        np.linspace(c - e, c + e, m)
        for c, e in zip(box.center.coords, box.edge.half_widths)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=-1)
    np.clip(pts, 0.0, 1.0, out=pts)
    return float(objective.batch(pts).min())


def lattice_slack(box: Box, m: int, L: float) -> float:
    """Guaranteed oracle slack L * delta * sqrt(n), delta the largest cell side."""
    delta = max(2.0 * e / (m - 1) for e in box.edge.half_widths)
    return L * delta * math.sqrt(box.dim)


@dataclass
class ScoreAuditResult:
    ok: bool
    candidates_checked: int
    worst_margin: float  # max over candidates of score - (oracle + slack); <= tol when ok
    violations: list = field(default_factory=list)


def score_audit(
    objective: Objective,
    T: int,
    m: int = 101,
    L: Optional[float] = None,
    tol: float = 1e-9,
    _score_shift: float = 0.0,
) -> ScoreAuditResult:
    """Check every candidate ever queued in a T-query run against the lattice oracle."""
    state = OptimizerState(objective, L=L, prune=False, _score_shift=_score_shift)
    seen: dict[int, Candidate] = {c.seq: c for c in state.candidates()}
    for _ in range(2, T + 1):
        state.step(objective)
        for c in state.candidates():
            if c.seq not in seen:
                seen[c.seq] = c
    worst = -math.inf
    violations = []
    for c in seen.values():
        oracle = region_min_oracle(objective, c.box, m)
        slack = lattice_slack(c.box, m, state.lipschitz)
        margin = c.score - (oracle + slack)
        worst = max(worst, margin)
        if margin > tol:
            violations.append(
                {"seq": c.seq, "score": c.score, "oracle": oracle, "margin": margin}
            )
    return ScoreAuditResult(
        ok=not violations,
        candidates_checked=len(seen),
        worst_margin=worst,
        violations=violations,
    )


@dataclass
class PartitionReport:
    """Outcome of the tiling audit over the queued boxes."""

    ok: bool
    boxes: int
    volume_sum: float
    volume_expected: float
    exact_tiling: bool  # integer 2^-depth masses sum exactly to the root volume
    failures: list = field(default_factory=list)
    overlap_pair: Optional[tuple[int, int]] = None


def _splits_on_axis(depth: int, axis: int, n: int) -> int:
    # the split axis cycles 0, 1, ..., n-1 with depth
    return (depth + n - 1 - axis) // n


def _cell_encoding(cand: Candidate, n: int):
    """Integer (level, index) per axis, recovered from the split-path geometry.

    Box coordinates are odd multiples of exactly-halved root edges, so the
    rounding below is exact for any box produced by the split rule.
    """
    enc = []
    for a in range(n):
        levels = _splits_on_axis(cand.depth, a, n)
        c = cand.box.center.coords[a]
        e = cand.box.edge.half_widths[a]
        raw = (c - e) / (2.0 * e)
        k = round(raw)
        if abs(raw - k) > 1e-6 or not 0 <= k < (1 << levels):
            return None
        enc.append((levels, k))
    return enc


def _axes_disjoint(enc_a, enc_b) -> bool:
    for (la, ka), (lb, kb) in zip(enc_a, enc_b):
        if la <= lb:
            if (kb >> (lb - la)) != ka:
                return True
        elif (ka >> (la - lb)) != kb:
            return True
    return False


def partition_audit(state: OptimizerState) -> PartitionReport:
    """Verify the queued boxes exactly tile the wrapped domain (prune off)."""
    if state.prune:
        raise ValueError("the partition audit requires pruning to be off")
    n = state.dim
    cands = list(state.candidates())
    failures = []
    overlap_pair = None

    encoded = []
    for c in cands:
        enc = _cell_encoding(c, n)
        if enc is None:
            failures.append(f"candidate seq={c.seq} is not aligned to the split lattice")
        else:
            encoded.append((c.seq, enc))

    for i in range(len(encoded)):
        if overlap_pair is not None:
            break
        for j in range(i + 1, len(encoded)):
            if not _axes_disjoint(encoded[i][1], encoded[j][1]):
                overlap_pair = (encoded[i][0], encoded[j][0])
                failures.append(
                    f"boxes seq={overlap_pair[0]} and seq={overlap_pair[1]} "
                    "have intersecting interiors"
                )
                break

    expected = 2.0 ** ((n - 1) / 2.0)
    vol = math.fsum(box_volume(c.box) for c in cands)
    if abs(vol - expected) > 1e-9 * expected:
        failures.append(f"volume sum {vol} differs from {expected}")

    max_depth = max((c.depth for c in cands), default=0)
    mass = sum(1 << (max_depth - c.depth) for c in cands)
    exact = mass == (1 << max_depth)
    if not exact:
        failures.append(
            f"exact tiling broken: sum of 2^-depth masses is {mass}/2^{max_depth}"
        )

    return PartitionReport(
        ok=not failures,
        boxes=len(cands),
        volume_sum=vol,
        volume_expected=expected,
        exact_tiling=exact,
        failures=failures,
        overlap_pair=overlap_pair,
    )


def _selection_key(entry) -> tuple[float, float, int]:
    score, norm, seq = entry[0], entry[1], entry[2]
    return (score, -norm, seq)


def reference_run(objective: Objective, L: Optional[float] = None, T: int = 100) -> RunTrace:
    """From-scratch re-implementation of the query loop on a linear-scan list.

    No priority queue, no shared per-depth tables: every candidate carries an
    explicit box, and each pop scans the whole list.  Must produce traces bit
    identical to :func:`lipsplit.optimizer.run`.
    """
    if T < 1:
        raise ValueError(f"horizon must be >= 1, got {T}")
    if T > 10_000:
        raise ValueError("the reference loop is quadratic; keep T <= 10000")
    L = float(objective.lipschitz) if L is None else float(L)
    n = objective.dim

    pts_theta = np.empty((T, n))
    pts_omega = np.empty((T, n))
    values = np.empty(T)
    norms_col = np.empty(T)
    scores_col = np.empty(T)

    def evaluate(box: Box, row: int) -> float:
        omega = clamp01(box.center.coords)
        v = float(objective(omega))
        pts_theta[row] = box.center.coords
        pts_omega[row] = omega
        values[row] = v
        return v

    root = wrap_domain(n)
    val = evaluate(root, 0)
    norms_col[0] = edge_norm(root.edge)
    scores_col[0] = math.nan

    # entries: (score, norm, seq, box)
    pending: list[tuple[float, float, int, Box]] = []
    seq = 1

    def push_children(box: Box, value: float) -> None:
        nonlocal seq
        score = value - L * edge_norm(box.edge)
        hi, lo = split(box)
        for child in (lo, hi):
            pending.append((score, edge_norm(child.edge), seq, child))
            seq += 1

    push_children(root, val)
    for t in range(1, T):
        best_i = 0
        best_key = _selection_key(pending[0])
        for i in range(1, len(pending)):
            key = _selection_key(pending[i])
            if key < best_key:
                best_i, best_key = i, key
        score, norm, _, box = pending.pop(best_i)
        val = evaluate(box, t)
        norms_col[t] = norm
        scores_col[t] = score
        push_children(box, val)

    return RunTrace(
        dim=n,
        algo="lipsplit",
        points_theta=pts_theta,
        points_omega=pts_omega,
        values=values,
        edge_norms=norms_col,
        scores=scores_col,
        objective_id=objective.id,
        lipschitz=L,
        meta={"engine": "reference"},
    )


def traces_equal(a: RunTrace, b: RunTrace) -> bool:
    """Bitwise trace equality (NaN scores at t=1 compare equal)."""
    if len(a) != len(b) or a.dim != b.dim:
        return False
    cols = [
        (a.points_theta, b.points_theta),
        (a.points_omega, b.points_omega),
        (a.values, b.values),
        (a.edge_norms, b.edge_norms),
    ]
    for ca, cb in cols:
        if (ca is None) != (cb is None):
            return False
        if ca is not None and not np.array_equal(ca, cb):
            return False
    if (a.scores is None) != (b.scores is None):
        return False
    if a.scores is not None and not np.array_equal(a.scores, b.scores, equal_nan=True):
        return False
    return True


def _stepwise_partition_check(objective: Objective, T: int) -> Optional[str]:
    state = OptimizerState(objective)
    report = partition_audit(state)
    if not report.ok:
        return f"after init: {report.failures[0]}"
    for t in range(2, T + 1):
        state.step(objective)
        report = partition_audit(state)
        if not report.ok:
            return f"after t={t}: {report.failures[0]}"
    return None


def _prune_equivalence(objective: Objective, T: int) -> Optional[str]:
    plain = run(objective, T, prune=False)
    try:
        pruned = run(objective, T, prune=True)
    except QueueExhausted as exc:
        return f"pruned run exhausted early: {exc}"
    if pruned.best_value() != plain.best_value():
        return (
            f"best value diverged: pruned {pruned.best_value()} "
            f"vs plain {plain.best_value()}"
        )
    return None


def full_audit(
    dims: Sequence[int] = (1, 2, 3),
    score_T: int = 50,
    score_m: int = 101,
    partition_T: int = 100,
    sample_T: int = 1000,
    reference_T: int = 200,
    prune_T: int = 100,
    tol: float = 1e-9,
    score_bug: bool = False,
) -> dict:
    """Run every audit over the objective suite; returns a structured report.

    ``score_bug`` deliberately corrupts the scoring rule so the harness's
    ability to catch violations can itself be tested.
    """
    checks = []

    def add(name: str, objective: Objective, dim: int, ok: bool, detail: str) -> None:
        checks.append(
            {"check": name, "objective": objective.id, "dim": dim, "ok": bool(ok), "detail": detail}
        )

    for dim in dims:
        for objective in suite(dim):
            shift = 0.1 * objective.lipschitz * edge_norm(wrap_domain(dim).edge) if score_bug else 0.0
            res = score_audit(objective, score_T, m=score_m, tol=tol, _score_shift=shift)
            add(
                "score_lower_bound",
                objective,
                dim,
                res.ok,
                f"{res.candidates_checked} candidates, worst margin {res.worst_margin:.3e}",
            )

            fail = _stepwise_partition_check(objective, partition_T)
            add("partition_tiling", objective, dim, fail is None, fail or f"T={partition_T} steps clean")

            trace = run(objective, sample_T)
            try:
                worst = check_sample_bounds(trace, objective.f_min, tol=tol)
                sample_ok, sample_detail = True, f"worst margin {worst:.3e}"
            except AssertionError as exc:
                sample_ok, sample_detail = False, str(exc)
            add("per_sample_regret", objective, dim, sample_ok, sample_detail)

            cum = cumulative_regret(trace, objective.f_min)
            bound = cumulative_regret_bound(trace)
            add(
                "cumulative_bound",
                objective,
                dim,
                cum <= bound + tol * max(1.0, abs(bound)),
                f"cumulative {cum:.6g} <= bound {bound:.6g}",
            )

            edge_sum = float(np.sum(trace.edge_norms))
            edge_bound = worstcase_edge_sum(sample_T, dim)
            add(
                "edge_sum_bound",
                objective,
                dim,
                edge_sum <= edge_bound * (1.0 + tol),
                f"edge sum {edge_sum:.6g} <= bound {edge_bound:.6g}",
            )

            ok = traces_equal(run(objective, reference_T), reference_run(objective, T=reference_T))
            add("reference_equivalence", objective, dim, ok, f"T={reference_T} bit-identical" if ok else "traces diverged")

            fail = _prune_equivalence(objective, prune_T)
            add("prune_equivalence", objective, dim, fail is None, fail or f"T={prune_T} best values match")

    return {"ok": all(c["ok"] for c in checks), "checks": checks}
