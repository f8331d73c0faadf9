"""Grid search and uniform random search baselines for regret comparison.

Grid search samples the centers of the (1/(2*eps))^n subcubes of side
2*eps, which caps its simple regret at L*eps*sqrt(n) but leaves its average
regret stuck at a constant on flat-with-spike instances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .objectives import Objective
from .trace import RunTrace

__all__ = ["GridSpec", "grid_search", "random_search"]


@dataclass(frozen=True)
class GridSpec:
    """A conforming grid: 1/(2*eps) must be a positive integer."""

    n: int
    eps: float
    cells_per_axis: int

    @classmethod
    def from_eps(cls, n: int, eps: float) -> "GridSpec":
        if eps <= 0.0:
            raise ValueError(f"eps must be positive, got {eps}")
        k = round(1.0 / (2.0 * eps))
        if k < 1 or abs(2.0 * eps * k - 1.0) > 1e-9:
            raise ValueError(f"1/(2*eps) must be a positive integer, got eps={eps}")
        return cls(n=n, eps=eps, cells_per_axis=k)

    @property
    def num_points(self) -> int:
        return self.cells_per_axis**self.n

    def points(self) -> np.ndarray:
        """Subcube centers in lexicographic order, shape (k^n, n)."""
        k = self.cells_per_axis
        axis = (np.arange(k) + 0.5) / k
        mesh = np.meshgrid(*([axis] * self.n), indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=-1)


def grid_search(objective: Objective, eps: float) -> RunTrace:
    """Evaluate all subcube centers of a conforming grid, in lexicographic order."""
    spec = GridSpec.from_eps(objective.dim, eps)
    pts = spec.points()
    values = objective.batch(pts)
    return RunTrace(
        dim=objective.dim,
        algo="grid",
        points_theta=pts,
        points_omega=pts,
        values=values,
        objective_id=objective.id,
        lipschitz=objective.lipschitz,
        meta={"eps": eps, "cells_per_axis": spec.cells_per_axis},
    )


def random_search(objective: Objective, T: int, seed: int) -> RunTrace:
    """Evaluate T i.i.d. uniform points from a seeded generator."""
    if T < 1:
        raise ValueError(f"horizon must be >= 1, got {T}")
    rng = np.random.default_rng(seed)
    pts = rng.random((T, objective.dim))
    values = objective.batch(pts)
    return RunTrace(
        dim=objective.dim,
        algo="random",
        points_theta=pts,
        points_omega=pts,
        values=values,
        objective_id=objective.id,
        lipschitz=objective.lipschitz,
        meta={"seed": seed},
    )
