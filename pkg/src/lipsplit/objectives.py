"""Lipschitz test objectives with exact constants and certified minima.

Each objective knows its dimension, its exact Lipschitz constant with respect
to the Euclidean norm, and a global minimum (value and minimizer) over the
unit cube.  The suite spans an exact kink (cone), a flat function with a
narrow spike (the adversarial instance for the minimax lower bound), a smooth
multimodal function (separable sine), and randomized nonsmooth instances
(minimum of shifted cones).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "Objective",
    "cone",
    "adversarial_spike",
    "separable_sine",
    "random_multicone",
    "OBJECTIVES",
    "parse_objective",
    "suite",
]


@dataclass(frozen=True)
class Objective:
    """An evaluable function on the unit cube with known L and minimum."""

    id: str
    dim: int
    lipschitz: float
    f_min: float
    x_min: tuple[float, ...]
    fn: Callable[[Sequence[float]], float]
    batch_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False, default=None)  # type: ignore[assignment]

    def __call__(self, x: Sequence[float]) -> float:
        return self.fn(x)

    def batch(self, points: np.ndarray) -> np.ndarray:
        """Evaluate an (N, dim) array of points in one vectorized pass."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(f"expected (N, {self.dim}) points, got {pts.shape}")
        if self.batch_fn is not None:
            return np.asarray(self.batch_fn(pts), dtype=float)
        return np.array([self.fn(tuple(p)) for p in pts], dtype=float)


def _check_center(center: Sequence[float], dim: int) -> tuple[float, ...]:
    c = tuple(float(v) for v in center)
    if len(c) != dim:
        raise ValueError(f"center has {len(c)} coordinates, expected {dim}")
    if any(not (0.0 <= v <= 1.0) for v in c):
        raise ValueError(f"center {c} lies outside the unit cube")
    return c


def _fmt_vec(v: Sequence[float]) -> str:
    return ";".join(f"{x:g}" for x in v)


def cone(dim: int, L0: float = 1.0, center: Optional[Sequence[float]] = None) -> Objective:
    """f(x) = L0 * ||x - center||, the canonical exact-kink test case."""
    if L0 <= 0.0:
        raise ValueError(f"cone slope must be positive, got {L0}")
    c = _check_center(center if center is not None else (0.5,) * dim, dim)
    c_arr = np.array(c)

    def fn(x: Sequence[float]) -> float:
        s = 0.0
        for xi, ci in zip(x, c):
            d = xi - ci
            s += d * d
        return L0 * math.sqrt(s)

    def batch_fn(pts: np.ndarray) -> np.ndarray:
        return L0 * np.sqrt(((pts - c_arr) ** 2).sum(axis=1))

    return Objective(
        id=f"cone:dim={dim},L={L0:g},center={_fmt_vec(c)}",
        dim=dim,
        lipschitz=L0,
        f_min=0.0,
        x_min=c,
        fn=fn,
        batch_fn=batch_fn,
    )


def adversarial_spike(
    dim: int,
    L: float = 1.0,
    eps: float = 0.1,
    center: Optional[Sequence[float]] = None,
) -> Objective:
    """Zero everywhere except a linear spike of depth L*eps in an eps-ball.

    This is the worst-case instance behind the minimax lower bound: any
    algorithm that leaves an eps-ball unqueried can be made to miss a
    minimum of depth L*eps.
    """
    if eps <= 0.0:
        raise ValueError(f"spike radius must be positive, got {eps}")
    if L <= 0.0:
        raise ValueError(f"Lipschitz constant must be positive, got {L}")
    c = _check_center(center if center is not None else (0.5,) * dim, dim)
    c_arr = np.array(c)

    def fn(x: Sequence[float]) -> float:
        s = 0.0
        for xi, ci in zip(x, c):
            d = xi - ci
            s += d * d
        dist = math.sqrt(s)
        return L * (dist - eps) if dist <= eps else 0.0

    def batch_fn(pts: np.ndarray) -> np.ndarray:
        dist = np.sqrt(((pts - c_arr) ** 2).sum(axis=1))
        return np.where(dist <= eps, L * (dist - eps), 0.0)

    return Objective(
        id=f"adversarial_spike:dim={dim},L={L:g},eps={eps:g},center={_fmt_vec(c)}",
        dim=dim,
        lipschitz=L,
        f_min=-L * eps,
        x_min=c,
        fn=fn,
        batch_fn=batch_fn,
    )


def separable_sine(dim: int, k: int = 1) -> Objective:
    """f(x) = sum_i sin(2*pi*k*x_i), smooth with k^dim separated minima.

    The gradient norm is bounded by 2*pi*k*sqrt(dim) and the bound is
    attained, so the stored Lipschitz constant is exact.
    """
    if k < 1:
        raise ValueError(f"frequency must be a positive integer, got {k}")
    w = 2.0 * math.pi * k

    def fn(x: Sequence[float]) -> float:
        s = 0.0
        for xi in x:
            s += math.sin(w * xi)
        return s

    def batch_fn(pts: np.ndarray) -> np.ndarray:
        return np.sin(w * pts).sum(axis=1)

    return Objective(
        id=f"separable_sine:dim={dim},k={k}",
        dim=dim,
        lipschitz=w * math.sqrt(dim),
        f_min=-float(dim),
        x_min=(3.0 / (4.0 * k),) * dim,
        fn=fn,
        batch_fn=batch_fn,
    )


def random_multicone(dim: int, m: int = 3, seed: int = 0) -> Objective:
    """Minimum of m randomly placed shifted cones, f(x) = min_j c_j + L_j*||x - p_j||.

    Apexes, slopes, and offsets are drawn deterministically from the seed.
    Since every branch satisfies c_j + L_j*||x - p_j|| >= c_j with equality
    only at the apex, the global minimum is min_j c_j at the corresponding
    apex; a dense-grid scan certifies the instance at construction.
    """
    if m < 1:
        raise ValueError(f"need at least one cone, got {m}")
    rng = np.random.default_rng(seed)
    apexes = rng.random((m, dim))
    slopes = rng.uniform(0.5, 2.0, size=m)
    offsets = rng.uniform(0.0, 1.0, size=m)

    j_star = int(np.argmin(offsets))
    f_min = float(offsets[j_star])
    x_min = tuple(float(v) for v in apexes[j_star])
    lipschitz = float(slopes.max())
    apex_rows = [tuple(float(v) for v in row) for row in apexes]
    slope_list = [float(s) for s in slopes]
    offset_list = [float(c) for c in offsets]

    def fn(x: Sequence[float]) -> float:
        best = math.inf
        for p, Lj, cj in zip(apex_rows, slope_list, offset_list):
            s = 0.0
            for xi, pi in zip(x, p):
                d = xi - pi
                s += d * d
            v = cj + Lj * math.sqrt(s)
            if v < best:
                best = v
        return best

    def batch_fn(pts: np.ndarray) -> np.ndarray:
        out = np.full(pts.shape[0], np.inf)
        for j in range(m):
            dist = np.sqrt(((pts - apexes[j]) ** 2).sum(axis=1))
            np.minimum(out, offsets[j] + slopes[j] * dist, out=out)
        return out

    obj = Objective(
        id=f"random_multicone:dim={dim},m={m},seed={seed}",
        dim=dim,
        lipschitz=lipschitz,
        f_min=f_min,
        x_min=x_min,
        fn=fn,
        batch_fn=batch_fn,
    )
    _certify_minimum(obj)
    return obj


def _certify_minimum(obj: Objective, budget: int = 200_000) -> None:
    """Dense-grid certification that the stored minimum is consistent.

    Checks f(x_min) == f_min and that no lattice point beats f_min beyond
    the Lipschitz slack of the lattice spacing.
    """
    if abs(obj.fn(obj.x_min) - obj.f_min) > 1e-12:
        raise AssertionError(f"{obj.id}: f(x_min) != f_min")
    m = max(2, int(budget ** (1.0 / obj.dim)))
    axes = [np.linspace(0.0, 1.0, m)] * obj.dim
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=-1)
    grid_min = float(obj.batch(pts).min())
    slack = obj.lipschitz * math.sqrt(obj.dim) / (m - 1)
    if grid_min < obj.f_min - 1e-9 or grid_min > obj.f_min + slack + 1e-9:
        raise AssertionError(
            f"{obj.id}: stored minimum {obj.f_min} inconsistent with grid minimum "
            f"{grid_min} (slack {slack})"
        )


def _parse_value(text: str):
    if ";" in text:
        return [float(p) for p in text.split(";")]
    return text


_BUILDERS: dict[str, tuple[Callable[..., Objective], dict[str, type], str]] = {
    "cone": (
        cone,
        {"dim": int, "L": float, "L0": float, "center": list},
        "L * distance to center; params: dim, L (slope, default 1), "
        "center (semicolon-separated, default midpoint)",
    ),
    "adversarial_spike": (
        adversarial_spike,
        {"dim": int, "L": float, "eps": float, "center": list},
        "0 outside an eps-ball, linear dip to -L*eps at center; params: dim, "
        "L (default 1), eps (default 0.1), center (default midpoint)",
    ),
    "separable_sine": (
        separable_sine,
        {"dim": int, "k": int},
        "sum of sin(2*pi*k*x_i); params: dim, k (frequency, default 1)",
    ),
    "random_multicone": (
        random_multicone,
        {"dim": int, "m": int, "seed": int},
        "min of m random shifted cones; params: dim, m (default 3), seed (default 0)",
    ),
}

OBJECTIVES = {name: doc for name, (_, _, doc) in _BUILDERS.items()}


def parse_objective(spec: str, dim_override: Optional[int] = None) -> Objective:
    """Build an objective from its id string, e.g. ``cone:dim=2,L=1,center=0.3;0.7``.

    Values with semicolons are vectors.  ``dim_override`` replaces any dim
    given in the spec (used by sweeps that iterate over dimensions).
    """
    name, _, param_text = spec.partition(":")
    name = name.strip()
    if name not in _BUILDERS:
        raise ValueError(f"unknown objective {name!r}; known: {', '.join(_BUILDERS)}")
    builder, schema, _ = _BUILDERS[name]
    kwargs = {}
    if param_text:
        for item in param_text.split(","):
            key, eq, raw = item.partition("=")
            key = key.strip()
            if not eq or key not in schema:
                raise ValueError(f"bad parameter {item!r} for objective {name!r}")
            target = schema[key]
            if target is list:
                v = _parse_value(raw)
                kwargs[key] = v if isinstance(v, list) else [float(v)]
            elif target is int:
                kwargs[key] = int(raw)
            else:
                kwargs[key] = float(raw)
    if name == "cone" and "L" in kwargs:
        kwargs["L0"] = kwargs.pop("L")
    if dim_override is not None:
        kwargs["dim"] = dim_override
    if "dim" not in kwargs:
        raise ValueError(f"objective spec {spec!r} does not fix a dimension")
    return builder(**kwargs)


def suite(dim: int) -> list[Objective]:
    """The canonical four-objective validation suite for one dimension."""
    pattern = (0.53, 0.47, 0.59, 0.41, 0.63)
    spike_center = tuple(pattern[i % len(pattern)] for i in range(dim))
    return [
        cone(dim, L0=1.0, center=(0.3,) * dim),
        adversarial_spike(dim, L=1.0, eps=0.1, center=spike_center),
        separable_sine(dim, k=1),
        random_multicone(dim, m=3, seed=7),
    ]
