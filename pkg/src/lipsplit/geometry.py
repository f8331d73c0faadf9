"""Axis-aligned boxes in the wrapped search domain, and the bisection rule.

The unit cube [0,1]^n is wrapped into the hyper-rectangle
Theta = [0, theta^(n-1)] x [0, theta^(n-2)] x ... x [0, theta^0] with
theta = 2**(1/n).  This shape is chosen so that halving the largest edge of
any box reachable from the root shrinks the Euclidean norm of its edge
vector by exactly 2**(1/n) per split.  Coordinates are kept in Theta;
clamping into the unit cube happens only when a point is evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "Point",
    "EdgeVector",
    "Box",
    "wrap_domain",
    "project",
    "clamp01",
    "split",
    "box_volume",
    "edge_norm",
]

_REL_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class Point:
    """A point in the wrapped domain, stored as a tuple of coordinates."""

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.coords) < 1:
            raise ValueError("a point needs at least one coordinate")
        if not all(math.isfinite(c) for c in self.coords):
            raise ValueError(f"non-finite coordinate in {self.coords}")

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True, slots=True)
class EdgeVector:
    """Half side lengths of a box; its norm bounds the center-to-corner distance."""

    half_widths: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.half_widths) < 1:
            raise ValueError("an edge vector needs at least one entry")
        for h in self.half_widths:
            if not (math.isfinite(h) and h > 0.0):
                raise ValueError(f"edge entries must be positive and finite, got {h}")

    @property
    def dim(self) -> int:
        return len(self.half_widths)


@dataclass(frozen=True, slots=True)
class Box:
    """Hyper-rectangle [center - edge, center + edge], kept inside Theta."""

    center: Point
    edge: EdgeVector

    def __post_init__(self) -> None:
        n = self.center.dim
        if self.edge.dim != n:
            raise ValueError("center and edge dimensions disagree")
        theta = 2.0 ** (1.0 / n)
        for i, (c, e) in enumerate(zip(self.center.coords, self.edge.half_widths)):
            upper = theta ** (n - 1 - i)
            tol = _REL_TOL * upper
            if c - e < -tol or c + e > upper + tol:
                raise ValueError(
                    f"box leaves the wrapped domain on axis {i}: "
                    f"[{c - e}, {c + e}] not within [0, {upper}]"
                )

    @property
    def dim(self) -> int:
        return self.center.dim

    def interval(self, axis: int) -> tuple[float, float]:
        c = self.center.coords[axis]
        e = self.edge.half_widths[axis]
        return (c - e, c + e)


def wrap_domain(n: int) -> Box:
    """Root box of the wrapped domain for dimension ``n``.

    Center and edge vector are both (theta^-1, ..., theta^-n), which spans
    [0, theta^(n-1)] x ... x [0, theta^0].
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    theta = 2.0 ** (1.0 / n)
    coords = tuple(theta ** -(i + 1) for i in range(n))
    return Box(Point(coords), EdgeVector(coords))


def clamp01(coords: Sequence[float]) -> tuple[float, ...]:
    """Componentwise clamp into [0,1]; for an axis-aligned box this is the
    Euclidean projection onto the unit cube."""
    return tuple(min(1.0, max(0.0, c)) for c in coords)


def project(x: Point) -> Point:
    """Project a point of Theta onto the unit cube by clamping."""
    return Point(clamp01(x.coords))


def edge_norm(edge: EdgeVector | Iterable[float]) -> float:
    """Euclidean norm of an edge vector (ascending-index summation).

    The summation order is part of the determinism contract: every code path
    that scores candidates must produce bit-identical norms.
    """
    hw = edge.half_widths if isinstance(edge, EdgeVector) else edge
    s = 0.0
    for h in hw:
        s += h * h
    return math.sqrt(s)


def split(b: Box) -> tuple[Box, Box]:
    """Bisect a box across its largest edge entry (ties: lowest index).

    Returns the two halves (center + z, center - z), both with the split
    entry halved.  The children tile the parent region and their edge norms
    are the parent's divided by 2**(1/n).
    """
    center = b.center.coords
    hw = b.edge.half_widths
    best = -math.inf
    axis = 0
    for i, h in enumerate(hw):
        if h > best:
            best, axis = h, i
    z = hw[axis] * 0.5
    child_hw = hw[:axis] + (hw[axis] - z,) + hw[axis + 1 :]
    hi = center[:axis] + (center[axis] + z,) + center[axis + 1 :]
    lo = center[:axis] + (center[axis] - z,) + center[axis + 1 :]
    child_edge = EdgeVector(child_hw)
    return (Box(Point(hi), child_edge), Box(Point(lo), child_edge))


def box_volume(b: Box) -> float:
    """Volume of the box region, the product of its full side lengths."""
    v = 1.0
    for h in b.edge.half_widths:
        v *= 2.0 * h
    return v
