"""Planar points, polar offsets and the wedge-shaped escape set."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoincidentPositions, InvalidParameter

_COINCIDENT_TOL = 1e-12
_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidParameter(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def __sub__(self, other: Point2) -> Point2:
        return Point2(self.x - other.x, self.y - other.y)

    def __add__(self, other: Point2) -> Point2:
        return Point2(self.x + other.x, self.y + other.y)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class PolarOffset:
    r: float
    theta: float

    def __post_init__(self):
        if self.r < 0:
            raise InvalidParameter(f"negative radius {self.r}")
        if not (-math.pi < self.theta <= math.pi):
            raise InvalidParameter(f"angle {self.theta} outside (-pi, pi]")


@dataclass(frozen=True)
class WedgeDomain:
    """Cone of directions within ``half_angle`` of ``heading``, cut off at ``r_max``.

    ``heading`` is stored as a unit-vector ``Point2``.
    """

    apex: Point2
    heading: Point2
    half_angle: float
    r_max: float

    def __post_init__(self):
        if abs(self.heading.norm() - 1.0) > _UNIT_TOL:
            raise InvalidParameter("heading must be a unit vector")
        if not (0.0 < self.half_angle <= math.pi):
            raise InvalidParameter(f"half_angle {self.half_angle} not in (0, pi]")
        if not self.r_max > 0:
            raise InvalidParameter(f"r_max {self.r_max} must be positive")

    @property
    def heading_angle(self) -> float:
        return math.atan2(self.heading.y, self.heading.x)

    def with_r_max(self, r_max: float) -> WedgeDomain:
        return WedgeDomain(self.apex, self.heading, self.half_angle, r_max)


def unit(dx: float, dy: float) -> Point2:
    n = math.hypot(dx, dy)
    return Point2(dx / n, dy / n)


def wedge_from_positions(prey: Point2, predator: Point2, half_angle: float,
                         r_max: float = 1.0) -> WedgeDomain:
    """Escape wedge at ``prey`` pointing directly away from ``predator``."""
    d = prey - predator
    if d.norm() < _COINCIDENT_TOL:
        raise CoincidentPositions(f"prey and predator coincide at {prey}")
    return WedgeDomain(prey, unit(d.x, d.y), half_angle, r_max)


def local_coords(w: WedgeDomain, px, py):
    """Offsets of points from the apex expressed along/across the heading.

    Works on scalars or arrays.
    """
    dx = np.asarray(px, dtype=float) - w.apex.x
    dy = np.asarray(py, dtype=float) - w.apex.y
    hx, hy = w.heading.x, w.heading.y
    along = dx * hx + dy * hy
    across = -dx * hy + dy * hx
    return along, across


def to_polar(w: WedgeDomain, p: Point2) -> PolarOffset:
    along, across = local_coords(w, p.x, p.y)
    r = math.hypot(along, across)
    theta = math.atan2(across, along)
    if theta == -math.pi:
        theta = math.pi
    return PolarOffset(r, theta)


def from_polar(w: WedgeDomain, o: PolarOffset) -> Point2:
    x, y = polar_to_xy(w, o.r, o.theta)
    return Point2(float(x), float(y))


def polar_to_xy(w: WedgeDomain, r, theta):
    """Vectorized inverse of :func:`to_polar`; returns ``(x, y)`` arrays."""
    c, s = np.cos(theta), np.sin(theta)
    hx, hy = w.heading.x, w.heading.y
    along = r * c
    across = r * s
    return w.apex.x + along * hx - across * hy, w.apex.y + along * hy + across * hx


def contains(w: WedgeDomain, p: Point2) -> bool:
    along, across = local_coords(w, p.x, p.y)
    r = math.hypot(along, across)
    if r == 0.0:
        return True
    # atan2 on the rotated offset, not acos of a dot product
    return abs(math.atan2(across, along)) <= w.half_angle and r <= w.r_max


def contains_many(w: WedgeDomain, xs, ys) -> np.ndarray:
    along, across = local_coords(w, xs, ys)
    r = np.hypot(along, across)
    inside = (np.abs(np.arctan2(across, along)) <= w.half_angle) & (r <= w.r_max)
    return inside | (r == 0.0)
