"""Cell-centred polar mesh over a truncated wedge."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidParameter

MIN_NODES = 8


@dataclass(frozen=True)
class WedgeMesh:
    """Polar mesh with ``n_r`` radial and ``n_theta`` angular cells.

    Nodes sit at cell centres, so none lies on r = 0 or on the wedge
    boundary. Arrays over nodes have shape ``(n_r, n_theta)``.

    ``n_theta == 1`` is a radial-only mode used to check the radial
    discretisation in isolation; the angular term is then dropped.
    """

    n_r: int
    n_theta: int
    r_max: float
    half_angle: float

    def __post_init__(self):
        if self.n_r < MIN_NODES:
            raise InvalidParameter(f"n_r={self.n_r} < {MIN_NODES}")
        if self.n_theta != 1 and self.n_theta < MIN_NODES:
            raise InvalidParameter(f"n_theta={self.n_theta} < {MIN_NODES}")
        if not self.r_max > 0 or not math.isfinite(self.r_max):
            raise InvalidParameter(f"r_max={self.r_max} must be finite and positive")
        if not 0 < self.half_angle <= math.pi:
            raise InvalidParameter(f"half_angle={self.half_angle} not in (0, pi]")

    @property
    def radial_only(self) -> bool:
        return self.n_theta == 1

    @property
    def dr(self) -> float:
        return self.r_max / self.n_r

    @property
    def dtheta(self) -> float:
        return 2.0 * self.half_angle / self.n_theta

    @cached_property
    def r(self) -> np.ndarray:
        return (np.arange(self.n_r) + 0.5) * self.dr

    @cached_property
    def theta(self) -> np.ndarray:
        return -self.half_angle + (np.arange(self.n_theta) + 0.5) * self.dtheta

    @cached_property
    def areas(self) -> np.ndarray:
        """Cell areas ``r_i dr dtheta`` broadcast to ``(n_r, n_theta)``."""
        a = self.r * self.dr * self.dtheta
        return np.repeat(a[:, None], self.n_theta, axis=1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_r, self.n_theta)

    @property
    def size(self) -> int:
        return self.n_r * self.n_theta

    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.r, self.theta, indexing="ij")


def parse_mesh_spec(text: str) -> tuple[int, int]:
    """Parse ``"NxM"`` into ``(n_r, n_theta)``."""
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise InvalidParameter(f"bad mesh spec {text!r}; expected NxM") from None
