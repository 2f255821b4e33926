"""Evasion density known only at the nodes of a polar mesh."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import InvalidParameter
from .geometry import Point2, WedgeDomain, local_coords, polar_to_xy
from .mesh import WedgeMesh


@dataclass(frozen=True)
class GriddedDensity:
    """``xi = u^2`` on mesh nodes, anchored on ``wedge``.

    Integrals are midpoint sums over cells. Point evaluation is bilinear in
    (r, theta), with xi pinned to zero on the wedge boundary and the apex.
    """

    wedge: WedgeDomain
    mesh: WedgeMesh
    u: np.ndarray
    _interp: RegularGridInterpolator = field(init=False, repr=False, compare=False)
    _cdf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.mesh.radial_only:
            raise InvalidParameter("gridded densities need an angular mesh")
        u = np.asarray(self.u, dtype=float).reshape(self.mesh.shape)
        object.__setattr__(self, "u", u)
        m = self.mesh
        xi = u * u
        padded = np.zeros((m.n_r + 2, m.n_theta + 2))
        padded[1:-1, 1:-1] = xi
        rs = np.concatenate([[0.0], m.r, [m.r_max]])
        ts = np.concatenate([[-m.half_angle], m.theta, [m.half_angle]])
        object.__setattr__(self, "_interp", RegularGridInterpolator((rs, ts), padded))
        cdf = np.cumsum((xi * m.areas).ravel())
        object.__setattr__(self, "_cdf", cdf / cdf[-1])

    @property
    def xi(self) -> np.ndarray:
        return self.u * self.u

    @property
    def half_angle(self) -> float:
        return self.wedge.half_angle

    @property
    def r_max(self) -> float:
        return self.mesh.r_max

    def total_mass(self) -> float:
        return float(np.sum(self.xi * self.mesh.areas))

    def pdf_polar(self, r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        inside = (np.abs(theta) < self.half_angle) & (r <= self.r_max)
        rc = np.clip(r, 0.0, self.r_max)
        tc = np.clip(theta, -self.half_angle, self.half_angle)
        val = self._interp(np.stack([rc.ravel(), tc.ravel()], axis=-1)).reshape(r.shape)
        return np.where(inside, val, 0.0)

    def pdf_xy(self, xs, ys):
        along, across = local_coords(self.wedge, xs, ys)
        return self.pdf_polar(np.hypot(along, across), np.arctan2(across, along))

    def pdf(self, y1: Point2) -> float:
        return float(self.pdf_xy(y1.x, y1.y))

    def local_mean(self) -> tuple[float, float]:
        r, th = self.mesh.grid()
        wts = self.xi * self.mesh.areas
        return float(np.sum(wts * r * np.cos(th))), float(np.sum(wts * r * np.sin(th)))

    def mean(self) -> Point2:
        along, across = self.local_mean()
        x, y = polar_to_xy(self.wedge, math.hypot(along, across), math.atan2(across, along))
        return Point2(float(x), float(y))

    def fisher_trace(self) -> float:
        """``4 * sum |grad u|^2 * area`` with the solver's face differences."""
        from .solver import _laplacian_polar

        u = self.u.ravel()
        return 4.0 * float(u @ (_laplacian_polar(self.mesh) @ u))

    def expected_energy(self, pot) -> float:
        return float(np.sum(pot.on_mesh(self.mesh, self.wedge) * self.xi * self.mesh.areas))

    n_uniforms = 3

    def polar_from_uniforms(self, u):
        """Pick a cell by mass, then a point uniform in area within it."""
        u = np.asarray(u, dtype=float)
        m = self.mesh
        k = np.minimum(np.searchsorted(self._cdf, u[..., 0], side="right"), m.size - 1)
        i, j = np.divmod(k, m.n_theta)
        r_lo, r_hi = i * m.dr, (i + 1) * m.dr
        r = np.sqrt(r_lo**2 + u[..., 1] * (r_hi**2 - r_lo**2))
        theta = -m.half_angle + (j + u[..., 2]) * m.dtheta
        return r, theta

    def sample_polar(self, rng: np.random.Generator, n: int):
        if n < 1:
            raise InvalidParameter("n must be at least 1")
        return self.polar_from_uniforms(rng.random((n, self.n_uniforms)))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        r, th = self.sample_polar(rng, n)
        x, y = polar_to_xy(self.wedge, r, th)
        return np.column_stack([x, y])
