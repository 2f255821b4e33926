"""Minimum energy needed to reach a destination within one period.

Only single-integrator dynamics have a closed form here; anything else
comes in as a table sampled on a polar mesh.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import InvalidParameter, NotRadial, OutOfDomain
from .geometry import Point2, WedgeDomain, local_coords
from .mesh import WedgeMesh


@dataclass(frozen=True)
class SingleIntegrator:
    """``U(y1) = |y1 - origin|^2 / horizon`` for xdot = u with cost u'u."""

    horizon: float
    origin: Point2 = Point2(0.0, 0.0)

    def __post_init__(self):
        if not self.horizon > 0:
            raise InvalidParameter(f"horizon {self.horizon} must be positive")

    radial = True

    def evaluate(self, y1: Point2) -> float:
        return float(self.evaluate_xy(y1.x, y1.y))

    def evaluate_xy(self, xs, ys):
        dx = np.asarray(xs, dtype=float) - self.origin.x
        dy = np.asarray(ys, dtype=float) - self.origin.y
        return (dx * dx + dy * dy) / self.horizon

    def on_mesh(self, mesh: WedgeMesh, wedge: WedgeDomain | None = None) -> np.ndarray:
        r, th = mesh.grid()
        if wedge is None or wedge.apex == self.origin:
            return r**2 / self.horizon
        return self.evaluate_xy(*_polar_grid_xy(wedge, r, th))

    def radial_profile(self, r: float) -> float:
        if r < 0:
            raise InvalidParameter(f"negative radius {r}")
        return r * r / self.horizon


@dataclass(frozen=True)
class Tabulated:
    """Potential sampled at the nodes of a polar mesh anchored on ``wedge``.

    Queries use bilinear interpolation in (r, theta). Between the outermost
    nodes and the cell faces the value is held constant.
    """

    mesh: WedgeMesh
    values: np.ndarray
    wedge: WedgeDomain
    radial: bool = False
    _interp: RegularGridInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.mesh.shape:
            raise InvalidParameter(f"values shape {v.shape} != mesh shape {self.mesh.shape}")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise InvalidParameter("tabulated potential must be finite and non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.mesh.radial_only:
            raise InvalidParameter("tabulated potentials need an angular mesh")
        object.__setattr__(self, "_interp", RegularGridInterpolator(
            (self.mesh.r, self.mesh.theta), v, method="linear"))

    def evaluate(self, y1: Point2) -> float:
        return float(self.evaluate_xy(y1.x, y1.y))

    def evaluate_xy(self, xs, ys):
        along, across = local_coords(self.wedge, xs, ys)
        r = np.hypot(along, across)
        th = np.where(r > 0, np.arctan2(across, along), 0.0)
        tol = 1e-12
        if np.any(r > self.mesh.r_max * (1 + tol)) or np.any(np.abs(th) > self.mesh.half_angle + tol):
            raise OutOfDomain("query outside the tabulated mesh")
        m = self.mesh
        rc = np.clip(r, m.r[0], m.r[-1])
        tc = np.clip(th, m.theta[0], m.theta[-1])
        out = self._interp(np.stack([np.ravel(rc), np.ravel(tc)], axis=-1))
        return out.reshape(np.shape(r))

    def on_mesh(self, mesh: WedgeMesh, wedge: WedgeDomain | None = None) -> np.ndarray:
        if mesh == self.mesh:
            return self.values
        w = wedge or self.wedge
        r, th = mesh.grid()
        xs, ys = _polar_grid_xy(w, r, th)
        return self.evaluate_xy(xs, ys)

    def radial_profile(self, r: float) -> float:
        if not self.radial:
            raise NotRadial("tabulated potential was not declared radially symmetric")
        return float(self.evaluate_xy(*_polar_grid_xy(self.wedge, np.array(r), np.array(0.0))))


EnergyPotential = SingleIntegrator | Tabulated


def _polar_grid_xy(w: WedgeDomain, r, th):
    hx, hy = w.heading.x, w.heading.y
    a, c = r * np.cos(th), r * np.sin(th)
    return w.apex.x + a * hx - c * hy, w.apex.y + a * hy + c * hx


def evaluate(pot: EnergyPotential, y1: Point2) -> float:
    return pot.evaluate(y1)


def radial_profile(pot: EnergyPotential, r: float) -> float:
    return pot.radial_profile(r)


def tabulate(fn, mesh: WedgeMesh, wedge: WedgeDomain, radial: bool = False) -> Tabulated:
    """Sample ``fn(x, y)`` at the mesh nodes."""
    r, th = mesh.grid()
    xs, ys = _polar_grid_xy(wedge, r, th)
    return Tabulated(mesh, np.asarray(fn(xs, ys), dtype=float), wedge, radial)


def write_tabulated_csv(pot: Tabulated, path: str | Path) -> None:
    r, th = pot.mesh.grid()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "theta", "value"])
        for a, b, v in zip(r.ravel(), th.ravel(), pot.values.ravel()):
            w.writerow([repr(float(a)), repr(float(b)), repr(float(v))])


def load_tabulated_csv(path: str | Path, wedge: WedgeDomain, radial: bool = False) -> Tabulated:
    """Read ``r,theta,value`` rows laid out on a cell-centred wedge mesh.

    The mesh is inferred from the distinct node coordinates and must agree
    with ``wedge.half_angle``.
    """
    data = np.genfromtxt(path, delimiter=",", names=True, dtype=float, encoding="utf-8")
    missing = {"r", "theta", "value"} - set(data.dtype.names or ())
    if missing:
        raise InvalidParameter(f"potential CSV lacks columns {sorted(missing)}")
    rs = np.unique(data["r"])
    ts = np.unique(data["theta"])
    n_r, n_t = len(rs), len(ts)
    if n_r * n_t != len(data):
        raise InvalidParameter("potential CSV is not a full tensor grid")
    dr = rs[1] - rs[0]
    dt = ts[1] - ts[0]
    mesh = WedgeMesh(n_r, n_t, n_r * dr, n_t * dt / 2.0)
    if not (np.allclose(rs, mesh.r, rtol=1e-9, atol=1e-12)
            and np.allclose(ts, mesh.theta, rtol=1e-9, atol=1e-12)):
        raise InvalidParameter("potential CSV nodes are not cell-centred")
    if not math.isclose(mesh.half_angle, wedge.half_angle, rel_tol=1e-9):
        raise InvalidParameter(
            f"CSV half angle {mesh.half_angle} does not match wedge {wedge.half_angle}")
    vals = np.empty(mesh.shape)
    i = np.searchsorted(rs, data["r"])
    j = np.searchsorted(ts, data["theta"])
    vals[i, j] = data["value"]
    return Tabulated(mesh, vals, wedge, radial)
