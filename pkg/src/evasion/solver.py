"""Finite-difference ground state of the stationary equation on a wedge.

Solves ``-lap(u) + (rho/4) U u = (mu/4) u`` with u = 0 on the wedge
boundary, using the conservative 5-point polar stencil on a cell-centred
mesh and shifted inverse power iteration for the smallest eigenpair.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import InvalidParameter, NoConvergence
from .geometry import WedgeDomain
from .mesh import WedgeMesh

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 500


@dataclass(frozen=True)
class SparseOperator:
    """Generalised symmetric pencil ``K u = lambda M u``.

    ``stiffness`` is the area-weighted operator (symmetric), ``mass`` the
    diagonal of cell areas. ``laplacian`` holds only the kinetic part of
    ``stiffness``; the discrete Dirichlet energy is ``u' laplacian u``.
    """

    mesh: WedgeMesh
    stiffness: sp.csr_matrix
    laplacian: sp.csr_matrix
    mass: np.ndarray
    potential: np.ndarray
    rho: float

    @property
    def matrix(self) -> sp.csr_matrix:
        """Pointwise operator ``M^-1 K`` acting on nodal values."""
        return sp.diags(1.0 / self.mass) @ self.stiffness

    def apply(self, u: np.ndarray) -> np.ndarray:
        return (self.stiffness @ np.ravel(u)) / self.mass

    def gershgorin_lower(self) -> float:
        k = self.stiffness.tocsr()
        diag = k.diagonal()
        off = np.asarray(abs(k).sum(axis=1)).ravel() - np.abs(diag)
        return float(np.min((diag - off) / self.mass))

    def stats(self) -> dict:
        k = self.stiffness.tocoo()
        return {
            "n": int(k.shape[0]),
            "nnz": int(k.nnz),
            "bandwidth": int(np.max(np.abs(k.row - k.col))) if k.nnz else 0,
        }


@dataclass(frozen=True)
class GroundState:
    mesh: WedgeMesh
    u: np.ndarray
    mu: float
    residual_norm: float
    iterations: int = 0
    wedge: WedgeDomain | None = None

    @property
    def eigenvalue(self) -> float:
        return self.mu / 4.0


def _laplacian_1d_radial(mesh: WedgeMesh) -> sp.csr_matrix:
    # plain -d^2/dr^2, zero flux through r = 0, Dirichlet at r_max
    n, dr = mesh.n_r, mesh.dr
    main = np.full(n, 2.0)
    main[0] = 1.0
    main[-1] = 3.0
    off = -np.ones(n - 1)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr") / dr


def _laplacian_polar(mesh: WedgeMesh) -> sp.csr_matrix:
    n_r, n_t = mesh.shape
    dr, dt = mesh.dr, mesh.dtheta
    r = mesh.r
    r_out = (np.arange(n_r) + 1.0) * dr  # r_{i+1/2}
    r_in = np.arange(n_r) * dr  # r_{i-1/2}, zero at the apex cell

    # radial fluxes, weighted by dtheta; outer face is Dirichlet at half spacing
    cr_out = r_out * dt / dr
    cr_in = r_in * dt / dr
    diag_r = cr_out + cr_in
    diag_r[-1] = cr_in[-1] + 2.0 * r_out[-1] * dt / dr
    # angular fluxes, weighted by dr / r
    ct = dr / (r * dt)

    idx = np.arange(n_r * n_t).reshape(n_r, n_t)
    rows, cols, vals = [], [], []

    diag = np.repeat(diag_r[:, None], n_t, axis=1) + np.repeat(2.0 * ct[:, None], n_t, axis=1)
    # theta faces at +-half_angle: u = 0 at half spacing doubles the coupling
    diag[:, 0] += ct
    diag[:, -1] += ct
    rows.append(idx.ravel()); cols.append(idx.ravel()); vals.append(diag.ravel())

    # radial neighbours
    a = idx[:-1, :].ravel()
    b = idx[1:, :].ravel()
    w = np.repeat(cr_out[:-1, None], n_t, axis=1).ravel()
    rows += [a, b]; cols += [b, a]; vals += [-w, -w]

    # angular neighbours
    a = idx[:, :-1].ravel()
    b = idx[:, 1:].ravel()
    w = np.repeat(ct[:, None], n_t - 1, axis=1).ravel()
    rows += [a, b]; cols += [b, a]; vals += [-w, -w]

    n = n_r * n_t
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(n, n))


def assemble(mesh: WedgeMesh, pot, rho: float, wedge: WedgeDomain | None = None) -> SparseOperator:
    """Assemble ``-lap + (rho/4) U`` on ``mesh``.

    ``pot`` is an energy potential (anything with ``on_mesh``) or an array of
    nodal values. In radial-only mode the operator is the 1-D ``-d^2/dr^2``.
    """
    if not rho > 0:
        raise InvalidParameter(f"rho={rho} must be positive")
    if isinstance(pot, np.ndarray):
        values = np.asarray(pot, dtype=float).reshape(mesh.shape)
    else:
        values = pot.on_mesh(mesh, wedge)
    if mesh.radial_only:
        lap = _laplacian_1d_radial(mesh)
        mass = np.full(mesh.n_r, mesh.dr)
    else:
        lap = _laplacian_polar(mesh)
        mass = mesh.areas.ravel().copy()
    stiff = (lap + sp.diags(0.25 * rho * values.ravel() * mass)).tocsr()
    return SparseOperator(mesh, stiff, lap, mass, values, rho)


def _normalise(u: np.ndarray, mass: np.ndarray) -> np.ndarray:
    u = u / math.sqrt(float(np.dot(u * u, mass)))
    # ground state has one sign; pick the positive one
    return -u if u.sum() < 0 else u


def residual(op: SparseOperator, u: np.ndarray, eigenvalue: float) -> float:
    """Area-weighted L2 norm of ``(op - eigenvalue) u`` on nodal values."""
    r = op.apply(u) - eigenvalue * np.ravel(u)
    return float(math.sqrt(np.dot(r * r, op.mass)))


def ground_state(op: SparseOperator, mesh: WedgeMesh | None = None, tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER, wedge: WedgeDomain | None = None) -> GroundState:
    """Smallest eigenpair by shifted inverse power iteration.

    The shift sits just below the Gershgorin lower bound so the shifted
    pencil stays positive definite and is factorised once.
    """
    if not tol > 0:
        raise InvalidParameter(f"tol={tol} must be positive")
    mesh = mesh or op.mesh
    lb = op.gershgorin_lower()
    shift = lb - 1e-6 * max(1.0, abs(lb))
    lu = splu((op.stiffness - sp.diags(shift * op.mass)).tocsc())

    u = _normalise(np.ones(op.mass.size), op.mass)
    lam = float(u @ (op.stiffness @ u))
    for it in range(1, max_iter + 1):
        u = _normalise(lu.solve(op.mass * u), op.mass)
        new = float(u @ (op.stiffness @ u))
        if abs(new - lam) < tol:
            lam = new
            break
        lam = new
    else:
        last = GroundState(mesh, u.reshape(mesh.shape), 4.0 * lam, residual(op, u, lam),
                           max_iter, wedge)
        raise NoConvergence(max_iter, last)

    res = residual(op, u, lam)
    log.debug("ground state: lambda=%.12g after %d iterations, residual %.3g", lam, it, res)
    return GroundState(mesh, u.reshape(mesh.shape), 4.0 * lam, res, it, wedge)


def dirichlet_energy(op: SparseOperator, u: np.ndarray) -> float:
    """Discrete ``integral |grad u|^2`` including boundary faces."""
    u = np.ravel(u)
    return float(u @ (op.laplacian @ u))


def solve_wedge(wedge: WedgeDomain, pot, rho: float, n_r: int = 256, n_theta: int = 256,
                tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> tuple[GroundState, SparseOperator]:
    mesh = WedgeMesh(n_r, n_theta, wedge.r_max, wedge.half_angle)
    op = assemble(mesh, pot, rho, wedge)
    return ground_state(op, mesh, tol, max_iter, wedge), op


def consistency_residual(op: SparseOperator, u: np.ndarray, eigenvalue: float) -> float:
    """Residual of an externally supplied ``u`` away from the truncation face.

    An analytic solution on the unbounded wedge is not exactly zero at
    ``r_max``; the Dirichlet ghost there would amplify that by 1/dr^2, so
    the outermost ring of cells is left out.
    """
    m = op.mesh
    r = (op.apply(u) - eigenvalue * np.ravel(u)).reshape(m.n_r, -1)
    w = op.mass.reshape(m.n_r, -1)
    return float(math.sqrt(np.sum(r[:-1] ** 2 * w[:-1])))


def density_from_state(gs: GroundState, wedge: WedgeDomain | None = None):
    """Gridded density ``u^2`` carried by a ground state."""
    from .gridded import GriddedDensity

    w = wedge or gs.wedge
    if w is None:
        raise InvalidParameter("ground state carries no wedge; pass one explicitly")
    return GriddedDensity(w, gs.mesh, gs.u)
