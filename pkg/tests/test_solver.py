import math

import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.special import jn_zeros

from evasion.closed_form import make_closed_form
from evasion.errors import InvalidParameter, NoConvergence
from evasion.geometry import Point2, WedgeDomain
from evasion.mesh import WedgeMesh, parse_mesh_spec
from evasion.metrics import objective
from evasion.potential import SingleIntegrator, tabulate
from evasion.solver import (DEFAULT_TOL, assemble, consistency_residual, density_from_state,
                            ground_state, solve_wedge)


def _gap(gs, d):
    r, th = gs.mesh.grid()
    return float(np.max(np.abs(gs.u**2 - d.pdf_polar(r, th))))


def test_mesh_validation():
    with pytest.raises(InvalidParameter):
        WedgeMesh(4, 16, 1.0, 1.0)
    with pytest.raises(InvalidParameter):
        WedgeMesh(16, 4, 1.0, 1.0)
    m = WedgeMesh(8, 8, 2.0, math.pi / 4)
    assert m.r[0] > 0 and m.r[-1] < 2.0
    assert np.all(np.abs(m.theta) < m.half_angle)
    assert m.areas.sum() == pytest.approx(0.5 * 2.0**2 * 2 * m.half_angle)
    assert parse_mesh_spec("64x32") == (64, 32)
    with pytest.raises(InvalidParameter):
        parse_mesh_spec("64by32")


def test_stiffness_symmetric():
    m = WedgeMesh(16, 12, 3.0, 0.9)
    op = assemble(m, SingleIntegrator(1.0), 2.0)
    k = op.stiffness
    assert abs(k - k.T).max() < 1e-14
    st = op.stats()
    assert st["n"] == 16 * 12 and st["bandwidth"] == 12


def test_half_disc_dirichlet_laplacian():
    # zero potential on a half disc of radius 3: first mode is J1 with cos(theta)
    m = WedgeMesh(128, 128, 3.0, math.pi / 2)
    gs = ground_state(assemble(m, np.zeros(m.shape), 1.0))
    exact = (jn_zeros(1, 1)[0] / 3.0) ** 2
    assert gs.eigenvalue > 0
    assert gs.eigenvalue == pytest.approx(exact, rel=1e-3)


def test_radial_only_oscillator():
    # -u'' + (rho/4) r^2 u on the half line with zero flux at 0: ground level sqrt(rho)/2
    rho = 1.0
    m = WedgeMesh(512, 1, 8.0, math.pi / 4)
    gs = ground_state(assemble(m, m.r**2, rho))
    assert gs.eigenvalue == pytest.approx(math.sqrt(rho) / 2, rel=0.01)


def test_matches_sparse_eigensolver():
    m = WedgeMesh(24, 16, 6.0, 0.7)
    op = assemble(m, SingleIntegrator(1.0), 1.0)
    gs = ground_state(op, tol=1e-12)
    vals = spla.eigsh(op.stiffness, k=1, M=sp.diags(op.mass),
                      sigma=0.0, which="LM", return_eigenvectors=False)
    assert gs.eigenvalue == pytest.approx(vals[0], rel=1e-9)


def test_paper_config_mu_and_gap(paper_solution, paper_density):
    gs, op = paper_solution
    assert gs.mu == pytest.approx(12.0, abs=0.1)
    assert _gap(gs, paper_density) < 1e-3
    assert np.all(gs.u > 0)
    assert float(np.sum(gs.u**2 * gs.mesh.areas)) == pytest.approx(1.0, abs=1e-10)


def test_closed_form_satisfies_discrete_equation(paper_solution, paper_density):
    _, op = paper_solution
    r, th = op.mesh.grid()
    u = paper_density.amplitude_polar(r, th)
    assert consistency_residual(op, u, paper_density.mu / 4) < 1e-3


def test_mesh_convergence(paper_density, unit_pot, paper_solution):
    mus, gaps = [], []
    for n in (64, 128):
        gs, _ = solve_wedge(paper_density.wedge, unit_pot, 1.0, n, n)
        mus.append(gs.mu)
        gaps.append(_gap(gs, paper_density))
    mus.append(paper_solution[0].mu)
    gaps.append(_gap(paper_solution[0], paper_density))
    assert gaps[0] > gaps[1] > gaps[2]
    assert mus[0] < mus[1] < mus[2] < 12.0
    assert (mus[1] - mus[0]) >= 3 * (mus[2] - mus[1])


def test_truncation_insensitive(paper_density, unit_pot):
    w = paper_density.wedge
    a = ground_state(assemble(WedgeMesh(128, 64, w.r_max, w.half_angle), unit_pot, 1.0), tol=1e-13)
    b = ground_state(assemble(WedgeMesh(256, 64, 2 * w.r_max, w.half_angle), unit_pot, 1.0),
                     tol=1e-13)
    assert abs(a.eigenvalue - b.eigenvalue) < DEFAULT_TOL


def test_no_convergence_carries_last_iterate(paper_density, unit_pot):
    m = WedgeMesh(32, 32, paper_density.r_max, paper_density.half_angle)
    with pytest.raises(NoConvergence) as exc:
        ground_state(assemble(m, unit_pot, 1.0), tol=1e-15, max_iter=2)
    assert exc.value.last is not None and exc.value.last.u.shape == m.shape


def test_gridded_density(paper_solution, paper_density, unit_pot):
    gs, _ = paper_solution
    g = density_from_state(gs)
    assert g.total_mass() == pytest.approx(1.0, abs=1e-6)
    assert g.fisher_trace() == pytest.approx(6.0, abs=0.05)
    cm, gm = paper_density.mean(), g.mean()
    assert math.hypot(cm.x - gm.x, cm.y - gm.y) < 1e-3
    assert g.pdf(Point2(-1.0, 0.0)) == 0.0
    assert g.pdf(Point2(2.0, 2.0 * math.tan(math.pi / 4))) == 0.0
    assert g.pdf(Point2(2.0, 0.0)) == pytest.approx(paper_density.pdf(Point2(2.0, 0.0)), abs=1e-3)


def test_objective_consistency(paper_solution, paper_density, unit_pot):
    g = density_from_state(paper_solution[0])
    a = objective(g, unit_pot, 1.0)
    b = objective(paper_density, unit_pot, 1.0)
    assert a == pytest.approx(b, rel=0.005)


def test_gridded_sampler(paper_solution, rng):
    g = density_from_state(paper_solution[0])
    r, th = g.sample_polar(rng, 400_000)
    assert np.all(np.abs(th) <= g.half_angle) and np.all(r <= g.r_max)
    s = r * r
    assert abs(s.mean() - 6.0) < 4 * s.std() / math.sqrt(s.size) + 0.01


def test_non_radial_tabulated_potential():
    w = WedgeDomain(Point2(0, 0), Point2(1, 0), math.pi / 3, 6.0)
    m = WedgeMesh(64, 48, w.r_max, w.half_angle)
    pot = tabulate(lambda x, y: (x * x + y * y) * (1.0 + 0.5 * np.tanh(y)), m, w)
    gs = ground_state(assemble(m, pot, 1.0, w), wedge=w)
    assert np.all(gs.u > 0)
    g = density_from_state(gs)
    # heavier cost for y > 0 pushes mass to y < 0
    assert g.mean().y < 0
