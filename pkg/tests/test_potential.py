import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from evasion.errors import InvalidParameter, NotRadial, OutOfDomain
from evasion.geometry import Point2, WedgeDomain
from evasion.mesh import WedgeMesh
from evasion.potential import (SingleIntegrator, Tabulated, load_tabulated_csv, tabulate,
                               write_tabulated_csv)


def test_single_integrator_values():
    assert SingleIntegrator(1.0).evaluate(Point2(1, 1)) == pytest.approx(2.0)
    assert SingleIntegrator(2.0).evaluate(Point2(2, 0)) == pytest.approx(2.0)
    assert SingleIntegrator(1.0, Point2(3, -1)).evaluate(Point2(3, -1)) == 0.0


@pytest.mark.parametrize("T, r, expected", [(1, 0, 0), (1, 2, 4), (4, 2, 1)])
def test_radial_profile(T, r, expected):
    assert SingleIntegrator(T).radial_profile(r) == pytest.approx(expected)


def test_horizon_must_be_positive():
    with pytest.raises(InvalidParameter):
        SingleIntegrator(0.0)


@given(st.floats(0.1, 10), st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 2 * math.pi))
def test_single_integrator_is_radial(T, x, y, phi):
    pot = SingleIntegrator(T, Point2(0.5, -0.25))
    p = Point2(0.5 + x, -0.25 + y)
    r = math.hypot(x, y)
    q = Point2(0.5 + r * math.cos(phi), -0.25 + r * math.sin(phi))
    assert pot.evaluate(p) >= 0
    assert pot.evaluate(p) == pytest.approx(pot.radial_profile(r), rel=1e-12, abs=1e-12)
    assert pot.evaluate(q) == pytest.approx(pot.evaluate(p), rel=1e-12, abs=1e-12)


@pytest.fixture
def wedge():
    return WedgeDomain(Point2(1.0, 0.0), Point2(0.0, 1.0), math.pi / 3, 4.0)


@pytest.fixture
def mesh(wedge):
    return WedgeMesh(32, 24, wedge.r_max, wedge.half_angle)


def test_tabulated_zero(mesh, wedge):
    pot = Tabulated(mesh, np.zeros(mesh.shape), wedge)
    assert pot.evaluate(Point2(1.0, 0.0)) == 0.0
    assert pot.evaluate(Point2(1.0, 2.0)) == 0.0


def test_tabulated_bilinear_reproduces_linear_function(mesh, wedge):
    # bilinear interpolation is exact for a + b r + c theta
    r, th = mesh.grid()
    vals = 1.0 + 2.0 * r + 0.5 * (th + mesh.half_angle)
    pot = Tabulated(mesh, vals, wedge)
    rr, tt = 2.3, 0.4
    x = 1.0 + rr * math.cos(math.pi / 2 + tt)
    y = rr * math.sin(math.pi / 2 + tt)
    assert pot.evaluate(Point2(x, y)) == pytest.approx(1.0 + 2.0 * rr + 0.5 * (tt + mesh.half_angle))


def test_tabulated_out_of_domain(mesh, wedge):
    pot = Tabulated(mesh, np.ones(mesh.shape), wedge)
    with pytest.raises(OutOfDomain):
        pot.evaluate(Point2(1.0, -1.0))
    with pytest.raises(OutOfDomain):
        pot.evaluate(Point2(1.0, 4.5))


def test_tabulated_rejects_negative(mesh, wedge):
    with pytest.raises(InvalidParameter):
        Tabulated(mesh, -np.ones(mesh.shape), wedge)


def test_radial_profile_requires_declaration(mesh, wedge):
    pot = tabulate(SingleIntegrator(1.0, wedge.apex).evaluate_xy, mesh, wedge)
    with pytest.raises(NotRadial):
        pot.radial_profile(1.0)
    radial = tabulate(SingleIntegrator(1.0, wedge.apex).evaluate_xy, mesh, wedge, radial=True)
    assert radial.radial_profile(mesh.r[10]) == pytest.approx(mesh.r[10] ** 2)


def test_tabulated_matches_analytic_on_nodes(mesh, wedge):
    si = SingleIntegrator(2.0, wedge.apex)
    pot = tabulate(si.evaluate_xy, mesh, wedge)
    assert np.allclose(pot.on_mesh(mesh), si.on_mesh(mesh, wedge))


def test_csv_round_trip(tmp_path, mesh, wedge):
    pot = tabulate(lambda x, y: (x - 1.0) ** 2 + 0.1 * y, mesh, wedge)
    path = tmp_path / "pot.csv"
    write_tabulated_csv(pot, path)
    back = load_tabulated_csv(path, wedge)
    assert back.mesh == pot.mesh or np.allclose(back.mesh.r, pot.mesh.r)
    assert np.array_equal(back.values, pot.values)


def test_csv_half_angle_mismatch(tmp_path, mesh, wedge):
    pot = Tabulated(mesh, np.ones(mesh.shape), wedge)
    path = tmp_path / "pot.csv"
    write_tabulated_csv(pot, path)
    other = WedgeDomain(wedge.apex, wedge.heading, math.pi / 4, 4.0)
    with pytest.raises(InvalidParameter):
        load_tabulated_csv(path, other)
