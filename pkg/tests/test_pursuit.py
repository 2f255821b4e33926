import math

import numpy as np
import pytest
from scipy import stats

from evasion.errors import CaptureEvent, IndexOutOfRange, InvalidParameter
from evasion.geometry import Point2, contains, wedge_from_positions
from evasion.pursuit import (PursuitConfig, distance_histogram, interpolate_path, local_density,
                             pooled_tail_fraction, run, step, step_statistics, substream,
                             tradeoff_sweep)

PAPER = PursuitConfig(n_trajectories=2000, n_steps=10, seed=11)


@pytest.fixture(scope="module")
def medium_run():
    return run(PursuitConfig(n_trajectories=20000, n_steps=10, seed=3))


def test_step_predator_goes_to_mean():
    rng = np.random.default_rng(1)
    prey, pred = step(Point2(0, 0), Point2(-2, 0), PAPER, rng)
    assert pred.x == pytest.approx(2.2567583, abs=1e-6)
    assert pred.y == 0.0
    w = wedge_from_positions(Point2(0, 0), Point2(-2, 0), math.pi / 4, 100.0)
    assert contains(w, prey)


def test_step_reproducible():
    a = step(Point2(0.3, 1), Point2(-2, 0.5), PAPER, np.random.default_rng(5))
    b = step(Point2(0.3, 1), Point2(-2, 0.5), PAPER, np.random.default_rng(5))
    assert a == b


def test_step_capture():
    with pytest.raises(CaptureEvent):
        step(Point2(1, 1), Point2(1, 1), PAPER, np.random.default_rng(0))


def test_config_validation():
    with pytest.raises(InvalidParameter):
        PursuitConfig(y0=Point2(0, 0), z0=Point2(0, 0))
    with pytest.raises(InvalidParameter):
        PursuitConfig(n_trajectories=0)
    with pytest.raises(InvalidParameter):
        PursuitConfig(density_source="magic")


def test_zero_steps():
    res = run(PursuitConfig(n_trajectories=3, n_steps=0))
    assert res.prey.shape == (3, 1, 2)
    assert np.all(res.distances == 2.0)


def test_run_matches_scalar_steps():
    cfg = PursuitConfig(n_trajectories=5, n_steps=6, seed=42)
    res = run(cfg)
    dens = local_density(cfg)
    for i in range(cfg.n_trajectories):
        rng = substream(cfg.seed, i)
        y, z = cfg.y0, cfg.z0
        for k in range(cfg.n_steps):
            y, z = step(y, z, cfg, rng, dens)
            assert (y.x, y.y) == tuple(res.prey[i, k + 1])
            assert (z.x, z.y) == tuple(res.predator[i, k + 1])


def test_reproducible_and_thread_independent():
    cfg = PursuitConfig(n_trajectories=9000, n_steps=4, seed=5)
    a = run(cfg)
    b = run(cfg, threads=3)
    assert np.array_equal(a.prey, b.prey) and np.array_equal(a.predator, b.predator)
    c = run(PursuitConfig(n_trajectories=9000, n_steps=4, seed=6))
    assert not np.array_equal(a.prey, c.prey)


def test_waypoints_in_wedge(medium_run):
    res = medium_run
    for i in range(200):
        for k in range(res.config.n_steps):
            w = wedge_from_positions(Point2(*res.prey[i, k]), Point2(*res.predator[i, k]),
                                     res.config.theta_max, 1e6)
            assert contains(w, Point2(*res.prey[i, k + 1]))


def test_trace_view(medium_run):
    t = medium_run[7]
    assert t.prey.shape == (11, 2) and t.distances.shape == (11,)
    assert np.allclose(t.distances, np.hypot(*(t.prey - t.predator).T))
    assert t.captured_at is None and t.seed == 3


def test_per_step_bound_and_no_capture(medium_run):
    bound = 1.0 / medium_run.fisher_trace
    for s in step_statistics(medium_run)[1:]:
        assert s.mean_sq >= bound - 3 * s.stderr
    assert medium_run.n_captures == 0
    assert np.all(medium_run.distances > 1e-6)


def test_tail_fraction_near_quadrature_value(medium_run):
    # P(|Y - E Y|^2 >= 1/6) = 0.8421 by 2-D quadrature of the closed form
    frac = pooled_tail_fraction(medium_run)
    se = math.sqrt(0.8421 * 0.1579 / (20000 * 10))
    assert abs(frac - 0.8421) < 4 * se


def test_histogram(medium_run):
    h = distance_histogram(medium_run, 3, 40)
    assert h.mass.sum() == pytest.approx(1.0, abs=1e-12)
    h0 = distance_histogram(medium_run, 0, 10, range=(0.0, 5.0))
    i = np.searchsorted(h0.edges, 2.0, side="right") - 1
    assert h0.mass[i] == 1.0
    with pytest.raises(IndexOutOfRange):
        distance_histogram(medium_run, 11, 10)
    with pytest.raises(InvalidParameter):
        distance_histogram(medium_run, 1, 1)


def test_stationary_across_steps(medium_run):
    d = medium_run.distances
    assert stats.ks_2samp(d[:, 2], d[:, 5]).pvalue > 0.01


def test_tradeoff_sweep():
    rows = tradeoff_sweep([0.25, 0.5, 1, 2, 4])
    ft = [r.fisher_trace for r in rows]
    psi = [r.expected_energy for r in rows]
    assert all(a < b for a, b in zip(ft, ft[1:]))
    assert all(a > b for a, b in zip(psi, psi[1:]))
    mid = rows[2]
    assert mid.fisher_trace == pytest.approx(6.0, rel=0.01)
    assert mid.expected_energy == pytest.approx(6.0, rel=0.01)
    assert tradeoff_sweep([1.0, 2.0], threads=2) == rows[2:4]
    with pytest.raises(InvalidParameter):
        tradeoff_sweep([1.0, 0.0])


def test_solver_density_source():
    cfg = PursuitConfig(n_trajectories=4000, n_steps=5, seed=1, density_source="solver",
                        mesh=(96, 96))
    res = run(cfg)
    assert res.fisher_trace == pytest.approx(6.0, abs=0.05)
    assert abs(pooled_tail_fraction(res) - 0.8421) < 0.02
    assert res.n_captures == 0


def test_interpolate_path():
    p = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 2.0]])
    q = interpolate_path(p, 4)
    assert q.shape == (9, 2)
    assert np.allclose(q[2], [0.5, 0.0]) and np.allclose(q[-1], [1.0, 2.0])
