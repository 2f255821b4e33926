"""Repeated pursuit: the prey re-draws a waypoint every period, the predator
jumps to its least-mean-square prediction of that waypoint.

Random streams
--------------
Trajectory ``i`` of a run with master seed ``s`` draws all of its uniforms
from ``numpy.random.Generator(PCG64(SeedSequence([s, i])))``, in step order,
``n_uniforms`` per step. Results are therefore independent of how the
trajectories are split across worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .closed_form import ClosedFormDensity, make_closed_form
from .errors import CaptureEvent, IndexOutOfRange, InvalidParameter
from .geometry import Point2, WedgeDomain, wedge_from_positions
from .gridded import GriddedDensity
from .metrics import metrics
from .potential import SingleIntegrator

BLOCK = 4096
CAPTURE_RADIUS = 1e-6


@dataclass(frozen=True)
class PursuitConfig:
    y0: Point2 = Point2(0.0, 0.0)
    z0: Point2 = Point2(-2.0, 0.0)
    theta_max: float = math.pi / 4
    rho: float = 1.0
    horizon_T: float = 1.0
    n_steps: int = 10
    n_trajectories: int = 1000
    seed: int = 0
    density_source: str = "closed_form"
    mesh: tuple[int, int] = (256, 256)
    capture_radius: float = CAPTURE_RADIUS

    def __post_init__(self):
        if self.n_steps < 0:
            raise InvalidParameter("n_steps must be non-negative")
        if self.n_trajectories < 1:
            raise InvalidParameter("n_trajectories must be at least 1")
        if (self.y0 - self.z0).norm() < 1e-12:
            raise InvalidParameter("initial prey and predator positions coincide")
        if self.density_source not in ("closed_form", "solver"):
            raise InvalidParameter(f"unknown density source {self.density_source!r}")
        if not (0 < self.theta_max <= math.pi and self.rho > 0 and self.horizon_T > 0):
            raise InvalidParameter("theta_max, rho and horizon_T out of range")


def local_density(cfg: PursuitConfig) -> ClosedFormDensity | GriddedDensity:
    """Evasion density in the prey frame (apex at 0, heading +x).

    The single-integrator problem is invariant under rigid motions, so this
    one density serves every step after a rotation and translation.
    """
    canonical = WedgeDomain(Point2(0.0, 0.0), Point2(1.0, 0.0), cfg.theta_max, 1.0)
    cf = make_closed_form(canonical, cfg.rho, cfg.horizon_T)
    if cfg.density_source == "closed_form":
        return cf
    from .solver import density_from_state, solve_wedge

    n_r, n_t = cfg.mesh
    gs, _ = solve_wedge(cf.wedge, SingleIntegrator(cfg.horizon_T), cfg.rho, n_r, n_t)
    return density_from_state(gs, cf.wedge)


def substream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def _advance(density, mean_local, prey, pred, uniforms):
    """One period for a batch. Arrays are (b, 2); uniforms (b, k)."""
    d = prey - pred
    dist = np.hypot(d[:, 0], d[:, 1])
    with np.errstate(invalid="ignore", divide="ignore"):
        hx, hy = d[:, 0] / dist, d[:, 1] / dist
    r, th = density.polar_from_uniforms(uniforms)
    a, c = r * np.cos(th), r * np.sin(th)
    new_prey = np.column_stack([prey[:, 0] + a * hx - c * hy, prey[:, 1] + a * hy + c * hx])
    ma, mc = mean_local
    new_pred = np.column_stack([prey[:, 0] + ma * hx - mc * hy, prey[:, 1] + ma * hy + mc * hx])
    return new_prey, new_pred


def step(prey: Point2, predator: Point2, cfg: PursuitConfig, rng: np.random.Generator,
         density=None) -> tuple[Point2, Point2]:
    """Advance one period from ``(prey, predator)``.

    The prey draws its waypoint from the evasion density on the wedge facing
    away from the predator; the predator moves to that density's mean.
    """
    if (prey - predator).norm() < max(cfg.capture_radius, 1e-12):
        raise CaptureEvent(f"predator reached prey at {prey}")
    density = density if density is not None else local_density(cfg)
    u = rng.random((1, density.n_uniforms))
    p, z = _advance(density, density.local_mean(),
                    np.array([[prey.x, prey.y]]), np.array([[predator.x, predator.y]]), u)
    return Point2(float(p[0, 0]), float(p[0, 1])), Point2(float(z[0, 0]), float(z[0, 1]))


@dataclass(frozen=True)
class PursuitTrace:
    trajectory_id: int
    prey: np.ndarray
    predator: np.ndarray
    distances: np.ndarray
    means: np.ndarray
    seed: int
    captured_at: int | None = None


@dataclass
class PursuitResult:
    """All trajectories of one run, stored as stacked arrays.

    ``prey`` and ``predator`` have shape (n_traj, n_steps + 1, 2). After a
    capture the remaining entries of a trajectory are NaN.
    """

    config: PursuitConfig
    prey: np.ndarray
    predator: np.ndarray
    captured_at: np.ndarray
    local_mean: tuple[float, float]
    fisher_trace: float = field(default=math.nan)

    @property
    def distances(self) -> np.ndarray:
        d = self.prey - self.predator
        return np.hypot(d[..., 0], d[..., 1])

    @property
    def n_captures(self) -> int:
        return int(np.sum(self.captured_at >= 0))

    def __len__(self) -> int:
        return self.prey.shape[0]

    def __getitem__(self, i: int) -> PursuitTrace:
        cap = int(self.captured_at[i])
        return PursuitTrace(i, self.prey[i], self.predator[i], self.distances[i],
                            self.predator[i, 1:], self.config.seed, cap if cap >= 0 else None)

    def __iter__(self):
        return (self[i] for i in range(len(self)))


def _run_block(cfg, density, mean_local, lo, hi):
    n, k = cfg.n_steps, density.n_uniforms
    b = hi - lo
    uni = np.empty((b, n, k))
    for j in range(b):
        uni[j] = substream(cfg.seed, lo + j).random((n, k))
    prey = np.full((b, n + 1, 2), np.nan)
    pred = np.full((b, n + 1, 2), np.nan)
    prey[:, 0] = (cfg.y0.x, cfg.y0.y)
    pred[:, 0] = (cfg.z0.x, cfg.z0.y)
    captured = np.full(b, -1, dtype=np.int64)
    alive = np.ones(b, dtype=bool)
    for s in range(n):
        d = prey[:, s] - pred[:, s]
        caught = alive & (np.hypot(d[:, 0], d[:, 1]) < cfg.capture_radius)
        captured[caught] = s
        alive &= ~caught
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        p, z = _advance(density, mean_local, prey[idx, s], pred[idx, s], uni[idx, s])
        prey[idx, s + 1] = p
        pred[idx, s + 1] = z
    if n:
        d = prey[:, n] - pred[:, n]
        caught = alive & (np.hypot(d[:, 0], d[:, 1]) < cfg.capture_radius)
        captured[caught] = n
    return lo, prey, pred, captured


def run(cfg: PursuitConfig, threads: int = 1, density=None) -> PursuitResult:
    """Simulate ``cfg.n_trajectories`` independent pursuits."""
    density = density if density is not None else local_density(cfg)
    mean_local = density.local_mean()
    n_traj = cfg.n_trajectories
    prey = np.empty((n_traj, cfg.n_steps + 1, 2))
    pred = np.empty_like(prey)
    captured = np.empty(n_traj, dtype=np.int64)
    blocks = [(lo, min(lo + BLOCK, n_traj)) for lo in range(0, n_traj, BLOCK)]

    def work(bounds):
        return _run_block(cfg, density, mean_local, *bounds)

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(work, blocks))
    else:
        parts = [work(b) for b in blocks]
    for lo, p, z, c in parts:
        hi = lo + p.shape[0]
        prey[lo:hi], pred[lo:hi], captured[lo:hi] = p, z, c
    return PursuitResult(cfg, prey, pred, captured, mean_local, float(density.fisher_trace()))


@dataclass(frozen=True)
class StepStats:
    k: int
    mean_sq: float
    stderr: float
    tail_fraction: float
    n: int


def step_statistics(result: PursuitResult, threshold: float | None = None) -> list[StepStats]:
    """Per-step mean squared distance and the fraction at or above ``threshold``.

    ``threshold`` defaults to the Fisher bound ``1 / trace``.
    """
    thr = threshold if threshold is not None else 1.0 / result.fisher_trace
    d2 = result.distances ** 2
    out = []
    for k in range(d2.shape[1]):
        col = d2[:, k]
        col = col[np.isfinite(col)]
        se = float(np.std(col, ddof=1) / math.sqrt(col.size)) if col.size > 1 else 0.0
        out.append(StepStats(k, float(col.mean()), se, float(np.mean(col >= thr)), int(col.size)))
    return out


def pooled_tail_fraction(result: PursuitResult, threshold: float | None = None) -> float:
    """Fraction of (trajectory, step >= 1) pairs with squared distance >= threshold."""
    thr = threshold if threshold is not None else 1.0 / result.fisher_trace
    d2 = result.distances[:, 1:] ** 2
    d2 = d2[np.isfinite(d2)]
    return float(np.mean(d2 >= thr))


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    mass: np.ndarray
    k: int
    squared: bool


def distance_histogram(traces: PursuitResult, k: int, bins: int = 50, squared: bool = False,
                       range: tuple[float, float] | None = None) -> Histogram:
    """Normalised histogram of predator-prey distance at step ``k``."""
    n_steps = traces.prey.shape[1] - 1
    if not 0 <= k <= n_steps:
        raise IndexOutOfRange(f"step {k} outside 0..{n_steps}")
    if bins < 2:
        raise InvalidParameter("need at least 2 bins")
    d = traces.distances[:, k]
    d = d[np.isfinite(d)]
    if squared:
        d = d * d
    counts, edges = np.histogram(d, bins=bins, range=range)
    return Histogram(edges, counts / counts.sum(), k, squared)


def interpolate_path(points: np.ndarray, substeps: int = 10) -> np.ndarray:
    """Straight-line positions between successive waypoints, for plotting."""
    pts = np.asarray(points, dtype=float)
    t = np.linspace(0.0, 1.0, substeps, endpoint=False)
    seg = pts[:-1, None, :] + t[None, :, None] * (pts[1:, None, :] - pts[:-1, None, :])
    return np.concatenate([seg.reshape(-1, 2), pts[-1:]], axis=0)


@dataclass(frozen=True)
class TradeoffRow:
    rho: float
    fisher_trace: float
    expected_energy: float
    objective: float


def tradeoff_sweep(rhos, half_angle: float = math.pi / 4, T: float = 1.0,
                   threads: int = 1) -> list[TradeoffRow]:
    """Fisher trace and expected energy of the optimal density for each weight."""
    rhos = [float(r) for r in rhos]
    if any(not r > 0 for r in rhos):
        raise InvalidParameter("all rho must be positive")
    wedge = WedgeDomain(Point2(0.0, 0.0), Point2(1.0, 0.0), half_angle, 1.0)
    pot = SingleIntegrator(T)

    def one(rho):
        m = metrics(make_closed_form(wedge, rho, T), pot, rho)
        return TradeoffRow(rho, m.fisher_trace, m.expected_energy, m.objective)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(one, rhos))
    return [one(r) for r in rhos]


def initial_wedge(cfg: PursuitConfig) -> WedgeDomain:
    return wedge_from_positions(cfg.y0, cfg.z0, cfg.theta_max)
