"""Command-line entry point: ``evasion {density,solve,bound,simulate,tradeoff}``.

Exit codes: 0 ok, 2 usage or invalid parameter, 3 I/O failure,
4 non-convergence (eigensolver or quadrature), 5 internal error.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import export
from .closed_form import make_closed_form, tail_radius
from .errors import (CoincidentPositions, EvasionError, InvalidParameter, NoConvergence,
                     QuadratureFailure)
from .geometry import Point2, wedge_from_positions
from .mesh import WedgeMesh, parse_mesh_spec
from .metrics import metrics
from .potential import SingleIntegrator, load_tabulated_csv

log = logging.getLogger("evasion")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_CONVERGENCE, EXIT_INTERNAL = 0, 2, 3, 4, 5


def _point(text: str) -> Point2:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}") from None
    return Point2(x, y)


def _rmax(text: str):
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("--rmax-policy takes 'auto' or a radius") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theta-max", type=float, default=math.pi / 4,
                        help="wedge half angle in radians (default pi/4)")
    common.add_argument("--rho", type=float, default=1.0, help="energy weight")
    common.add_argument("--horizon", type=float, default=1.0, help="period T")
    common.add_argument("--prey", type=_point, default=Point2(0.0, 0.0), metavar="X,Y")
    common.add_argument("--predator", type=_point, default=Point2(-2.0, 0.0), metavar="X,Y")
    common.add_argument("--mesh", default=None, metavar="NxM",
                        help="radial x angular cells (default depends on command)")
    common.add_argument("--rmax-policy", type=_rmax, default="auto", metavar="{auto|VALUE}")
    common.add_argument("--seed", type=int, default=0, help="overridden by $EVASION_SEED")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", default="out", metavar="DIR")
    common.add_argument("--no-plots", action="store_true", help="skip PNG figures")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="evasion", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("density", parents=[common], help="closed-form density grid and heatmap")
    d.add_argument("--pixels", type=int, default=256)

    s = sub.add_parser("solve", parents=[common], help="finite-difference ground state")
    s.add_argument("--potential", help="CSV of r,theta,value on a cell-centred wedge mesh")
    s.add_argument("--radial", action="store_true", help="declare the tabulated potential radial")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-iter", type=int, default=500)

    b = sub.add_parser("bound", parents=[common], help="Fisher trace, bound and objective")
    b.add_argument("--source", choices=["closed_form", "solver"], default="closed_form")

    m = sub.add_parser("simulate", parents=[common], help="repeated pursuit Monte Carlo")
    m.add_argument("--trajectories", type=int, default=10000)
    m.add_argument("--steps", type=int, default=10)
    m.add_argument("--bins", type=int, default=60)
    m.add_argument("--source", choices=["closed_form", "solver"], default="closed_form")

    t = sub.add_parser("tradeoff", parents=[common], help="Fisher trace vs energy over rho")
    t.add_argument("--rhos", type=_floats, default=[0.25, 0.5, 1.0, 2.0, 4.0])
    return p


def _wedge(args, rho=None):
    rho = args.rho if rho is None else rho
    for name, v in (("rho", rho), ("horizon", args.horizon)):
        if not (math.isfinite(v) and v > 0):
            raise InvalidParameter(f"{name} must be positive, got {v}")
    w = wedge_from_positions(args.prey, args.predator, args.theta_max)
    omega = math.pi / (2 * args.theta_max)
    auto = tail_radius(omega + 1.0, 2.0 / math.sqrt(rho / args.horizon))
    r = auto if args.rmax_policy == "auto" else float(args.rmax_policy)
    return w.with_r_max(r)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _base_config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("verbose",)}


def cmd_density(args) -> int:
    t0 = time.perf_counter()
    d = make_closed_form(_wedge(args), args.rho, args.horizon)
    n_r, n_t = parse_mesh_spec(args.mesh) if args.mesh else (128, 128)
    mesh = WedgeMesh(n_r, n_t, d.r_max, d.half_angle)
    r, th = mesh.grid()
    out = _outdir(args)
    export.write_density_grid(out / "density_grid.csv", r, th, d.pdf_polar(r, th))
    raster, extent = export.cartesian_raster(d, args.pixels, args.pixels)
    export.write_pgm(out / "density.pgm", raster, extent, d.wedge)
    if not args.no_plots:
        from .plotting import plot_density
        plot_density(out / "density.png", raster, extent, d.wedge, args.predator)

    mass = d.total_mass()
    ft = d.fisher_trace()
    er2 = d.gamma_shape * d.gamma_scale
    print(f"mass = {mass:.10f}")
    print(f"fisher_trace = {ft:.6f}")
    print(f"bound = {1 / ft:.4f}")
    print(f"E[r^2] = {er2:.6f}")
    print(f"r_max = {d.r_max:.6f}")
    export.write_manifest(out / "manifest.json", "density", _base_config(args), args.seed,
                          {"mass": mass, "fisher_trace": ft, "bound": 1 / ft, "mean_r2": er2,
                           "norm_const": d.norm_const, "r_max": d.r_max},
                          time.perf_counter() - t0)
    return EXIT_OK


def cmd_solve(args) -> int:
    from .solver import assemble, consistency_residual, density_from_state, ground_state

    t0 = time.perf_counter()
    n_r, n_t = parse_mesh_spec(args.mesh) if args.mesh else (256, 256)
    wedge = _wedge(args)
    compare = args.potential is None
    if compare:
        pot = SingleIntegrator(args.horizon, args.prey)
    else:
        pot = load_tabulated_csv(args.potential, wedge, radial=args.radial)
        wedge = wedge.with_r_max(pot.mesh.r_max)
    mesh = WedgeMesh(n_r, n_t, wedge.r_max, wedge.half_angle)
    op = assemble(mesh, pot, args.rho, wedge)
    gs = ground_state(op, mesh, args.tol, args.max_iter, wedge)
    out = _outdir(args)
    export.write_solution(out / "solution.csv", mesh, gs.u)

    g = density_from_state(gs)
    m = {"mu": gs.mu, "eigenvalue": gs.eigenvalue, "residual_norm": gs.residual_norm,
         "iterations": gs.iterations, "mass": g.total_mass(), "fisher_trace": g.fisher_trace()}
    print(f"mu = {gs.mu:.6f}")
    print(f"residual = {gs.residual_norm:.3e}")
    print(f"iterations = {gs.iterations}")
    print(f"fisher_trace = {m['fisher_trace']:.6f}")
    if compare:
        d = make_closed_form(wedge, args.rho, args.horizon)
        r, th = mesh.grid()
        gap = float(np.max(np.abs(gs.u**2 - d.pdf_polar(r, th))))
        cres = consistency_residual(op, d.amplitude_polar(r, th), d.mu / 4)
        m.update(gap_linf=gap, closed_form_mu=d.mu, closed_form_residual=cres)
        print(f"closed_form_mu = {d.mu:.6f}")
        print(f"gap_linf = {gap:.3e}")
    if not args.no_plots:
        from .plotting import plot_density
        raster, extent = export.cartesian_raster(g, 256, 256)
        plot_density(out / "solution.png", raster, extent, wedge, args.predator)
    export.write_manifest(out / "manifest.json", "solve", _base_config(args), args.seed, m,
                          time.perf_counter() - t0, {"operator": op.stats()})
    return EXIT_OK


def _density_for(args, source):
    d = make_closed_form(_wedge(args), args.rho, args.horizon)
    if source == "closed_form":
        return d
    from .solver import density_from_state, solve_wedge

    n_r, n_t = parse_mesh_spec(args.mesh) if args.mesh else (256, 256)
    gs, _ = solve_wedge(d.wedge, SingleIntegrator(args.horizon, args.prey), args.rho, n_r, n_t)
    return density_from_state(gs)


def cmd_bound(args) -> int:
    t0 = time.perf_counter()
    d = _density_for(args, args.source)
    em = metrics(d, SingleIntegrator(args.horizon, args.prey), args.rho)
    print(f"fisher_trace = {em.fisher_trace:.6f}")
    print(f"bound = {em.bound:.4f}")
    print(f"expected_energy = {em.expected_energy:.6f}")
    print(f"objective = {em.objective:.6f}")
    out = _outdir(args)
    export.write_manifest(out / "manifest.json", "bound", _base_config(args), args.seed,
                          em.to_dict(), time.perf_counter() - t0)
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .pursuit import (PursuitConfig, distance_histogram, pooled_tail_fraction, run,
                          step_statistics)

    t0 = time.perf_counter()
    n_r, n_t = parse_mesh_spec(args.mesh) if args.mesh else (256, 256)
    cfg = PursuitConfig(args.prey, args.predator, args.theta_max, args.rho, args.horizon,
                        args.steps, args.trajectories, args.seed, args.source, (n_r, n_t))
    res = run(cfg, threads=args.threads)
    bound = 1.0 / res.fisher_trace
    stats = step_statistics(res, bound)
    tail = pooled_tail_fraction(res, bound) if args.steps else float("nan")

    out = _outdir(args)
    export.write_traces(out / "traces.csv", res)
    hists = [distance_histogram(res, k, args.bins, squared=sq)
             for sq in (False, True) for k in range(args.steps + 1)]
    export.write_histograms(out / "histograms.csv", hists)
    export.write_table(out / "steps.csv", ["k", "mean_sq_distance", "stderr", "tail_fraction", "n"],
                       [[s.k for s in stats], [s.mean_sq for s in stats], [s.stderr for s in stats],
                        [s.tail_fraction for s in stats], [s.n for s in stats]],
                       int_columns=(0, 4))
    if not args.no_plots:
        from . import plotting
        plotting.plot_trajectory(out / "trajectory.png", res.prey[0], res.predator[0])
        plotting.plot_distance(out / "distance.png", res.distances[0], bound)
        plotting.plot_histograms(out / "distance_density.png",
                                 [h for h in hists if not h.squared and h.k > 0], bound)

    min_margin = min(((s.mean_sq - (bound - 3 * s.stderr)) for s in stats[1:]), default=math.nan)
    print(f"fisher_trace = {res.fisher_trace:.6f}")
    print(f"bound = {bound:.4f}")
    print(f"tail_fraction = {tail:.4f}")
    print(f"captures = {res.n_captures}")
    for s in stats:
        print(f"step {s.k}: mean_sq = {s.mean_sq:.4f} +- {s.stderr:.4f}, tail = {s.tail_fraction:.4f}")
    export.write_manifest(out / "manifest.json", "simulate", _base_config(args), args.seed,
                          {"fisher_trace": res.fisher_trace, "bound": bound, "tail_fraction": tail,
                           "captures": res.n_captures, "min_bound_margin": min_margin,
                           "predictor_offset": list(res.local_mean)},
                          time.perf_counter() - t0)
    return EXIT_OK


def cmd_tradeoff(args) -> int:
    from .pursuit import tradeoff_sweep

    t0 = time.perf_counter()
    rows = tradeoff_sweep(args.rhos, args.theta_max, args.horizon, threads=args.threads)
    out = _outdir(args)
    export.write_table(out / "tradeoff.csv", ["rho", "fisher_trace", "expected_energy", "objective"],
                       [[r.rho for r in rows], [r.fisher_trace for r in rows],
                        [r.expected_energy for r in rows], [r.objective for r in rows]])
    if not args.no_plots:
        from .plotting import plot_tradeoff
        plot_tradeoff(out / "tradeoff.png", rows)
    for r in rows:
        print(f"rho = {r.rho:g}: fisher_trace = {r.fisher_trace:.6f}, "
              f"expected_energy = {r.expected_energy:.6f}")
    export.write_manifest(out / "manifest.json", "tradeoff", _base_config(args), args.seed,
                          {"rows": [vars(r) for r in rows]}, time.perf_counter() - t0)
    return EXIT_OK


COMMANDS = {"density": cmd_density, "solve": cmd_solve, "bound": cmd_bound,
            "simulate": cmd_simulate, "tradeoff": cmd_tradeoff}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    env_seed = os.environ.get("EVASION_SEED")
    if env_seed is not None:
        try:
            args.seed = int(env_seed)
        except ValueError:
            print(f"error: EVASION_SEED={env_seed!r} is not an integer", file=sys.stderr)
            return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (InvalidParameter, CoincidentPositions) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoConvergence, QuadratureFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except EvasionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
