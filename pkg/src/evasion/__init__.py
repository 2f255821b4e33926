"""Optimal stochastic evasion densities, their Fisher-information bound,
and a Monte Carlo pursuit simulator."""

__version__ = "0.1.0"

from .closed_form import ClosedFormDensity, make_closed_form
from .errors import (CaptureEvent, CoincidentPositions, EvasionError, IndexOutOfRange,
                     InvalidParameter, LengthMismatch, NoConvergence, NotRadial, OutOfDomain,
                     QuadratureFailure)
from .geometry import (Point2, PolarOffset, WedgeDomain, contains, from_polar, to_polar,
                       wedge_from_positions)
from .gridded import GriddedDensity
from .mesh import WedgeMesh
from .metrics import EvasionMetrics, GaussianDensity, empirical_mse, metrics
from .potential import SingleIntegrator, Tabulated
from .pursuit import PursuitConfig, distance_histogram, run, step, tradeoff_sweep
from .solver import GroundState, assemble, density_from_state, ground_state

__all__ = [
    "CaptureEvent", "ClosedFormDensity", "CoincidentPositions", "EvasionError",
    "EvasionMetrics", "GaussianDensity", "GriddedDensity", "GroundState", "IndexOutOfRange",
    "InvalidParameter", "LengthMismatch", "NoConvergence", "NotRadial", "OutOfDomain",
    "Point2", "PolarOffset", "PursuitConfig", "QuadratureFailure", "SingleIntegrator",
    "Tabulated", "WedgeDomain", "WedgeMesh", "assemble", "contains", "density_from_state",
    "distance_histogram", "empirical_mse", "from_polar", "ground_state", "make_closed_form",
    "metrics", "run", "step", "to_polar", "tradeoff_sweep", "wedge_from_positions",
]
