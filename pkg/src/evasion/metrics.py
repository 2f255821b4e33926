"""Fisher-information bound on prediction error, and the evasion objective."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .closed_form import polar_quad
from .errors import LengthMismatch


@dataclass(frozen=True)
class EvasionMetrics:
    fisher_trace: float
    bound: float
    expected_energy: float
    objective: float
    rho: float

    def to_dict(self) -> dict:
        return asdict(self)


def metrics(density, pot, rho: float) -> EvasionMetrics:
    """Fisher trace, prediction-error bound, expected energy and objective.

    ``density`` is any evasion density exposing ``fisher_trace()`` and
    ``expected_energy(pot)``.
    """
    ft = float(density.fisher_trace())
    psi = float(density.expected_energy(pot))
    return EvasionMetrics(ft, 1.0 / ft, psi, ft + rho * psi, rho)


def objective(density, pot, rho: float) -> float:
    return float(density.fisher_trace()) + rho * float(density.expected_energy(pot))


def empirical_mse(estimates, realizations) -> float:
    """Mean squared Euclidean distance between paired (n, 2) arrays."""
    est = np.atleast_2d(np.asarray(estimates, dtype=float))
    real = np.atleast_2d(np.asarray(realizations, dtype=float))
    if est.shape != real.shape or est.shape[0] < 1:
        raise LengthMismatch(f"shapes {est.shape} and {real.shape} differ")
    return float(np.mean(np.sum((est - real) ** 2, axis=-1)))


def mse_with_stderr(estimates, realizations) -> tuple[float, float]:
    est = np.atleast_2d(np.asarray(estimates, dtype=float))
    real = np.atleast_2d(np.asarray(realizations, dtype=float))
    if est.shape != real.shape:
        raise LengthMismatch(f"shapes {est.shape} and {real.shape} differ")
    sq = np.sum((est - real) ** 2, axis=-1)
    se = float(np.std(sq, ddof=1) / math.sqrt(sq.size)) if sq.size > 1 else math.inf
    return float(sq.mean()), se


def fisher_trace_quadrature(pdf_xy, center=(0.0, 0.0), r_max: float = 10.0,
                            grad_xy=None, step: float = 1e-5, half_angle: float = math.pi,
                            heading: float = 0.0) -> float:
    """``integral |grad xi|^2 / xi`` over a sector about ``center``.

    The default sector is the full disc of radius ``r_max``; pass
    ``half_angle``/``heading`` to restrict it to the support of a wedge
    density. Without ``grad_xy`` the gradient comes from central
    differences. Points where xi underflows to zero contribute nothing.
    """
    cx, cy = center

    def grad(x, y):
        if grad_xy is not None:
            return grad_xy(x, y)
        gx = (pdf_xy(x + step, y) - pdf_xy(x - step, y)) / (2 * step)
        gy = (pdf_xy(x, y + step) - pdf_xy(x, y - step)) / (2 * step)
        return gx, gy

    def integrand(r, t):
        x, y = cx + r * math.cos(t + heading), cy + r * math.sin(t + heading)
        p = float(pdf_xy(x, y))
        if p <= 0.0:
            return 0.0
        gx, gy = grad(x, y)
        return (float(gx) ** 2 + float(gy) ** 2) / p

    return polar_quad(integrand, r_max, half_angle, rtol=1e-9)


@dataclass(frozen=True)
class GaussianDensity:
    """Isotropic planar Gaussian, used as a reference with known Fisher trace ``2 / sigma^2``."""

    center: tuple[float, float] = (0.0, 0.0)
    sigma: float = 1.0

    def pdf_xy(self, xs, ys):
        dx = np.asarray(xs, dtype=float) - self.center[0]
        dy = np.asarray(ys, dtype=float) - self.center[1]
        s2 = self.sigma**2
        return np.exp(-(dx * dx + dy * dy) / (2 * s2)) / (2 * math.pi * s2)

    def grad_xy(self, xs, ys):
        p = self.pdf_xy(xs, ys)
        s2 = self.sigma**2
        return -(np.asarray(xs) - self.center[0]) / s2 * p, -(np.asarray(ys) - self.center[1]) / s2 * p

    def fisher_trace(self, r_max: float | None = None, analytic_gradient: bool = True) -> float:
        r_max = r_max if r_max is not None else 12.0 * self.sigma
        return fisher_trace_quadrature(self.pdf_xy, self.center, r_max,
                                       self.grad_xy if analytic_gradient else None)

    def expected_energy(self, pot) -> float:
        def integrand(r, t):
            x, y = self.center[0] + r * math.cos(t), self.center[1] + r * math.sin(t)
            return float(pot.evaluate_xy(x, y) * self.pdf_xy(x, y))

        return polar_quad(integrand, 12.0 * self.sigma, math.pi)

    def mean(self):
        from .geometry import Point2

        return Point2(*self.center)
