"""Analytic optimal evasion density for a single-integrator prey.

In polar coordinates about the prey, with ``omega = pi / (2 theta_max)``
and ``a = sqrt(rho / T)``::

    xi(r, theta) = C * exp(-a r^2 / 2) * r^(2 omega) * cos^2(omega theta)

on the wedge and zero elsewhere. The radial part is a Gamma law in
``s = r^2`` with shape ``omega + 1`` and scale ``2 / a``; the angular
part is independent with density proportional to ``cos^2(omega theta)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import gammainc, gammaincinv, gammainccinv, gammaln

from .errors import InvalidParameter, QuadratureFailure
from .geometry import Point2, WedgeDomain, local_coords, polar_to_xy

TAIL_MASS = 1e-10
QUAD_RTOL = 1e-4
_NEWTON_TOL = 1e-12


def tail_radius(shape: float, scale: float, mass: float = TAIL_MASS) -> float:
    """Smallest radius whose Gamma(shape, scale) tail mass in r^2 is below ``mass``."""
    s = gammainccinv(shape, mass) * scale
    return math.sqrt(s) * (1.0 + 1e-9)


@dataclass(frozen=True)
class ClosedFormDensity:
    wedge: WedgeDomain
    rho: float
    horizon_T: float
    omega: float = field(init=False)
    rate_a: float = field(init=False)
    norm_const: float = field(init=False)

    def __post_init__(self):
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise InvalidParameter(f"rho={self.rho} must be positive")
        if not (self.horizon_T > 0 and math.isfinite(self.horizon_T)):
            raise InvalidParameter(f"T={self.horizon_T} must be positive")
        tm = self.wedge.half_angle
        omega = math.pi / (2.0 * tm)
        a = math.sqrt(self.rho / self.horizon_T)
        log_c = ((omega + 1.0) / 2.0) * math.log(self.rho / self.horizon_T) - (
            math.log(tm) + gammaln(omega + 1.0) + omega * math.log(2.0))
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "rate_a", a)
        object.__setattr__(self, "norm_const", math.exp(log_c))

    # -- parameters of the separated laws --------------------------------
    @property
    def half_angle(self) -> float:
        return self.wedge.half_angle

    @property
    def gamma_shape(self) -> float:
        return self.omega + 1.0

    @property
    def gamma_scale(self) -> float:
        return 2.0 / self.rate_a

    @property
    def r_max(self) -> float:
        return self.wedge.r_max

    @property
    def mu(self) -> float:
        """Lagrange multiplier for which sqrt(xi) solves the stationary equation."""
        return 4.0 * self.rate_a * (self.omega + 1.0)

    def truncated_mass(self) -> float:
        """Radial mass inside ``r_max`` (1 minus the discarded tail)."""
        return float(gammainc(self.gamma_shape, self.r_max**2 / self.gamma_scale))

    # -- evaluation -----------------------------------------------------
    def pdf_polar(self, r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        inside = (np.abs(theta) < self.half_angle) & (r <= self.r_max)
        val = (self.norm_const * np.exp(-0.5 * self.rate_a * r * r)
               * r ** (2.0 * self.omega) * np.cos(self.omega * theta) ** 2)
        return np.where(inside, val, 0.0)

    def pdf_xy(self, xs, ys):
        along, across = local_coords(self.wedge, xs, ys)
        return self.pdf_polar(np.hypot(along, across), np.arctan2(across, along))

    def pdf(self, y1: Point2) -> float:
        return float(self.pdf_xy(y1.x, y1.y))

    def amplitude_polar(self, r, theta):
        """``u = sqrt(xi)``, signed so it is positive inside the wedge."""
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        return (math.sqrt(self.norm_const) * np.exp(-0.25 * self.rate_a * r * r)
                * r**self.omega * np.cos(self.omega * theta))

    def amplitude_gradient_sq(self, r, theta):
        """``|grad u|^2`` in polar form."""
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self._weighted_gradient_sq(r, theta) / r

    def _weighted_gradient_sq(self, r, theta):
        # r * |grad u|^2, which stays finite at the apex for every omega >= 1/2
        w, a = self.omega, self.rate_a
        r = np.asarray(r, dtype=float)
        radial = self.norm_const * np.exp(-0.5 * a * r * r) * r ** (2.0 * w - 1.0)
        d_r = (w - 0.5 * a * r * r) ** 2 * np.cos(w * theta) ** 2
        d_t = w * w * np.sin(w * theta) ** 2
        return radial * (d_r + d_t)

    # -- sampling -------------------------------------------------------
    def angular_cdf(self, theta):
        tm, w = self.half_angle, self.omega
        theta = np.asarray(theta, dtype=float)
        return ((theta + tm) / 2.0 + np.sin(2.0 * w * theta) / (4.0 * w)) / tm

    def angular_quantile(self, q):
        """Inverse of :meth:`angular_cdf` by bracketed Newton with bisection fallback."""
        tm, w = self.half_angle, self.omega
        q = np.asarray(q, dtype=float)
        flat = q.ravel()
        x = (2.0 * flat - 1.0) * tm
        lo = np.full(flat.shape, -tm)
        hi = np.full(flat.shape, tm)
        active = np.arange(flat.size)
        for _ in range(200):
            if active.size == 0:
                break
            xa, qa = x[active], flat[active]
            f = self.angular_cdf(xa) - qa
            la = np.where(f < 0, xa, lo[active])
            ha = np.where(f > 0, xa, hi[active])
            with np.errstate(divide="ignore", invalid="ignore"):
                nx = xa - f * tm / np.cos(w * xa) ** 2
            bad = ~np.isfinite(nx) | (nx <= la) | (nx >= ha)
            nx = np.where(bad, 0.5 * (la + ha), nx)
            x[active], lo[active], hi[active] = nx, la, ha
            keep = (np.abs(nx - xa) > _NEWTON_TOL) & (ha - la > _NEWTON_TOL)
            active = active[keep]
        return x.reshape(q.shape)

    def radial_quantile(self, q):
        """Quantile of r for the Gamma law in r^2, truncated at ``r_max``."""
        q = np.asarray(q, dtype=float) * self.truncated_mass()
        s = gammaincinv(self.gamma_shape, q) * self.gamma_scale
        return np.minimum(np.sqrt(s), self.r_max)

    n_uniforms = 2

    def polar_from_uniforms(self, u):
        """Map an ``(n, 2)`` array of uniforms to local ``(r, theta)`` draws."""
        u = np.asarray(u, dtype=float)
        return self.radial_quantile(u[..., 0]), self.angular_quantile(u[..., 1])

    def sample_polar(self, rng: np.random.Generator, n: int):
        if n < 1:
            raise InvalidParameter("n must be at least 1")
        return self.polar_from_uniforms(rng.random((n, 2)))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """``n`` i.i.d. destinations as an ``(n, 2)`` array of xy coordinates."""
        r, th = self.sample_polar(rng, n)
        x, y = polar_to_xy(self.wedge, r, th)
        return np.column_stack([x, y])

    # -- moments --------------------------------------------------------
    def mean_radius(self) -> float:
        k = self.gamma_shape
        return math.exp(gammaln(k + 0.5) - gammaln(k)) * math.sqrt(self.gamma_scale)

    def mean_cos(self) -> float:
        tm, w = self.half_angle, self.omega
        val, err = integrate.quad(lambda t: math.cos(t) * math.cos(w * t) ** 2, -tm, tm,
                                  epsabs=1e-14, epsrel=1e-12)
        return val / tm

    def local_mean(self) -> tuple[float, float]:
        """Mean offset from the apex as (along heading, across heading)."""
        return self.mean_radius() * self.mean_cos(), 0.0

    def mean(self) -> Point2:
        along, _ = self.local_mean()
        h = self.wedge.heading
        return Point2(self.wedge.apex.x + along * h.x, self.wedge.apex.y + along * h.y)

    # -- functionals ----------------------------------------------------
    def total_mass(self) -> float:
        return polar_quad(lambda r, t: self.pdf_polar(r, t), self.r_max, self.half_angle,
                          rtol=1e-10)

    def fisher_trace(self) -> float:
        """Trace of the Fisher information, as 4 times the Dirichlet energy of sqrt(xi)."""
        return 4.0 * polar_quad(self._weighted_gradient_sq, self.r_max, self.half_angle,
                                weighted=True)

    def expected_energy(self, pot) -> float:
        w = self.wedge

        def integrand(r, t):
            x, y = polar_to_xy(w, r, t)
            return pot.evaluate_xy(x, y) * self.pdf_polar(r, t)

        return polar_quad(integrand, self.r_max, self.half_angle)


def polar_quad(fn, r_max: float, half_angle: float, rtol: float = 1e-10,
               weighted: bool = False) -> float:
    """Adaptive 2-D quadrature of ``fn(r, theta) * r`` over a truncated wedge.

    With ``weighted=True`` the integrand already carries the polar Jacobian.
    Raises QuadratureFailure when the reported error exceeds ``QUAD_RTOL``
    relative to the result.
    """
    jac = (lambda r: 1.0) if weighted else (lambda r: r)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.dblquad(lambda r, t: float(fn(r, t)) * jac(r),
                                         -half_angle, half_angle, 0.0, r_max,
                                         epsabs=1e-13, epsrel=rtol)
        except integrate.IntegrationWarning as exc:
            raise QuadratureFailure(str(exc)) from exc
    if not math.isfinite(val) or err > QUAD_RTOL * max(abs(val), 1e-300):
        raise QuadratureFailure(f"quadrature error {err:.3g} too large for value {val:.6g}")
    return val


def make_closed_form(wedge: WedgeDomain, rho: float, T: float) -> ClosedFormDensity:
    """Closed-form density on ``wedge``, widening ``r_max`` to cover all but 1e-10 of the mass."""
    if not (rho > 0 and T > 0):
        raise InvalidParameter(f"rho={rho} and T={T} must be positive")
    omega = math.pi / (2.0 * wedge.half_angle)
    r_tail = tail_radius(omega + 1.0, 2.0 / math.sqrt(rho / T))
    if wedge.r_max < r_tail:
        wedge = wedge.with_r_max(r_tail)
    return ClosedFormDensity(wedge, rho, T)
