"""Phase-plane machinery behind subcritical blow-up.

Blurring a solution with the unit-mass Gaussian ``Φε = (ε/π)^{N/2} e^{-ε|x|²}``
and evaluating at the origin gives functionals ``(𝒰, 𝒱)`` that dominate
the comparison system

    U' = -(μ + cλ) U + ν V + U^(1+p)
    V' =  μ U - (ν + dλ) V,            λ = 2Nε.

For small λ the open region Ω (above ``V = 0``, below the isocline
``V' = 0`` and right of the segment ``[E0 E1]``) is forward invariant and
every trajectory started in it blows up.  This module builds that
geometry, checks it numerically, searches for a blur parameter placing the
blurred shaped data inside Ω, and integrates the comparison system.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .data import ShapedDataSpec
from .errors import GeometryDegenerate, ParameterError, RegimeViolation, SearchFailed
from .spectral import ExchangerParams, SpectralGrid

__all__ = [
    "BlurSpec",
    "PhaseGeometry",
    "OdeOutcome",
    "OdeResult",
    "LambdaSearch",
    "blur_lambda",
    "ball_gaussian_mass",
    "blurred_data",
    "blurred_functionals",
    "geometry",
    "vector_field",
    "det_M_alpha",
    "det_M_alpha_derivative",
    "omega_contains",
    "boundary_inward_check",
    "find_lambda",
    "integrate_ode",
    "omega_polygon",
    "isocline_polylines",
]

ODE_BLOWUP = 1e8
ORIGIN_BALL = 1e-6
INWARD_TOLERANCE = 1e-10
SCAN_FLOOR = 1e-12


def blur_lambda(epsilon, dim):
    """``λ = 2Nε``, the constant with ``ΔΦε >= -λ Φε``."""
    return 2.0 * dim * epsilon


@dataclass(frozen=True)
class BlurSpec:
    epsilon: float
    dim: int
    amplitude_eta: float = 1.0
    radius_R: float = 1.0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ParameterError("epsilon must be positive")
        if self.dim not in (1, 2):
            raise ParameterError("dimension must be 1 or 2")

    @property
    def lam(self):
        return blur_lambda(self.epsilon, self.dim)


@dataclass(frozen=True)
class PhaseGeometry:
    """Equilibria, isoclines and the Ω boundary line for one ``λ``."""

    chi: float
    E0: tuple
    E1: tuple
    lam: float
    p: float
    params: ExchangerParams

    @property
    def isocline_slope(self):
        """Slope of ``{V' = 0}``: ``μ/(ν + dλ)``."""
        return self.params.mu / (self.params.nu + self.params.d * self.lam)

    def isocline_U(self, U):
        """``{U' = 0}``: ``V = U(μ + cλ - U^p)/ν``."""
        mu, nu, c = self.params.mu, self.params.nu, self.params.c
        U = np.asarray(U, dtype=float)
        return U * (mu + c * self.lam - U ** self.p) / nu

    def isocline_V(self, U):
        return self.isocline_slope * np.asarray(U, dtype=float)

    @property
    def degenerate(self):
        return not self.chi < self.E0[0]

    def boundary_line(self, U):
        """Line through ``E0`` and ``E1``."""
        x0 = self.E0[0]
        return self.isocline_slope * self.chi / (self.chi - x0) * (np.asarray(U, dtype=float) - x0)


def geometry(lam, params: ExchangerParams, p) -> PhaseGeometry:
    """``χ = (μ + cλ - μν/(ν + dλ))^{1/p}``, ``E0 = (μ^{1/p}, 0)``, ``E1 = (χ, μχ/(ν+dλ))``."""
    if lam < 0:
        raise ParameterError("lambda must be non-negative")
    mu, nu, c, d = params.mu, params.nu, params.c, params.d
    # μ + cλ - μν/(ν+dλ) = cλ + μdλ/(ν+dλ), written without cancellation
    chi = (c * lam + mu * d * lam / (nu + d * lam)) ** (1.0 / p)
    slope = mu / (nu + d * lam)
    return PhaseGeometry(chi=chi, E0=(mu ** (1.0 / p), 0.0), E1=(chi, slope * chi),
                         lam=float(lam), p=float(p), params=params)


def _valid_geometry(lam, params, p):
    geo = geometry(lam, params, p)
    if geo.degenerate:
        raise GeometryDegenerate(
            f"chi = {geo.chi:.6g} >= mu^(1/p) = {geo.E0[0]:.6g}; lambda = {lam:g} is too large")
    return geo


def ball_gaussian_mass(epsilon, radius, dim):
    """``(ε/π)^{N/2} ∫_{B(0,R)} e^{-ε|z|²} dz``: the Φε-mass of the ball."""
    if dim == 1:
        return float(erf(radius * math.sqrt(epsilon)))
    if dim == 2:
        return float(-math.expm1(-epsilon * radius ** 2))
    raise ParameterError("dimension must be 1 or 2")


def blurred_data(blur: BlurSpec, params: ExchangerParams):
    """``(U0, V0)``: shaped data blurred by ``Φε`` at the origin."""
    U0 = blur.amplitude_eta * ball_gaussian_mass(blur.epsilon, blur.radius_R, blur.dim)
    return U0, params.mu / (2 * params.nu) * U0


def blurred_functionals(fields, grid: SpectralGrid, epsilon):
    """Grid quadrature of ``∫ Φε u`` and ``∫ Φε v`` centred at the origin."""
    kernel = (epsilon / math.pi) ** (grid.dim / 2) * np.exp(-epsilon * grid.radius2)
    return grid.integrate(kernel * fields.u), grid.integrate(kernel * fields.v)


def vector_field(U, V, lam, params: ExchangerParams, p):
    """``(P, Q)`` of the comparison system."""
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    P = -(params.mu + params.c * lam) * U + params.nu * V + np.maximum(U, 0.0) ** (1.0 + p)
    Q = params.mu * U - (params.nu + params.d * lam) * V
    return P, Q


def det_M_alpha(alpha, lam, params: ExchangerParams, p):
    """``det[γ_α, E0E1]`` with ``γ_α`` the field at ``E_α = E0 + α(E1 - E0)``.

    Non-negative values mean the field on ``[E0 E1]`` points into Ω.
    """
    geo = _valid_geometry(lam, params, p)
    alpha = np.asarray(alpha, dtype=float)
    (x0, _), (x1, y1) = geo.E0, geo.E1
    U = x0 + alpha * (x1 - x0)
    V = alpha * y1
    P, Q = vector_field(U, V, lam, params, p)
    return P * y1 - Q * (x1 - x0)


def det_M_alpha_derivative(alpha, lam, params: ExchangerParams, p):
    """``∂α det(M_α)``, differentiated by hand from :func:`det_M_alpha`."""
    geo = _valid_geometry(lam, params, p)
    mu, nu, c, d = params.mu, params.nu, params.c, params.d
    alpha = np.asarray(alpha, dtype=float)
    (x0, _), (x1, y1) = geo.E0, geo.E1
    dU = x1 - x0
    U = x0 + alpha * dU
    dP = (-(mu + c * lam) + (1.0 + p) * U ** p) * dU + nu * y1
    dQ = mu * dU - (nu + d * lam) * y1
    return dP * y1 - dQ * dU


def omega_contains(U, V, lam, params: ExchangerParams, p):
    """Strict membership in the open region Ω."""
    geo = _valid_geometry(lam, params, p)
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    inside = (V > 0) & (V < geo.isocline_V(U)) & (V > geo.boundary_line(U))
    return bool(inside) if inside.ndim == 0 else inside


def boundary_inward_check(lam, params: ExchangerParams, p, samples=201, u_span=10.0):
    """Worst outward component of the field along ∂Ω = Γ1 ∪ Γ2 ∪ Γ3.

    Γ1 = {U > μ^{1/p}, V = 0} needs ``Q > 0``; Γ2 = {U > χ, V' = 0} needs
    ``P > 0``; Γ3 = [E0 E1] needs ``det(M_α) >= 0``.  Returns the largest of
    ``-Q``, ``-P`` and ``-det`` over the samples (non-positive when the
    field points inwards everywhere).  The unbounded pieces are sampled on
    ``U`` up to ``u_span`` times ``μ^{1/p}``.
    """
    geo = _valid_geometry(lam, params, p)
    x0 = geo.E0[0]
    frac = np.linspace(0.0, 1.0, samples)[1:]
    u1 = x0 * (1.0 + (u_span - 1.0) * frac)
    _, Q1 = vector_field(u1, np.zeros_like(u1), lam, params, p)
    u2 = geo.chi + (u_span * x0 - geo.chi) * frac
    P2, _ = vector_field(u2, geo.isocline_V(u2), lam, params, p)
    det3 = det_M_alpha(np.linspace(0.0, 1.0, samples), lam, params, p)
    return float(max(np.max(-Q1), np.max(-P2), np.max(-det3)))


@dataclass(frozen=True)
class LambdaSearch:
    epsilon: float
    lam: float
    U0: float
    V0: float
    tried: int


def find_lambda(data: ShapedDataSpec, params: ExchangerParams, p, dim, start=1.0,
                floor=SCAN_FLOOR) -> LambdaSearch:
    """Halve ``ε`` from ``start`` until the blurred data lies in a valid Ω.

    At each candidate the geometry must be non-degenerate, the field must
    point into Ω along its boundary (:func:`boundary_inward_check` at most
    ``1e-10``) and ``(U0, V0)`` must lie in Ω.  The first passing ``ε`` is
    returned.
    """
    if dim * p >= 2:
        raise RegimeViolation(f"the blur search needs p < 2/N, got p = {p:g}, N = {dim}")
    epsilon, tried = float(start), 0
    while epsilon >= floor:
        tried += 1
        lam = blur_lambda(epsilon, dim)
        if not geometry(lam, params, p).degenerate:
            U0, V0 = blurred_data(BlurSpec(epsilon, dim, data.eta, data.radius), params)
            if (omega_contains(U0, V0, lam, params, p)
                    and boundary_inward_check(lam, params, p) <= INWARD_TOLERANCE):
                return LambdaSearch(epsilon=epsilon, lam=lam, U0=U0, V0=V0, tried=tried)
        epsilon *= 0.5
    raise SearchFailed(f"no admissible epsilon above {floor:g} after {tried} candidates")


class OdeOutcome(str, enum.Enum):
    BLOW_UP = "BlowUp"
    CONVERGES_TO_ORIGIN = "ConvergesToOrigin"
    INCONCLUSIVE = "Inconclusive"


@dataclass(eq=False)
class OdeResult:
    outcome: OdeOutcome
    t: np.ndarray
    U: np.ndarray
    V: np.ndarray
    t_star: float | None = None


def _rk4(U, V, h, lam, params, p):
    def f(x, y):
        return vector_field(x, y, lam, params, p)

    k1 = f(U, V)
    k2 = f(U + 0.5 * h * k1[0], V + 0.5 * h * k1[1])
    k3 = f(U + 0.5 * h * k2[0], V + 0.5 * h * k2[1])
    k4 = f(U + h * k3[0], V + h * k3[1])
    return (U + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            V + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]))


def integrate_ode(U0, V0, lam, params: ExchangerParams, p, t_max=100.0, dt_max=0.01,
                  dt_min=1e-300, blowup_level=ODE_BLOWUP) -> OdeResult:
    """Integrate the comparison system with RK4 and growth-limited steps.

    A step is rejected and halved when ``|(U, V)|`` grows by more than 10%;
    the step recovers towards ``dt_max`` afterwards.  Stops with ``BlowUp``
    once ``U >= blowup_level``, ``ConvergesToOrigin`` inside the ``1e-6``
    ball, ``Inconclusive`` at ``t_max`` or if the step collapses below
    ``dt_min``.  Each accepted step grows ``U`` by at most 10%, so the
    threshold is reached in a bounded number of steps even when the
    steps near the singularity are far below the resolution of ``t``;
    ``dt_min`` therefore only guards against underflow.
    """
    if U0 < 0 or V0 < 0:
        raise ParameterError("initial values must be non-negative")
    t, U, V, h = 0.0, float(U0), float(V0), float(dt_max)
    ts, Us, Vs = [t], [U], [V]
    outcome, t_star = OdeOutcome.INCONCLUSIVE, None
    while True:
        if math.hypot(U, V) <= ORIGIN_BALL:
            outcome = OdeOutcome.CONVERGES_TO_ORIGIN
            break
        if U >= blowup_level:
            outcome, t_star = OdeOutcome.BLOW_UP, t
            break
        if t >= t_max:
            break
        step = min(h, t_max - t)
        with np.errstate(over="ignore", invalid="ignore"):
            U1, V1 = _rk4(U, V, step, lam, params, p)
        size = math.hypot(U, V)
        if not (np.isfinite(U1) and np.isfinite(V1)) or math.hypot(U1, V1) > 1.1 * size:
            h = 0.5 * step
            if h < dt_min:
                break
            continue
        t, U, V = t + step, float(U1), float(V1)
        ts.append(t)
        Us.append(U)
        Vs.append(V)
        h = min(2.0 * h, dt_max) if math.hypot(U, V) < 1.01 * size else h
    return OdeResult(outcome, np.array(ts), np.array(Us), np.array(Vs), t_star)


def omega_polygon(lam, params: ExchangerParams, p, u_span=10.0):
    """Closed polygon ``E0 → E1 → (far point on {V'=0}) → (far point on V=0)``."""
    geo = _valid_geometry(lam, params, p)
    far = u_span * geo.E0[0]
    return [geo.E0, geo.E1, (far, float(geo.isocline_V(far))), (far, 0.0), geo.E0]


def isocline_polylines(lam, params: ExchangerParams, p, u_span=2.0, samples=256):
    """Sampled ``{U'=0}`` and ``{V'=0}`` curves as ``(U, V)`` arrays."""
    geo = geometry(lam, params, p)
    U = np.linspace(0.0, u_span * geo.E0[0], samples)
    return {"U_nullcline": (U, geo.isocline_U(U)), "V_nullcline": (U, geo.isocline_V(U))}
