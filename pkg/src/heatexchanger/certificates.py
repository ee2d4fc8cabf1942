"""Explicit constants and super-solution envelopes for the linear and
semilinear Heat exchanger.

Linear side: ``k, k'`` bound the evanescent part,
``‖u_e(t)‖∞ <= k (‖u0‖₁ + ‖v0‖₁) e^{-t(√μ+√ν)²/2}`` for ``t > 1``, and
``ℓ, ℓ'`` bound the full solution,
``‖u(t)‖∞ <= ℓ m / (1+t)^{N/2}`` with the mass functional
``m = ‖u0‖₁ + ‖v0‖₁ + ‖û0‖₁ + ‖v̂0‖₁``.

Semilinear side: in the supercritical regime the product of an envelope
``F(t)`` with the linear solution is a global super-solution provided
``m < m0``; ``M, M'`` are the resulting decay constants.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import GaussianDataSpec, ShapedDataSpec
from .errors import CertificateUnavailable, ParameterError, RegimeViolation, UnsupportedDataFamily
from .spectral import ExchangerParams, ReactionParams, SpectralGrid, symbols_from_k2

__all__ = [
    "ALL_FREQUENCIES",
    "ConstantsBundle",
    "MassFunctional",
    "decay_constants",
    "tail_fold",
    "mass_functional",
    "m_zero",
    "envelope_F",
    "envelope_sup",
    "global_bounds",
    "phase_diagram",
]

#: value of ``a`` when the low-frequency inequality never fails on the scan
ALL_FREQUENCIES = math.inf
SCAN_POINTS = 10_000
DEFAULT_SCAN_RADIUS = SpectralGrid().nyquist_radius


@dataclass(frozen=True)
class ConstantsBundle:
    k: float
    k_prime: float
    a: float
    eta_gap: float
    ell: float
    ell_prime: float


@dataclass(frozen=True)
class MassFunctional:
    m: float
    parts: tuple


def tail_fold(beta, dim):
    """``sup_{t>=1} t^{N/2} e^{-βt}``, so that ``e^{-βt} <= C / t^{N/2}`` on ``t >= 1``."""
    t_star = dim / (2.0 * beta)
    if t_star >= 1.0:
        return t_star ** (dim / 2.0) * math.exp(-dim / 2.0)
    return math.exp(-beta)


def _low_frequency_radius(params: ExchangerParams, max_radius):
    """First scan radius before ``L(ξ) <= -(cν+dμ)/(2(μ+ν)) |ξ|²`` fails."""
    c, d, mu, nu = params.c, params.d, params.mu, params.nu
    slope = (c * nu + d * mu) / (2.0 * (mu + nu))
    radii = np.linspace(max_radius / SCAN_POINTS, max_radius, SCAN_POINTS)
    L = symbols_from_k2(radii ** 2, params).L
    failed = np.flatnonzero(L > -slope * radii ** 2)
    if failed.size == 0:
        return ALL_FREQUENCIES
    if failed[0] == 0:
        return _low_frequency_radius(params, radii[0])
    return float(radii[failed[0] - 1])


def decay_constants(params: ExchangerParams, dim, max_radius=None) -> ConstantsBundle:
    """Compute ``k, k'``, the frequency split ``a, η`` and ``ℓ, ℓ'``.

    Parameters
    ----------
    params : ExchangerParams
    dim : int
        Space dimension ``N``.
    max_radius : float, optional
        Upper end of the radial scan for ``a``; defaults to the Nyquist
        radius of the default grid.

    Notes
    -----
    For ``t > 1`` the evanescent part is bounded by ``k C_β m / t^{N/2}``
    and the persistent part, split at ``|ξ| = a``, by
    ``(2π)^{-N} max(1, √(ν/4μ)) max((2π(μ+ν)/(cν+dμ))^{N/2}, C_η) m / t^{N/2}``,
    where ``C_β`` folds an exponential tail into ``t^{-N/2}``
    (:func:`tail_fold`).  The sum ``ℓ̃`` is joined with the ``t <= 1`` bound
    ``(2π)^{-N} m`` through ``ℓ = 2^{N/2} max((2π)^{-N}, ℓ̃)``.
    """
    if dim < 1:
        raise ParameterError("dimension must be at least 1")
    c, d, mu, nu = params.c, params.d, params.mu, params.nu
    if max_radius is None:
        max_radius = DEFAULT_SCAN_RADIUS
    half_n = dim / 2.0
    weight_u = max(1.0, math.sqrt(nu / (4 * mu)))
    weight_v = max(1.0, math.sqrt(mu / (4 * nu)))
    k = weight_u / (2 * math.pi * (c + d)) ** half_n
    k_prime = weight_v / (2 * math.pi * (c + d)) ** half_n

    a = _low_frequency_radius(params, max_radius)
    edge = max_radius if a == ALL_FREQUENCIES else a
    eta_gap = float(-symbols_from_k2(np.array([edge ** 2]), params).L[0])

    beta = (math.sqrt(mu) + math.sqrt(nu)) ** 2 / 2
    fold_beta = tail_fold(beta, dim)
    low = (2 * math.pi * (mu + nu) / (c * nu + d * mu)) ** half_n
    persistent = (2 * math.pi) ** -dim * max(low, tail_fold(eta_gap, dim))
    floor = (2 * math.pi) ** -dim
    ell = 2 ** half_n * max(floor, k * fold_beta + weight_u * persistent)
    ell_prime = 2 ** half_n * max(floor, k_prime * fold_beta + weight_v * persistent)
    return ConstantsBundle(k=k, k_prime=k_prime, a=a, eta_gap=eta_gap,
                           ell=ell, ell_prime=ell_prime)


def mass_functional(data_spec, dim) -> MassFunctional:
    """``m = ‖u0‖₁ + ‖v0‖₁ + ‖û0‖₁ + ‖v̂0‖₁`` for Gaussian data."""
    if not isinstance(data_spec, GaussianDataSpec):
        raise UnsupportedDataFamily(
            f"closed-form norms need Gaussian data, got {type(data_spec).__name__}")
    parts = tuple(float(x) for x in data_spec.norms(dim))
    return MassFunctional(m=sum(parts), parts=parts)


def _exponents(reaction: ReactionParams, dim):
    """``(min, max)`` exponents entering ``G``; checks the supercritical regime."""
    if reaction.kappa == 0:
        if dim * reaction.p <= 2:
            raise RegimeViolation(f"need N p > 2 for the certificate, got N p = {dim * reaction.p:g}")
        return reaction.p, reaction.p
    lo, hi = min(reaction.p, reaction.q), max(reaction.p, reaction.q)
    if dim * lo <= 2:
        raise RegimeViolation(f"need N min(p, q) > 2 for the certificate, got {dim * lo:g}")
    return lo, hi


def _coefficient(reaction, constants):
    """``ℓ^p`` for κ=0, ``max(ℓ^p, ℓ'^q)`` for κ=1."""
    if reaction.kappa == 0:
        return constants.ell ** reaction.p
    return max(constants.ell ** reaction.p, constants.ell_prime ** reaction.q)


def m_zero(reaction: ReactionParams, constants: ConstantsBundle, dim):
    """Smallness threshold on ``m`` for the global-existence certificate."""
    lo, hi = _exponents(reaction, dim)
    base = (dim * lo - 2) / (2 * hi * _coefficient(reaction, constants))
    if reaction.kappa == 0:
        return base ** (1 / lo)
    return min(1.0, base ** (1 / lo))


def _g_drop(m, reaction, constants, dim):
    """``1 - inf G``: the full drop of ``G`` between ``t = 0`` and ``t = ∞``."""
    lo, hi = _exponents(reaction, dim)
    if m < 0:
        raise ParameterError("m must be non-negative")
    if m >= m_zero(reaction, constants, dim):
        raise CertificateUnavailable(f"m = {m:g} is not below m0")
    return 2 * hi * _coefficient(reaction, constants) * m ** lo / (dim * lo - 2)


def envelope_F(t, m, reaction: ReactionParams, constants: ConstantsBundle, dim):
    """Envelope ``F(t) = G(t)^{-1/p}`` (``G1`` and ``max(p,q)`` for κ=1)."""
    lo, hi = _exponents(reaction, dim)
    drop = _g_drop(m, reaction, constants, dim)
    t = np.asarray(t, dtype=float)
    G = 1.0 - drop * (1.0 - (1.0 + t) ** -(dim * lo / 2 - 1))
    return G ** (-1.0 / hi)


def envelope_sup(m, reaction: ReactionParams, constants: ConstantsBundle, dim):
    """``sup_t F = (inf G)^{-1/p}``."""
    _, hi = _exponents(reaction, dim)
    return (1.0 - _g_drop(m, reaction, constants, dim)) ** (-1.0 / hi)


def global_bounds(m, reaction: ReactionParams, constants: ConstantsBundle, dim):
    """Constants ``(M, M')`` with ``‖u(t)‖∞ <= M/(1+t)^{N/2}``, ``‖v(t)‖∞ <= M'/(1+t)^{N/2}``."""
    _, hi = _exponents(reaction, dim)
    drop = _g_drop(m, reaction, constants, dim)
    # ((Np-2)(ℓm)^p / (Np-2 - 2p(ℓm)^p))^{1/p} = ℓm (1 - drop)^{-1/p}; the
    # factored form does not underflow for tiny m
    growth = (1.0 - drop) ** (-1.0 / hi)
    return constants.ell * m * growth, constants.ell_prime * m * growth


def _cell_record(p, amplitude, make_config, data_spec, exchanger, kappa, q, dim, simulate):
    reaction = ReactionParams(p=p, q=q if q is not None else p, kappa=kappa)
    scaled = data_spec.scaled(amplitude)
    record = {"p": float(p), "amplitude": float(amplitude), "m": None, "m0": None}
    if isinstance(scaled, GaussianDataSpec):
        record["m"] = mass_functional(scaled, dim).m
    try:
        record["m0"] = m_zero(reaction, decay_constants(exchanger, dim), dim)
    except RegimeViolation:
        pass
    trace = simulate(make_config(reaction, scaled))
    record["outcome"] = trace.outcome.value
    record["t_star"] = trace.t_star
    return record


def phase_diagram(p_values, amplitudes, grid: SpectralGrid, exchanger: ExchangerParams,
                  data_spec, kappa=0, q=None, t_end=50.0, dt_init=0.05,
                  decay_margin=0.5, threads=1):
    """Classify every ``(p, amplitude)`` cell with :func:`simulate`.

    Records come back in row-major order of ``p_values`` then
    ``amplitudes`` regardless of ``threads``.  Each record holds ``p``,
    ``amplitude``, ``m`` (Gaussian data only), ``m0`` (supercritical cells
    only), ``outcome`` and ``t_star``.
    """
    from .semilinear import SimulationConfig, simulate

    if not isinstance(data_spec, (GaussianDataSpec, ShapedDataSpec)):
        raise UnsupportedDataFamily(f"unsupported data family {type(data_spec).__name__}")

    def make_config(reaction, spec):
        if isinstance(spec, ShapedDataSpec):
            fields = spec.fields(grid, exchanger)
        else:
            fields = spec.fields(grid)
        return SimulationConfig(grid=grid, exchanger=exchanger, reaction=reaction,
                                data0=fields, t_end=t_end, dt_init=dt_init,
                                decay_margin=decay_margin)

    cells = [(p, a) for p in p_values for a in amplitudes]

    def run(cell):
        return _cell_record(cell[0], cell[1], make_config, data_spec, exchanger,
                            kappa, q, grid.dim, simulate)

    if threads > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, cells))
    return [run(cell) for cell in cells]
