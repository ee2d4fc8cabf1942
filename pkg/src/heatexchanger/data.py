"""Field containers and the initial-data families used throughout.

Two families are provided: Gaussian bumps, whose L¹ norms and Fourier L¹
norms are known in closed form, and the shaped indicator data
``(η 1_B(0,R), (μ/2ν) η 1_B(0,R))`` used by the blow-up construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, ParameterError
from .spectral import ExchangerParams, SpectralGrid

__all__ = ["FieldPair", "GaussianDataSpec", "ShapedDataSpec", "field_stats"]


@dataclass(frozen=True, eq=False)
class FieldPair:
    """Samples of ``(u, v)`` on a grid."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if u.shape != v.shape:
            raise GridMismatch(f"u and v shapes differ: {u.shape} vs {v.shape}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def __add__(self, other):
        return FieldPair(self.u + other.u, self.v + other.v)

    def scaled(self, factor):
        return FieldPair(factor * self.u, factor * self.v)

    @property
    def sup(self):
        return max(float(np.max(np.abs(self.u))), float(np.max(np.abs(self.v))))


def field_stats(fields: FieldPair, grid: SpectralGrid):
    """``(sup_u, sup_v, mass_u, mass_v)`` of a field pair."""
    return (float(np.max(np.abs(fields.u))), float(np.max(np.abs(fields.v))),
            grid.integrate(fields.u), grid.integrate(fields.v))


@dataclass(frozen=True)
class GaussianDataSpec:
    """``u0 = amp_u exp(-|x|²/(2 width_u²))`` and likewise for ``v0``."""

    amp_u: float
    amp_v: float
    width_u: float = 1.0
    width_v: float = 1.0

    def __post_init__(self):
        for name in ("amp_u", "amp_v"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be non-negative")
        for name in ("width_u", "width_v"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive")

    def scaled(self, factor):
        return GaussianDataSpec(factor * self.amp_u, factor * self.amp_v,
                                self.width_u, self.width_v)

    def fields(self, grid: SpectralGrid) -> FieldPair:
        r2 = grid.radius2
        return FieldPair(self.amp_u * np.exp(-r2 / (2 * self.width_u ** 2)),
                         self.amp_v * np.exp(-r2 / (2 * self.width_v ** 2)))

    def norms(self, dim):
        """``(‖u0‖₁, ‖v0‖₁, ‖û0‖₁, ‖v̂0‖₁)`` in closed form.

        With ``f̂(ξ) = ∫ f e^{-iξx}`` a bump ``a e^{-|x|²/2w²}`` has
        ``‖f‖₁ = a (2πw²)^{N/2}`` and ``‖f̂‖₁ = a (2π)^N``.
        """
        def l1(a, w):
            return a * (2 * np.pi * w ** 2) ** (dim / 2)

        def l1_hat(a):
            return a * (2 * np.pi) ** dim

        return (l1(self.amp_u, self.width_u), l1(self.amp_v, self.width_v),
                l1_hat(self.amp_u), l1_hat(self.amp_v))


@dataclass(frozen=True)
class ShapedDataSpec:
    """Indicator data ``(η 1_B(0,R), (μ/2ν) η 1_B(0,R))``."""

    eta: float
    radius: float

    def __post_init__(self):
        if self.eta < 0:
            raise ParameterError("eta must be non-negative")
        if self.radius <= 0:
            raise ParameterError("radius must be positive")

    def scaled(self, factor):
        return ShapedDataSpec(factor * self.eta, self.radius)

    def fields(self, grid: SpectralGrid, params: ExchangerParams) -> FieldPair:
        ball = (grid.radius2 < self.radius ** 2).astype(float)
        u0 = self.eta * ball
        return FieldPair(u0, params.mu / (2 * params.nu) * u0)
