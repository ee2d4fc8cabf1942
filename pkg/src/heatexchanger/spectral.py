"""Fourier-side algebra of the linear Heat exchanger.

Applying the Fourier transform to the linear system

    u_t = c Δu - μ u + ν v
    v_t = d Δv + μ u - ν v

gives, mode by mode, the 2x2 ODE  w' = A(ξ) w  with

    A(ξ) = [[-c|ξ|² - μ,        ν      ],
            [      μ,     -d|ξ|² - ν   ]].

Everything here is an explicit closed form of the spectral decomposition of
A(ξ): the radial functions ``r`` and ``s``, the eigenvalues ``λ±``, the
propagator ``exp(tA)`` and the two spectral projectors.  The larger
eigenvalue ``λ+`` is the symbol ``L`` of the dispersal operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GridMismatch, ParameterError

__all__ = [
    "ExchangerParams",
    "ReactionParams",
    "SpectralGrid",
    "SymbolTable",
    "SpectrumPair",
    "build_symbols",
    "symbols_from_k2",
    "dispersal_asymptotics",
    "propagator",
    "propagator_entries",
    "split_projectors",
    "persistent_data",
    "evanescent_data",
    "apply_dispersal",
    "system_matrix",
]


def _positive(name, value):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ParameterError(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class ExchangerParams:
    """Diffusion rates ``c``, ``d`` and exchange rates ``mu``, ``nu``."""

    c: float = 1.0
    d: float = 1.0
    mu: float = 1.0
    nu: float = 1.0

    def __post_init__(self):
        for name in ("c", "d", "mu", "nu"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))


@dataclass(frozen=True)
class ReactionParams:
    """Reaction exponents ``p``, ``q`` and the switch ``kappa`` on ``v^(1+q)``."""

    p: float = 1.0
    q: float = 1.0
    kappa: int = 0

    def __post_init__(self):
        object.__setattr__(self, "p", _positive("p", self.p))
        object.__setattr__(self, "q", _positive("q", self.q))
        if self.kappa not in (0, 1):
            raise ParameterError(f"kappa must be 0 or 1, got {self.kappa!r}")
        object.__setattr__(self, "kappa", int(self.kappa))


@dataclass(frozen=True)
class SpectralGrid:
    """Periodic box ``[-half_length, half_length)^dim`` sampled uniformly.

    Spectral arrays use the real-FFT layout (last axis halved), so every
    per-mode array has shape :attr:`spectral_shape`.
    """

    dim: int = 1
    points_per_dim: int = 4096
    half_length: float = 64.0

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ParameterError(f"only dimensions 1 and 2 are supported, got dim={self.dim!r}")
        n = int(self.points_per_dim)
        if n < 2 or n & (n - 1):
            raise ParameterError(f"points_per_dim must be a power of two, got {self.points_per_dim!r}")
        object.__setattr__(self, "points_per_dim", n)
        object.__setattr__(self, "half_length", _positive("half_length", self.half_length))

    @property
    def shape(self):
        return (self.points_per_dim,) * self.dim

    @property
    def spectral_shape(self):
        n = self.points_per_dim
        return (n,) * (self.dim - 1) + (n // 2 + 1,)

    @property
    def dx(self):
        return 2.0 * self.half_length / self.points_per_dim

    @property
    def cell_volume(self):
        return self.dx ** self.dim

    @property
    def nyquist_radius(self):
        return np.pi / self.dx

    @cached_property
    def axis(self):
        return -self.half_length + self.dx * np.arange(self.points_per_dim)

    @cached_property
    def coords(self):
        """Tuple of coordinate arrays broadcastable to :attr:`shape`."""
        if self.dim == 1:
            return (self.axis,)
        return tuple(np.meshgrid(self.axis, self.axis, indexing="ij"))

    @cached_property
    def radius2(self):
        return sum(x ** 2 for x in self.coords)

    @cached_property
    def wavenumbers(self):
        """Per-mode wavevectors, shape ``spectral_shape + (dim,)``."""
        n, dx = self.points_per_dim, self.dx
        full = 2 * np.pi * np.fft.fftfreq(n, d=dx)
        half = 2 * np.pi * np.fft.rfftfreq(n, d=dx)
        axes = [full] * (self.dim - 1) + [half]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1)

    @cached_property
    def k2(self):
        return np.sum(self.wavenumbers ** 2, axis=-1)

    @cached_property
    def edge_mask(self):
        """Grid points in the outer 5% band of the box."""
        band = 0.95 * self.half_length
        mask = np.zeros(self.shape, dtype=bool)
        for x in self.coords:
            mask |= np.abs(x) >= band
        return mask

    def forward(self, f):
        f = np.asarray(f, dtype=float)
        if f.shape != self.shape:
            raise GridMismatch(f"field shape {f.shape} does not match grid {self.shape}")
        return np.fft.rfftn(f)

    def inverse(self, f_hat):
        f_hat = np.asarray(f_hat)
        if f_hat.shape != self.spectral_shape:
            raise GridMismatch(
                f"spectrum shape {f_hat.shape} does not match grid {self.spectral_shape}")
        return np.fft.irfftn(f_hat, s=self.shape, axes=tuple(range(self.dim)))

    def integrate(self, f):
        """Riemann sum of ``f`` over the box (exact for band-limited data)."""
        return float(np.sum(f) * self.cell_volume)


@dataclass(frozen=True)
class SpectrumPair:
    """DFT coefficients of a real field pair in real-FFT layout.

    Conjugate symmetry is implicit in the layout: only non-negative
    frequencies are stored along the last axis.
    """

    u_hat: np.ndarray
    v_hat: np.ndarray

    def __add__(self, other):
        return SpectrumPair(self.u_hat + other.u_hat, self.v_hat + other.v_hat)

    def scaled(self, factor):
        return SpectrumPair(factor * self.u_hat, factor * self.v_hat)


@dataclass(frozen=True, eq=False)
class SymbolTable:
    """Per-mode radial functions and eigenvalues of ``A(ξ)``.

    ``a_minus = 1 - r/√s`` and ``a_plus = 1 + r/√s`` are stored in a
    cancellation-free form because they feed both projectors and the
    propagator.
    """

    k2: np.ndarray
    r: np.ndarray
    s: np.ndarray
    sqrt_s: np.ndarray
    L: np.ndarray
    lambda_plus: np.ndarray
    lambda_minus: np.ndarray
    a_plus: np.ndarray
    a_minus: np.ndarray
    params: ExchangerParams = field(repr=False)


def symbols_from_k2(k2, params: ExchangerParams) -> SymbolTable:
    """Symbols evaluated at arbitrary squared wavenumbers ``k2``."""
    c, d, mu, nu = params.c, params.d, params.mu, params.nu
    k2 = np.asarray(k2, dtype=float)
    r = 0.5 * (c - d) * k2 + 0.5 * (mu - nu)
    sqrt_s = np.hypot(np.sqrt(mu * nu), r)
    s = sqrt_s ** 2
    b = 0.5 * (c + d) * k2 + 0.5 * (mu + nu)
    # s - b² = -(cd|ξ|⁴ + (cν + dμ)|ξ|²), so L = √s - b needs no subtraction
    # (+ 0.0 turns the -0 at ξ = 0 into +0)
    L = -(c * d * k2 ** 2 + (c * nu + d * mu) * k2) / (sqrt_s + b) + 0.0
    lambda_minus = -b - sqrt_s
    # 1 ∓ r/√s without cancellation: one of the two is always μν/(√s(√s+|r|))
    small = mu * nu / (sqrt_s * (sqrt_s + np.abs(r)))
    a_minus = np.where(r > 0, small, 1.0 - r / sqrt_s)
    a_plus = np.where(r < 0, small, 1.0 + r / sqrt_s)
    return SymbolTable(k2=k2, r=r, s=s, sqrt_s=sqrt_s, L=L, lambda_plus=L,
                       lambda_minus=lambda_minus, a_plus=a_plus, a_minus=a_minus,
                       params=params)


def build_symbols(grid: SpectralGrid, params: ExchangerParams) -> SymbolTable:
    """Symbols on every mode of ``grid``."""
    return symbols_from_k2(grid.k2, params)


def dispersal_asymptotics(params: ExchangerParams):
    """Limits of ``-L(ξ)/|ξ|²`` at low and high frequency.

    Returns
    -------
    low_coeff, high_coeff : float
        ``(cν + dμ)/(μ + ν)`` and ``min(c, d)``.
    """
    c, d, mu, nu = params.c, params.d, params.mu, params.nu
    return (c * nu + d * mu) / (mu + nu), min(c, d)


def system_matrix(k2, params: ExchangerParams):
    """The 2x2 matrix ``A(ξ)`` for a single squared wavenumber."""
    c, d, mu, nu = params.c, params.d, params.mu, params.nu
    return np.array([[-c * k2 - mu, nu], [mu, -d * k2 - nu]], dtype=float)


def propagator_entries(t, symbols: SymbolTable):
    """Entries ``(P11, P12, P21, P22)`` of ``exp(tA(ξ))`` on every mode."""
    t = float(t)
    if t < 0:
        raise ParameterError(f"time must be non-negative, got {t}")
    mu, nu = symbols.params.mu, symbols.params.nu
    e_plus = np.exp(t * symbols.lambda_plus)
    e_minus = np.exp(t * symbols.lambda_minus)
    # e^{tλ+} - e^{tλ-} = -e^{tλ+} expm1(-2t√s); λ+ is the larger root
    diff = -e_plus * np.expm1(-2.0 * t * symbols.sqrt_s)
    p11 = 0.5 * (symbols.a_minus * e_plus + symbols.a_plus * e_minus)
    p22 = 0.5 * (symbols.a_plus * e_plus + symbols.a_minus * e_minus)
    p12 = 0.5 * nu / symbols.sqrt_s * diff
    p21 = 0.5 * mu / symbols.sqrt_s * diff
    return p11, p12, p21, p22


def propagator(t, mode_index, symbols: SymbolTable, params: ExchangerParams | None = None):
    """``exp(tA(ξ))`` at a single mode as a 2x2 array."""
    if params is not None and params != symbols.params:
        raise ParameterError("params do not match the symbol table")
    entries = propagator_entries(t, symbols)
    p11, p12, p21, p22 = (np.asarray(e)[mode_index] for e in entries)
    return np.array([[p11, p12], [p21, p22]], dtype=float)


def split_projectors(mode_index, symbols: SymbolTable, params: ExchangerParams | None = None):
    """Persistent and evanescent spectral projectors of ``A(ξ)`` at one mode.

    ``exp(tA) = e^{tλ+} persistent + e^{tλ-} evanescent``.
    """
    if params is not None and params != symbols.params:
        raise ParameterError("params do not match the symbol table")
    mu, nu = symbols.params.mu, symbols.params.nu
    a_plus = float(np.asarray(symbols.a_plus)[mode_index])
    a_minus = float(np.asarray(symbols.a_minus)[mode_index])
    root = float(np.asarray(symbols.sqrt_s)[mode_index])
    persistent = 0.5 * np.array([[a_minus, nu / root], [mu / root, a_plus]])
    evanescent = 0.5 * np.array([[a_plus, -nu / root], [-mu / root, a_minus]])
    return persistent, evanescent


def persistent_data(spectrum0: SpectrumPair, symbols: SymbolTable,
                    params: ExchangerParams | None = None) -> SpectrumPair:
    """Initial data of the uncoupled dispersal equations, mode by mode."""
    mu, nu = symbols.params.mu, symbols.params.nu
    u0, v0 = spectrum0.u_hat, spectrum0.v_hat
    u_inf = 0.5 * (symbols.a_minus * u0 + nu / symbols.sqrt_s * v0)
    v_inf = 0.5 * (mu / symbols.sqrt_s * u0 + symbols.a_plus * v0)
    return SpectrumPair(u_inf, v_inf)


def evanescent_data(spectrum0: SpectrumPair, symbols: SymbolTable) -> SpectrumPair:
    """Complement of :func:`persistent_data`."""
    mu, nu = symbols.params.mu, symbols.params.nu
    u0, v0 = spectrum0.u_hat, spectrum0.v_hat
    u_e = 0.5 * (symbols.a_plus * u0 - nu / symbols.sqrt_s * v0)
    v_e = 0.5 * (-mu / symbols.sqrt_s * u0 + symbols.a_minus * v0)
    return SpectrumPair(u_e, v_e)


def apply_dispersal(spectrum, symbols: SymbolTable):
    """Transform of ``ℒf``: multiplication by ``L(ξ)``."""
    spectrum = np.asarray(spectrum)
    if spectrum.shape != symbols.L.shape:
        raise GridMismatch(f"spectrum shape {spectrum.shape} does not match symbols {symbols.L.shape}")
    return symbols.L * spectrum
