"""Exact-in-time evolution of the linear Heat exchanger on a periodic grid.

The solution is split into a persistent part, which solves the uncoupled
dispersal equations ``∂t w = ℒw``, and an evanescent part, which decays
exponentially at rate at least ``(√μ + √ν)²/2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import FieldPair, field_stats
from .errors import BoxContaminated, ParameterError, Underflow
from .spectral import (ExchangerParams, SpectralGrid, SpectrumPair, SymbolTable,
                       build_symbols, evanescent_data, persistent_data)

__all__ = [
    "LinearSolution",
    "LinearTrace",
    "solve_linear",
    "linear_trace",
    "edge_ratio",
    "evanescent_decay_rate",
    "sup_norm_decay_fit",
    "EDGE_TOLERANCE",
    "UNDERFLOW_FLOOR",
]

#: max over the outer 5% band, relative to the peak, above which a run is
#: no longer a faithful stand-in for the whole-space problem
EDGE_TOLERANCE = 1e-8
UNDERFLOW_FLOOR = 1e-14
MIN_FIT_SAMPLES = 8


@dataclass(frozen=True, eq=False)
class LinearSolution:
    total: FieldPair
    persistent: FieldPair
    evanescent: FieldPair
    time: float


@dataclass(frozen=True, eq=False)
class LinearTrace:
    """Time series emitted by :func:`linear_trace`.

    ``rows()`` yields ``(t, sup_u, sup_v, mass_u, mass_v, evanescent_sup)``.
    """

    t: np.ndarray
    sup_u: np.ndarray
    sup_v: np.ndarray
    mass_u: np.ndarray
    mass_v: np.ndarray
    evanescent_sup: np.ndarray
    edge_ratio: np.ndarray

    columns = ("t", "sup_u", "sup_v", "mass_u", "mass_v", "evanescent_sup")

    def rows(self):
        return list(zip(*(getattr(self, name).tolist() for name in self.columns)))


def _check_params(symbols, params):
    if params is not None and symbols.params != params:
        raise ParameterError("symbol table was built for different parameters")


def _spectrum(data0: FieldPair, grid: SpectralGrid) -> SpectrumPair:
    return SpectrumPair(grid.forward(data0.u), grid.forward(data0.v))


def _fields(spec: SpectrumPair, grid: SpectralGrid) -> FieldPair:
    return FieldPair(grid.inverse(spec.u_hat), grid.inverse(spec.v_hat))


def _split_at(t, spec0: SpectrumPair, symbols: SymbolTable):
    persistent = persistent_data(spec0, symbols).scaled(np.exp(t * symbols.lambda_plus))
    evanescent = evanescent_data(spec0, symbols).scaled(np.exp(t * symbols.lambda_minus))
    return persistent, evanescent


def solve_linear(data0: FieldPair, t, grid: SpectralGrid, params: ExchangerParams,
                 symbols: SymbolTable | None = None) -> LinearSolution:
    """Solve the linear system up to time ``t`` in one exact step."""
    if t < 0:
        raise ParameterError(f"time must be non-negative, got {t}")
    if symbols is None:
        symbols = build_symbols(grid, params)
    _check_params(symbols, params)
    spec0 = _spectrum(data0, grid)
    persistent, evanescent = _split_at(t, spec0, symbols)
    return LinearSolution(total=_fields(persistent + evanescent, grid),
                          persistent=_fields(persistent, grid),
                          evanescent=_fields(evanescent, grid),
                          time=float(t))


def edge_ratio(fields: FieldPair, grid: SpectralGrid):
    """Largest value in the outer 5% band divided by the global peak."""
    peak = fields.sup
    if peak == 0:
        return 0.0
    mask = grid.edge_mask
    edge = max(np.max(np.abs(fields.u[mask])), np.max(np.abs(fields.v[mask])))
    return float(edge / peak)


def linear_trace(data0: FieldPair, times, grid: SpectralGrid, params: ExchangerParams,
                 symbols: SymbolTable | None = None) -> LinearTrace:
    """Sample sup-norms, masses and the evanescent sup-norm at ``times``."""
    if symbols is None:
        symbols = build_symbols(grid, params)
    _check_params(symbols, params)
    spec0 = _spectrum(data0, grid)
    cols = {name: [] for name in ("sup_u", "sup_v", "mass_u", "mass_v",
                                  "evanescent_sup", "edge_ratio")}
    times = np.asarray(times, dtype=float)
    for t in times:
        persistent, evanescent = _split_at(t, spec0, symbols)
        total = _fields(persistent + evanescent, grid)
        sup_u, sup_v, mass_u, mass_v = field_stats(total, grid)
        cols["sup_u"].append(sup_u)
        cols["sup_v"].append(sup_v)
        cols["mass_u"].append(mass_u)
        cols["mass_v"].append(mass_v)
        cols["evanescent_sup"].append(_fields(evanescent, grid).sup)
        cols["edge_ratio"].append(edge_ratio(total, grid))
    return LinearTrace(t=times, **{k: np.asarray(v) for k, v in cols.items()})


def _log_slope(x, y):
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def evanescent_decay_rate(data0: FieldPair, grid: SpectralGrid, params: ExchangerParams,
                          t_window, samples=16, symbols=None):
    """Exponential decay rate of the evanescent sup-norm over ``t_window``.

    Ordinary least squares of ``log ‖(u_e, v_e)(t)‖∞`` against ``t``; the
    returned value is minus the slope.

    Raises
    ------
    Underflow
        If fewer than 8 samples in the window stay above ``1e-14``.
    """
    t1, t2 = map(float, t_window)
    if not 1.0 <= t1 < t2:
        raise ParameterError(f"t_window must satisfy 1 <= t1 < t2, got {t_window!r}")
    if samples < MIN_FIT_SAMPLES:
        raise ParameterError(f"at least {MIN_FIT_SAMPLES} samples are required")
    if symbols is None:
        symbols = build_symbols(grid, params)
    spec0 = _spectrum(data0, grid)
    times = np.linspace(t1, t2, samples)
    sups = np.array([_fields(_split_at(t, spec0, symbols)[1], grid).sup for t in times])
    keep = sups > UNDERFLOW_FLOOR
    if keep.sum() < MIN_FIT_SAMPLES:
        raise Underflow(f"evanescent part below {UNDERFLOW_FLOOR:g} in window {t_window!r}")
    return -_log_slope(times[keep], np.log(sups[keep]))


def sup_norm_decay_fit(trace: LinearTrace, t_window, component="u"):
    """Algebraic decay exponent of ``‖u(t)‖∞`` against ``1 + t``.

    Returns the least-squares slope of ``log sup`` versus ``log(1 + t)``
    over the trace samples inside ``t_window``; about ``-N/2`` for
    localized data.
    """
    t1, t2 = map(float, t_window)
    window = (trace.t >= t1) & (trace.t <= t2)
    if window.sum() < MIN_FIT_SAMPLES:
        raise ParameterError(f"need at least {MIN_FIT_SAMPLES} samples in {t_window!r}")
    worst = float(np.max(trace.edge_ratio[window]))
    if worst > EDGE_TOLERANCE:
        raise BoxContaminated(f"edge/peak ratio {worst:.3g} exceeds {EDGE_TOLERANCE:g} in window")
    sup = {"u": trace.sup_u, "v": trace.sup_v}[component][window]
    return _log_slope(np.log1p(trace.t[window]), np.log(sup))
