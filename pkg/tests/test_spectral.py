import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from heatexchanger import (ExchangerParams, GridMismatch, ParameterError, ReactionParams,
                           SpectralGrid, SpectrumPair, build_symbols, dispersal_asymptotics,
                           evanescent_data, persistent_data, propagator, split_projectors,
                           symbols_from_k2, system_matrix)
from heatexchanger.spectral import apply_dispersal

rate = st.floats(0.05, 20.0)
params_st = st.builds(ExchangerParams, rate, rate, rate, rate)
k2_st = st.floats(0.0, 1e4)


def one(k2, params):
    return symbols_from_k2(np.array([k2]), params)


# --- parameter types -------------------------------------------------------

@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_exchanger_rejects_non_positive(bad):
    with pytest.raises(ParameterError):
        ExchangerParams(c=bad)
    with pytest.raises(ParameterError):
        ExchangerParams(nu=bad)


def test_reaction_validation():
    assert ReactionParams(p=2, q=3, kappa=1).kappa == 1
    with pytest.raises(ParameterError):
        ReactionParams(p=0)
    with pytest.raises(ParameterError):
        ReactionParams(q=-1)
    with pytest.raises(ParameterError):
        ReactionParams(kappa=2)


# --- grid ------------------------------------------------------------------

def test_grid_rejects_unsupported_shapes():
    with pytest.raises(ParameterError):
        SpectralGrid(dim=3)
    with pytest.raises(ParameterError):
        SpectralGrid(points_per_dim=1000)
    with pytest.raises(ParameterError):
        SpectralGrid(half_length=0)


@pytest.mark.parametrize("dim,n", [(1, 64), (2, 16)])
def test_grid_wavenumbers_standard_set(dim, n):
    grid = SpectralGrid(dim=dim, points_per_dim=n, half_length=3.0)
    step = 2 * np.pi / (2 * grid.half_length)
    j = grid.wavenumbers / step
    np.testing.assert_allclose(j, np.round(j), atol=1e-12)
    assert np.sum(grid.k2 == 0) == 1
    assert grid.wavenumbers.shape == grid.spectral_shape + (dim,)


def test_grid_transform_round_trip(rng):
    grid = SpectralGrid(dim=2, points_per_dim=32, half_length=5.0)
    f = rng.standard_normal(grid.shape)
    np.testing.assert_allclose(grid.inverse(grid.forward(f)), f, atol=1e-13)
    with pytest.raises(GridMismatch):
        grid.forward(np.zeros(7))


def test_grid_integrate_gaussian():
    grid = SpectralGrid(dim=2, points_per_dim=128, half_length=16.0)
    assert grid.integrate(np.exp(-grid.radius2 / 2)) == pytest.approx(2 * np.pi, rel=1e-12)


# --- symbols ---------------------------------------------------------------

def test_symbols_equal_rates_example():
    sym = one(1.0, ExchangerParams())
    assert sym.r[0] == 0 and sym.s[0] == pytest.approx(1.0)
    assert sym.L[0] == pytest.approx(-1.0) and sym.lambda_minus[0] == pytest.approx(-3.0)
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(system_matrix(1.0, ExchangerParams()))),
                               [-3.0, -1.0])


def test_symbols_unequal_rates_example():
    sym = one(1.0, ExchangerParams(1, 2, 1, 2))
    assert sym.r[0] == pytest.approx(-1.0) and sym.s[0] == pytest.approx(3.0)
    assert sym.lambda_plus[0] == pytest.approx(-3 + math.sqrt(3), rel=1e-14)
    assert sym.lambda_minus[0] == pytest.approx(-3 - math.sqrt(3), rel=1e-14)


@given(params_st)
def test_L_vanishes_at_zero(params):
    assert one(0.0, params).L[0] == 0.0


@given(params_st, k2_st)
def test_symbol_invariants(params, k2):
    sym = one(k2, params)
    c, d, mu, nu = params.c, params.d, params.mu, params.nu
    assert sym.s[0] > 0
    assert sym.lambda_plus[0] == sym.L[0]
    trace = -(c + d) * k2 - (mu + nu)
    det = (c * k2 + mu) * (d * k2 + nu) - mu * nu
    assert sym.lambda_plus[0] + sym.lambda_minus[0] == pytest.approx(trace, rel=1e-12, abs=1e-12)
    assert sym.lambda_plus[0] * sym.lambda_minus[0] == pytest.approx(det, rel=1e-10, abs=1e-12)
    if k2 > 0:
        assert sym.L[0] < 0


@given(params_st)
def test_L_radially_non_increasing(params):
    L = symbols_from_k2(np.linspace(0, 100, 2001) ** 2, params).L
    assert np.all(np.diff(L) <= 0)


@given(params_st, k2_st)
def test_evanescent_eigenvalue_bound(params, k2):
    sym = one(k2, params)
    bound = -(0.5 * (params.c + params.d) * k2
              + 0.5 * (math.sqrt(params.mu) + math.sqrt(params.nu)) ** 2)
    assert sym.lambda_minus[0] <= bound * (1 - 1e-13)


@given(params_st, k2_st)
def test_filter_bounds(params, k2):
    sym = one(k2, params)
    ratio = sym.r[0] / sym.sqrt_s[0]
    assert abs(1 + ratio) <= 2 and abs(1 - ratio) <= 2
    assert params.nu / sym.sqrt_s[0] <= math.sqrt(params.nu / params.mu) * (1 + 1e-14)
    assert params.mu / sym.sqrt_s[0] <= math.sqrt(params.mu / params.nu) * (1 + 1e-14)


# --- asymptotics -----------------------------------------------------------

def test_dispersal_asymptotics_examples():
    assert dispersal_asymptotics(ExchangerParams(2, 2, 1, 3)) == pytest.approx((2, 2))
    low, high = dispersal_asymptotics(ExchangerParams(1, 2, 1, 2))
    assert low == pytest.approx(4 / 3) and high == 1
    assert dispersal_asymptotics(ExchangerParams(1, 3, 2, 2))[0] == pytest.approx(2)


@given(params_st)
def test_dispersal_asymptotics_match_symbol(params):
    low, high = dispersal_asymptotics(params)
    radii = np.array([1e-3, 1e3])
    ratio = -symbols_from_k2(radii ** 2, params).L / radii ** 2
    assert ratio[0] == pytest.approx(low, rel=0.01)
    assert ratio[1] == pytest.approx(high, rel=0.01)


# --- propagator ------------------------------------------------------------

def test_propagator_identity_at_zero_time():
    sym = symbols_from_k2(np.array([0.0, 1.0, 50.0]), ExchangerParams(1, 2, 3, 4))
    for i in range(3):
        np.testing.assert_array_equal(propagator(0.0, i, sym), np.eye(2))


def test_propagator_equal_rates_at_origin():
    sym = one(0.0, ExchangerParams())
    np.testing.assert_allclose(propagator(math.log(2) / 2, 0, sym),
                               [[0.75, 0.25], [0.25, 0.75]], atol=1e-15)


@given(params_st, st.floats(0.0, 1e3), st.floats(0.0, 10.0))
def test_propagator_matches_expm(params, k2, t):
    sym = one(k2, params)
    oracle = scipy.linalg.expm(t * system_matrix(k2, params))
    np.testing.assert_allclose(propagator(t, 0, sym), oracle, atol=1e-10, rtol=0)


@given(params_st, k2_st, st.floats(0.0, 5.0), st.floats(0.0, 5.0))
def test_propagator_semigroup_and_positivity(params, k2, t, s):
    sym = one(k2, params)
    lhs = propagator(t + s, 0, sym)
    np.testing.assert_allclose(lhs, propagator(t, 0, sym) @ propagator(s, 0, sym), atol=1e-10)
    assert np.all(lhs >= 0) and np.all(np.isfinite(lhs))


@given(params_st, st.floats(0.0, 20.0))
def test_mode_zero_conserves_mass(params, t):
    np.testing.assert_allclose(system_matrix(0.0, params).sum(axis=0), 0.0)
    P = propagator(t, 0, one(0.0, params))
    np.testing.assert_allclose(P.sum(axis=0), 1.0, atol=1e-13)


def test_propagator_rejects_negative_time():
    with pytest.raises(ParameterError):
        propagator(-1.0, 0, one(1.0, ExchangerParams()))


def test_propagator_rejects_foreign_params():
    with pytest.raises(ParameterError):
        propagator(1.0, 0, one(1.0, ExchangerParams()), ExchangerParams(c=2))


# --- projectors ------------------------------------------------------------

@given(params_st, k2_st)
def test_projectors_complete_and_idempotent(params, k2):
    sym = one(k2, params)
    per, eva = split_projectors(0, sym)
    np.testing.assert_allclose(per + eva, np.eye(2), atol=1e-14)
    np.testing.assert_allclose(per @ per, per, atol=1e-12)
    np.testing.assert_allclose(eva @ eva, eva, atol=1e-12)


@given(params_st, st.floats(0.0, 1e3), st.floats(0.0, 10.0))
def test_propagator_spectral_decomposition(params, k2, t):
    sym = one(k2, params)
    per, eva = split_projectors(0, sym)
    rebuilt = np.exp(t * sym.lambda_plus[0]) * per + np.exp(t * sym.lambda_minus[0]) * eva
    np.testing.assert_allclose(propagator(t, 0, sym), rebuilt, atol=1e-12)


def test_symmetric_persistent_projector_averages():
    per, _ = split_projectors(0, one(3.0, ExchangerParams(2, 2, 1.5, 1.5)))
    np.testing.assert_allclose(per, 0.5 * np.ones((2, 2)), atol=1e-15)


# --- persistent data and dispersal -----------------------------------------

def test_persistent_data_symmetric_case(rng):
    grid = SpectralGrid(points_per_dim=64, half_length=8.0)
    sym = build_symbols(grid, ExchangerParams(1.5, 1.5, 0.7, 0.7))
    u0, v0 = grid.forward(rng.random(grid.shape)), grid.forward(rng.random(grid.shape))
    out = persistent_data(SpectrumPair(u0, v0), sym)
    np.testing.assert_allclose(out.u_hat, (u0 + v0) / 2, atol=1e-13)
    np.testing.assert_allclose(out.v_hat, (u0 + v0) / 2, atol=1e-13)


def test_persistent_data_mode_zero_weight():
    sym = one(0.0, ExchangerParams(1, 1, 1, 2))
    out = persistent_data(SpectrumPair(np.array([3.0 + 0j]), np.array([0j])), sym)
    assert out.u_hat[0] == pytest.approx(2.0)


def test_persistent_data_of_zero_is_zero():
    sym = one(1.0, ExchangerParams(1, 2, 3, 4))
    out = persistent_data(SpectrumPair(np.zeros(1, complex), np.zeros(1, complex)), sym)
    assert out.u_hat[0] == 0 and out.v_hat[0] == 0


def test_evanescent_complements_persistent(rng):
    sym = symbols_from_k2(rng.uniform(0, 10, 20), ExchangerParams(0.3, 2, 1.2, 0.4))
    spec = SpectrumPair(rng.standard_normal(20) + 0j, rng.standard_normal(20) + 0j)
    total = persistent_data(spec, sym) + evanescent_data(spec, sym)
    np.testing.assert_allclose(total.u_hat, spec.u_hat, atol=1e-14)
    np.testing.assert_allclose(total.v_hat, spec.v_hat, atol=1e-14)


def test_apply_dispersal_examples(rng):
    grid = SpectralGrid(points_per_dim=64, half_length=8.0)
    sym = build_symbols(grid, ExchangerParams(1.3, 1.3, 0.5, 2.0))
    const = grid.forward(np.full(grid.shape, 2.0))
    np.testing.assert_allclose(apply_dispersal(const, sym), 0, atol=1e-12)
    spec = grid.forward(rng.random(grid.shape))
    np.testing.assert_allclose(apply_dispersal(spec, sym), -1.3 * grid.k2 * spec, rtol=1e-12)
    pure = np.zeros(grid.spectral_shape, complex)
    pure[5] = 1.0
    assert apply_dispersal(pure, sym)[5] == pytest.approx(sym.L[5])
    with pytest.raises(GridMismatch):
        apply_dispersal(np.zeros(3), sym)
