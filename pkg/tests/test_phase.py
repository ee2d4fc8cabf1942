import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import erf

from heatexchanger import (BlurSpec, ExchangerParams, GeometryDegenerate, OdeOutcome,
                           ParameterError, ReactionParams, RegimeViolation, SearchFailed,
                           ShapedDataSpec, SimulationConfig, SpectralGrid, blurred_data,
                           blurred_functionals, boundary_inward_check, det_M_alpha,
                           det_M_alpha_derivative, find_lambda, geometry, integrate_ode,
                           omega_contains, simulate, vector_field)
from heatexchanger.phase import isocline_polylines, omega_polygon

UNIT = ExchangerParams()
rate = st.floats(0.2, 5.0)
params_st = st.builds(ExchangerParams, rate, rate, rate, rate)


# --- blur ---------------------------------------------------------------------

def test_blur_spec_lambda():
    assert BlurSpec(0.3, 2).lam == 4 * 0.3
    with pytest.raises(ParameterError):
        BlurSpec(0.0, 1)
    with pytest.raises(ParameterError):
        BlurSpec(1.0, 3)


def radial_oracle(eps, radius, dim, eta=1.0):
    if dim == 1:
        val, _ = integrate.quad(lambda z: math.exp(-eps * z * z), -radius, radius, epsabs=1e-14)
        return eta * math.sqrt(eps / math.pi) * val
    val, _ = integrate.quad(lambda r: 2 * math.pi * r * math.exp(-eps * r * r), 0, radius,
                            epsabs=1e-14)
    return eta * eps / math.pi * val


def test_blurred_data_example():
    U0, V0 = blurred_data(BlurSpec(1.0, 1, 1.0, 1.0), UNIT)
    assert U0 == pytest.approx(erf(1.0), rel=1e-15)
    assert U0 == pytest.approx(0.84270, abs=5e-6)
    assert V0 == U0 / 2


@given(st.floats(1e-6, 50.0), st.floats(0.1, 5.0), st.integers(1, 2), st.floats(0.1, 3.0), params_st)
def test_blurred_data_matches_quadrature(eps, radius, dim, eta, params):
    U0, V0 = blurred_data(BlurSpec(eps, dim, eta, radius), params)
    assert U0 == pytest.approx(radial_oracle(eps, radius, dim, eta), rel=1e-9, abs=1e-15)
    assert V0 == pytest.approx(params.mu / (2 * params.nu) * U0, rel=1e-15)


@pytest.mark.parametrize("dim", [1, 2])
def test_blurred_data_concentrates(dim):
    U0, _ = blurred_data(BlurSpec(1e4, dim, 0.7, 1.0), UNIT)
    assert U0 == pytest.approx(0.7, rel=1e-12)


def test_grid_functionals_match_closed_form():
    grid = SpectralGrid(points_per_dim=8192, half_length=64.0)
    fields = ShapedDataSpec(1.0, 1.0).fields(grid, UNIT)
    U, V = blurred_functionals(fields, grid, 0.25)
    U0, V0 = blurred_data(BlurSpec(0.25, 1, 1.0, 1.0), UNIT)
    # the sampled indicator carries an O(dx) boundary error
    assert U == pytest.approx(U0, rel=1e-2) and V == pytest.approx(V0, rel=1e-2)


# --- field and geometry ----------------------------------------------------------

def test_vector_field_examples():
    assert vector_field(0.0, 0.0, 0.3, UNIT, 1.0) == (0.0, 0.0)
    P, Q = vector_field(2.0, 1.0, 0.0, UNIT, 1.0)
    assert (P, Q) == (3.0, 1.0)


@given(params_st, st.floats(1e-4, 0.5), st.floats(0.3, 3.0))
def test_E1_is_equilibrium(params, lam, p):
    geo = geometry(lam, params, p)
    P, Q = vector_field(*geo.E1, lam, params, p)
    scale = params.mu * geo.E1[0] + 1e-300
    assert abs(P) <= 1e-12 * max(scale, geo.E1[0] ** (1 + p)) + 1e-300
    assert abs(Q) <= 1e-12 * scale
    assert geo.isocline_U(geo.E1[0]) == pytest.approx(geo.E1[1], rel=1e-10, abs=1e-300)


def test_chi_example_and_limits():
    assert geometry(0.1, UNIT, 1.0).chi == pytest.approx(0.19091, abs=5e-6)
    assert geometry(0.0, UNIT, 1.0).chi == 0.0
    lams = np.logspace(-8, -1, 50)
    chis = np.array([geometry(l, UNIT, 1.5).chi for l in lams])
    assert np.all(np.diff(chis) > 0)
    assert np.hypot(*geometry(1e-10, UNIT, 1.0).E1) < 1e-8


def test_omega_membership_examples():
    assert omega_contains(1.0, 0.01, 0.1, UNIT, 1.0)
    assert not omega_contains(1.0, 0.0, 0.1, UNIT, 1.0)
    assert not omega_contains(*geometry(0.1, UNIT, 1.0).E1, 0.1, UNIT, 1.0)
    line = geometry(0.1, UNIT, 1.0).boundary_line(np.array([0.0, 1.0]))
    assert np.diff(line)[0] == pytest.approx(-0.2145, abs=5e-5)


def test_degenerate_geometry_rejected():
    with pytest.raises(GeometryDegenerate):
        omega_contains(1.0, 0.1, 2.0, UNIT, 1.0)
    with pytest.raises(GeometryDegenerate):
        det_M_alpha(0.5, 2.0, UNIT, 1.0)
    with pytest.raises(GeometryDegenerate):
        boundary_inward_check(2.0, UNIT, 1.0)


# --- det(M_alpha) --------------------------------------------------------------------

@given(params_st, st.floats(1e-4, 0.05), st.floats(0.3, 3.0))
def test_det_vanishes_at_E1(params, lam, p):
    if geometry(lam, params, p).degenerate:
        return
    assert abs(det_M_alpha(1.0, lam, params, p)) <= 1e-10


def test_det_non_negative_small_lambda():
    assert det_M_alpha(np.linspace(0, 1, 101), 0.01, UNIT, 1.0).min() >= -1e-12


@pytest.mark.parametrize("params,p", [(UNIT, 1.0), (ExchangerParams(0.5, 2.0, 2.0, 0.7), 1.5)])
def test_det_derivative_limit(params, p):
    alpha = np.linspace(0, 1, 101)
    target = -params.mu ** (1 + 2 / p)
    gaps = [np.max(np.abs(det_M_alpha_derivative(alpha, lam, params, p) - target))
            for lam in (1e-2, 1e-3, 1e-4)]
    assert gaps[0] > gaps[1] > gaps[2]
    # χ ~ λ^{1/p}, so two decades in λ buy at least a factor 10 when p <= 2
    assert gaps[2] < 0.1 * gaps[0]
    assert gaps[2] < 0.02 * abs(target)


@given(params_st, st.floats(1e-4, 0.05), st.floats(0.3, 3.0), st.floats(0.01, 0.99))
def test_det_derivative_matches_finite_difference(params, lam, p, alpha):
    if geometry(lam, params, p).degenerate:
        return
    h = 1e-6
    fd = (det_M_alpha(alpha + h, lam, params, p) - det_M_alpha(alpha - h, lam, params, p)) / (2 * h)
    exact = det_M_alpha_derivative(alpha, lam, params, p)
    assert exact == pytest.approx(fd, rel=1e-5, abs=1e-8)


# --- boundary check --------------------------------------------------------------------

def test_boundary_samples_point_inwards():
    lam, p = 0.05, 1.0
    geo = geometry(lam, UNIT, p)
    _, Q = vector_field(2 * geo.E0[0], 0.0, lam, UNIT, p)
    assert Q == pytest.approx(2 * UNIT.mu ** (1 + 1 / p)) and Q > 0
    U = 2 * geo.chi + 1
    P, _ = vector_field(U, geo.isocline_V(U), lam, UNIT, p)
    assert P > 0
    assert boundary_inward_check(lam, UNIT, p) <= 1e-10


def test_boundary_violation_reported_for_large_lambda():
    lams = np.linspace(0.01, 0.49, 49)
    worst = [boundary_inward_check(l, UNIT, 1.0) for l in lams]
    assert max(worst) > 1e-6
    first_bad = np.argmax(np.array(worst) > 1e-10)
    assert all(w <= 1e-10 for w in worst[:first_bad])
    assert det_M_alpha(np.linspace(0, 1, 101), lams[first_bad], UNIT, 1.0).min() < 0


# --- lambda search -------------------------------------------------------------------------

def test_find_lambda_canonical():
    found = find_lambda(ShapedDataSpec(1.0, 1.0), UNIT, 1.0, 1)
    assert 0 < found.epsilon <= 1 and found.lam == 2 * found.epsilon
    assert found.V0 == found.U0 / 2
    assert omega_contains(found.U0, found.V0, found.lam, UNIT, 1.0)
    assert boundary_inward_check(found.lam, UNIT, 1.0) <= 1e-10
    assert det_M_alpha(np.linspace(0, 1, 101), found.lam, UNIT, 1.0).min() >= -1e-12


@pytest.mark.parametrize("p,dim", [(3.0, 1), (2.0, 1), (1.0, 2)])
def test_find_lambda_regime(p, dim):
    with pytest.raises(RegimeViolation):
        find_lambda(ShapedDataSpec(1.0, 1.0), UNIT, p, dim)


def test_find_lambda_small_data_needs_small_epsilon():
    found = find_lambda(ShapedDataSpec(1e-3, 1.0), UNIT, 1.0, 1)
    assert found.epsilon < 1e-6
    with pytest.raises(SearchFailed):
        find_lambda(ShapedDataSpec(1e-3, 1.0), UNIT, 1.0, 1, floor=1e-4)


def test_find_lambda_two_dimensions():
    found = find_lambda(ShapedDataSpec(1.0, 2.0), ExchangerParams(1, 2, 1, 0.5), 0.5, 2)
    assert omega_contains(found.U0, found.V0, found.lam, ExchangerParams(1, 2, 1, 0.5), 0.5)


# --- ODE integration ----------------------------------------------------------------------------

def test_integrate_ode_examples():
    assert integrate_ode(0.0, 0.0, 0.1, UNIT, 1.0).outcome == OdeOutcome.CONVERGES_TO_ORIGIN
    res = integrate_ode(2.0, 1.0, 0.0, UNIT, 1.0)
    assert res.outcome == OdeOutcome.BLOW_UP and res.U[-1] >= 1e8
    # exact blow-up of (U+V)' >= ((U+V)/2)^2 from U+V=3 gives an upper bound on t_star
    assert res.t_star < 4 / 3
    E1 = geometry(0.1, UNIT, 1.0).E1
    rest = integrate_ode(*E1, 0.1, UNIT, 1.0, t_max=50.0)
    assert rest.outcome == OdeOutcome.INCONCLUSIVE
    assert np.max(np.hypot(rest.U - E1[0], rest.V - E1[1])) < 1e-6
    assert integrate_ode(0.05, 0.01, 0.1, UNIT, 1.0, t_max=300.0).outcome == \
        OdeOutcome.CONVERGES_TO_ORIGIN
    with pytest.raises(ParameterError):
        integrate_ode(-1.0, 0.0, 0.1, UNIT, 1.0)


CANONICAL = find_lambda(ShapedDataSpec(1.0, 1.0), UNIT, 1.0, 1)


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_omega_forward_invariant(a, b):
    lam = CANONICAL.lam
    geo = geometry(lam, UNIT, 1.0)
    U = geo.chi + a * (3 * geo.E0[0] - geo.chi)
    V = b * geo.isocline_V(U)
    if not omega_contains(U, V, lam, UNIT, 1.0):
        return
    res = integrate_ode(U, V, lam, UNIT, 1.0, t_max=1e4)
    assert res.outcome == OdeOutcome.BLOW_UP
    assert np.all(omega_contains(res.U, res.V, lam, UNIT, 1.0))


# --- artifacts --------------------------------------------------------------------------------

def test_phase_artifacts():
    poly = omega_polygon(0.05, UNIT, 1.0)
    assert poly[0] == poly[-1] and len(poly) == 5
    curves = isocline_polylines(0.05, UNIT, 1.0)
    U, V = curves["V_nullcline"]
    assert U.shape == V.shape == (256,)


# --- PDE versus ODE -----------------------------------------------------------------------------

def test_blurred_pde_dominates_ode():
    grid = SpectralGrid(points_per_dim=2048, half_length=64.0)
    shape = ShapedDataSpec(1.0, 1.0)
    found = CANONICAL
    fields = shape.fields(grid, UNIT)
    U0, V0 = blurred_functionals(fields, grid, found.epsilon)
    times = tuple(np.arange(0.5, 5.01, 0.5))
    trace = simulate(SimulationConfig(grid, UNIT, ReactionParams(p=1.0), fields, t_end=20.0,
                                      dt_init=0.02, sample_times=times))
    assert trace.outcome.value == "BlowUp"
    ode = integrate_ode(U0, V0, found.lam, UNIT, 1.0, t_max=10.0, dt_max=0.002)
    assert len(trace.snapshots) >= 5
    for t, snap in trace.snapshots.items():
        Ub, Vb = blurred_functionals(snap, grid, found.epsilon)
        assert Ub >= np.interp(t, ode.t, ode.U) - 1e-6
        assert Vb >= np.interp(t, ode.t, ode.V) - 1e-6
        assert Ub + Vb <= snap.u.max() + snap.v.max()
