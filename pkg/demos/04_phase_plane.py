"""
The phase plane behind blow-up
==============================

Testing the solution against a wide Gaussian gives two functionals that
dominate a planar ODE.  For a small enough blur the ODE has a forward
invariant region from which every trajectory escapes to infinity, and
shaped data can always be placed inside it.
"""

import numpy as np

from heatexchanger import (ExchangerParams, ReactionParams, ShapedDataSpec, SimulationConfig,
                           SpectralGrid, blurred_functionals, det_M_alpha, find_lambda, geometry,
                           integrate_ode, simulate)

params, p = ExchangerParams(), 1.0
shape = ShapedDataSpec(eta=1.0, radius=1.0)

found = find_lambda(shape, params, p, dim=1)
geo = geometry(found.lam, params, p)
print(f"epsilon = {found.epsilon:g}, lambda = {found.lam:g}")
print(f"equilibria E0 = {geo.E0}, E1 = ({geo.E1[0]:.4f}, {geo.E1[1]:.4f})")
alpha = np.linspace(0, 1, 5)
print("det(M_alpha) on [E0, E1]:", det_M_alpha(alpha, found.lam, params, p))

ode = integrate_ode(found.U0, found.V0, found.lam, params, p)
print(f"ODE from ({found.U0:.4f}, {found.V0:.4f}): {ode.outcome.value} at t = {ode.t_star:.2f}")

# the blurred PDE solution stays above the ODE and blows up first
grid = SpectralGrid()
fields = shape.fields(grid, params)
trace = simulate(SimulationConfig(grid, params, ReactionParams(p=p), fields, t_end=30.0,
                                  sample_times=(1.0, 2.0, 3.0, 4.0, 5.0)))
for t, snap in sorted(trace.snapshots.items()):
    U, V = blurred_functionals(snap, grid, found.epsilon)
    print(f"t={t:.0f}: blurred PDE ({U:.4f}, {V:.4f})  ODE "
          f"({np.interp(t, ode.t, ode.U):.4f}, {np.interp(t, ode.t, ode.V):.4f})")
print(f"PDE outcome {trace.outcome.value} at t = {trace.t_star:.2f}")
