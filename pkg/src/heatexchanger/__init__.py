"""Linear and semilinear heat exchanger systems.

Two populations ``u, v`` diffuse at rates ``c, d`` and exchange individuals
at rates ``μ`` (u → v) and ``ν`` (v → u)::

    u_t = cΔu - μu + νv + u^(1+p)
    v_t = dΔv + μu - νv + κ v^(1+q)

The package provides exact Fourier-side linear evolution, an
integrating-factor solver for the reaction system, explicit decay and
global-existence constants, and the phase-plane construction behind
subcritical blow-up.
"""

from .certificates import (ALL_FREQUENCIES, ConstantsBundle, MassFunctional, decay_constants,
                           envelope_F, envelope_sup, global_bounds, m_zero, mass_functional,
                           phase_diagram, tail_fold)
from .data import FieldPair, GaussianDataSpec, ShapedDataSpec, field_stats
from .errors import (BoxContaminated, CertificateUnavailable, ComparisonWindowEmpty,
                     GeometryDegenerate, GridMismatch, HeatExchangerError, Overflow,
                     ParameterError, RegimeViolation, SearchFailed, Underflow,
                     UnsupportedDataFamily)
from .linear import (LinearSolution, LinearTrace, edge_ratio, evanescent_decay_rate,
                     linear_trace, solve_linear, sup_norm_decay_fit)
from .phase import (BlurSpec, OdeOutcome, OdeResult, PhaseGeometry, blurred_data,
                    blurred_functionals, boundary_inward_check, det_M_alpha,
                    det_M_alpha_derivative, find_lambda, geometry, integrate_ode,
                    omega_contains, vector_field)
from .semilinear import (Outcome, SimulationConfig, SimulationTrace, comparison_check,
                         simulate, step)
from .spectral import (ExchangerParams, ReactionParams, SpectralGrid, SpectrumPair,
                       SymbolTable, build_symbols, dispersal_asymptotics, evanescent_data,
                       persistent_data, propagator, propagator_entries, split_projectors,
                       symbols_from_k2, system_matrix)

__version__ = "0.1.0"
