"""Spectral solver toolkit for the Klein-Gordon-Schroedinger equations.

Uniformly accurate multiscale time integrator with a Fourier pseudospectral
space discretization, an independent Runge-Kutta reference solver, exact
propagators for the wave-operator and Schroedinger limit regimes, and
command-line drivers for convergence and limit-regime studies.
"""

from __future__ import annotations

from .backend import active_backend, compiled_available, select_kernels
from .coefficients import (
    CoefficientTable,
    ModeCoefficients,
    ModeFrequencies,
    QuadratureBudgetError,
    build_coefficient_table,
    coeff_quadrature_oracle,
    mode_coefficients,
    mode_frequencies,
    propagator_coeffs,
    reduced_phase,
    schrodinger_coeffs,
    source_coeffs,
)
from .grid import (
    Grid,
    SpectralField,
    filtered_laplacian,
    forward_transform,
    inverse_transform,
    make_grid,
    pointwise_product,
    sobolev_norm,
    spectral_derivative,
)
from .initial_data import (
    benchmark_phi0,
    benchmark_phi1,
    benchmark_psi0,
    benchmark_state,
    sech,
)
from .stepper import (
    REALNESS_TOL,
    DecomposedState,
    FieldState,
    decompose,
    evolve,
    init_state,
    step,
    step_phi_closed_form,
)

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "SpectralField",
    "make_grid",
    "forward_transform",
    "inverse_transform",
    "spectral_derivative",
    "filtered_laplacian",
    "pointwise_product",
    "sobolev_norm",
    "ModeFrequencies",
    "ModeCoefficients",
    "CoefficientTable",
    "QuadratureBudgetError",
    "mode_frequencies",
    "mode_coefficients",
    "propagator_coeffs",
    "source_coeffs",
    "schrodinger_coeffs",
    "coeff_quadrature_oracle",
    "build_coefficient_table",
    "reduced_phase",
    "FieldState",
    "DecomposedState",
    "init_state",
    "decompose",
    "step",
    "step_phi_closed_form",
    "evolve",
    "REALNESS_TOL",
    "sech",
    "benchmark_psi0",
    "benchmark_phi0",
    "benchmark_phi1",
    "benchmark_state",
    "select_kernels",
    "active_backend",
    "compiled_available",
    "__version__",
]
