"""Self-contained validation suites.

Two independent cross-checks, runnable from the CLI (``kgspectral
validate``) and reused by the acceptance tests:

* coefficient_sweep: every closed-form integrator coefficient against
  adaptive quadrature / ODE integration of its defining integral, over a
  grid of (eps, mu_l, tau) that includes the resonant neighborhood
  mu_l ~ 1/eps.
* scheme_equivalence: the meson output of the full splitting step against
  the direct trigonometric update, which is an exact algebraic identity,
  on random states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coefficients import (
    _COEFF_NAMES,
    build_coefficient_table,
    coeff_quadrature_oracle,
    mode_coefficients,
    mode_frequencies,
)
from .grid import make_grid
from .stepper import init_state, step, step_phi_closed_form

__all__ = [
    "SweepEntry",
    "coefficient_sweep",
    "scheme_equivalence",
    "COEFFICIENT_TOL",
    "EQUIVALENCE_TOL",
]

COEFFICIENT_TOL = 1e-10
EQUIVALENCE_TOL = 1e-11

SWEEP_EPS = (1.0, 0.5, 0.25, 0.125)
SWEEP_TAU = (0.2, 0.05, 0.0125)


@dataclass(frozen=True)
class SweepEntry:
    eps: float
    mu_l: float
    tau: float
    coeff: str
    deviation: float


def sweep_mu_values(eps: float) -> tuple[float, ...]:
    """Baseline mu_l values plus the near-resonant pair mu_l ~ 1/eps."""
    return (0.0, math.pi / 32.0, 1.0, 4.0, (1.0 - 1e-6) / eps, (1.0 + 1e-6) / eps)


def coefficient_sweep(
    eps_values=SWEEP_EPS, tau_values=SWEEP_TAU
) -> tuple[float, list[SweepEntry]]:
    """Max |closed form - quadrature oracle| per coefficient over the sweep.

    Returns (worst deviation, per-point worst entries sorted descending).
    """
    entries: list[SweepEntry] = []
    for eps in eps_values:
        for mu_l in sweep_mu_values(eps):
            freq = mode_frequencies(eps, mu_l)
            for tau in tau_values:
                closed = mode_coefficients(freq, tau)
                oracle = coeff_quadrature_oracle(freq, tau)
                for name in _COEFF_NAMES:
                    dev = abs(getattr(closed, name) - getattr(oracle, name))
                    entries.append(
                        SweepEntry(
                            eps=eps, mu_l=mu_l, tau=tau, coeff=name, deviation=float(dev)
                        )
                    )
    entries.sort(key=lambda e: e.deviation, reverse=True)
    worst = entries[0].deviation if entries else 0.0
    return worst, entries


def scheme_equivalence(
    seed: int,
    n_states: int = 100,
    n_modes: int = 64,
    eps_values=(1.0, 0.25, 0.0625),
) -> float:
    """Worst relative meson deviation between step() and the direct formula."""
    rng = np.random.default_rng(seed)
    grid = make_grid(-32.0, 32.0, n_modes)
    worst = 0.0
    for _ in range(n_states):
        eps = float(rng.choice(eps_values))
        tau = float(np.exp(rng.uniform(np.log(1e-4), np.log(0.2))))
        phi0 = rng.standard_normal(n_modes)
        phi1 = rng.standard_normal(n_modes)
        psi0 = rng.standard_normal(n_modes) + 1j * rng.standard_normal(n_modes)
        state = init_state(psi0, phi0, phi1 * eps**2, grid, eps)
        table = build_coefficient_table(grid, eps, tau)
        advanced = step(state, table)
        phi_cf, phidot_cf = step_phi_closed_form(state, table)
        scale_phi = max(float(np.max(np.abs(phi_cf))), 1e-300)
        scale_phidot = max(float(np.max(np.abs(phidot_cf))), 1e-300)
        dev = max(
            float(np.max(np.abs(advanced.Phi - phi_cf))) / scale_phi,
            float(np.max(np.abs(advanced.PhiDot - phidot_cf))) / scale_phidot,
        )
        worst = max(worst, dev)
    return worst
