"""Exact propagators for the two limiting regimes of the coupled system.

For eps -> 0 with well-prepared data the meson field approaches the
two-scale form phi ~ e^{it/eps^2} z + c.c. where the envelope z solves
either a Schroedinger equation with wave operator,

    2i dz/dt + eps^2 d^2z/dt^2 - Lap z = 0,   dz/dt(0) = -(i/2) Lap z(0),

or, dropping the eps^2 term, a plain Schroedinger equation

    2i dz/dt - Lap z = 0,

while the nucleon decouples into free Schroedinger flow i dpsi/dt + Lap psi = 0.
Both models are linear with constant coefficients, so they are solved
exactly per Fourier mode; no time-stepping error enters from the limit side.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .coefficients import _frequencies, _propagator, reduced_phase
from .grid import Grid, SpectralField, sobolev_norm
from .stepper import FieldState

__all__ = [
    "LimitState",
    "limit_initial_z",
    "initial_limit_state",
    "propagate_wave_operator",
    "propagate_schrodinger_z",
    "propagate_free_psi",
    "advance_limit",
    "reconstruct_phi",
    "eta_errors",
]

Model = Literal["wave_operator", "schrodinger"]
_MODELS = ("wave_operator", "schrodinger")


@dataclass(frozen=True, eq=False)
class LimitState:
    """Envelope z and nucleon psi of a limit model at time t.

    eps enters the dynamics only for model="wave_operator"; for
    model="schrodinger" it is kept solely for the reconstruction phase.
    """

    z: np.ndarray
    psi: np.ndarray
    model: str
    eps: float
    t: float


def _freeze(vec) -> np.ndarray:
    out = np.asarray(vec, dtype=np.complex128).copy()
    out.flags.writeable = False
    return out


def limit_initial_z(phi0, phi1) -> np.ndarray:
    """Well-prepared envelope data z(x,0) = (phi0(x) - i phi1(x)) / 2."""
    phi0 = np.asarray(phi0, dtype=np.float64)
    phi1 = np.asarray(phi1, dtype=np.float64)
    if phi0.shape != phi1.shape:
        raise ValueError(f"shape mismatch: {phi0.shape} vs {phi1.shape}")
    return 0.5 * (phi0 - 1j * phi1)


def initial_limit_state(psi0, phi0, phi1, model: str, eps: float) -> LimitState:
    if model not in _MODELS:
        raise ValueError(f"model must be one of {_MODELS}, got {model!r}")
    return LimitState(
        z=_freeze(limit_initial_z(phi0, phi1)),
        psi=_freeze(psi0),
        model=model,
        eps=float(eps),
        t=0.0,
    )


def _mode_multiply(values: np.ndarray, grid: Grid, multiplier: np.ndarray) -> np.ndarray:
    spec = np.fft.fft(np.asarray(values, dtype=np.complex128))
    return np.fft.ifft(spec * multiplier)


def propagate_wave_operator(z0, grid: Grid, eps: float, t: float) -> np.ndarray:
    """Exact solution at time t of the wave-operator envelope equation.

    Per mode this is the oscillator 2i u' + eps^2 u'' + mu_l^2 u = 0 with
    u'(0) = (i/2) mu_l^2 u(0), so u(t) = [a_l(t) + eps^2 b_l(t) (i/2) mu_l^2] u(0).
    """
    t = float(t)
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    mu = np.fft.ifftshift(grid.mu)
    _, lam_plus, lam_minus = _frequencies(eps, mu)
    a, b, _, _ = _propagator(eps, lam_plus, lam_minus, t)
    mult = a + eps**2 * b * (0.5j * mu**2)
    return _mode_multiply(z0, grid, mult)


def propagate_schrodinger_z(z0, grid: Grid, t: float) -> np.ndarray:
    """Exact solution of 2i dz/dt = Lap z: multiplier e^{i mu_l^2 t / 2}."""
    t = float(t)
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    mu = np.fft.ifftshift(grid.mu)
    return _mode_multiply(z0, grid, np.exp(0.5j * mu**2 * t))


def propagate_free_psi(psi0, grid: Grid, t: float) -> np.ndarray:
    """Exact free Schroedinger flow: multiplier e^{-i mu_l^2 t}."""
    t = float(t)
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    mu = np.fft.ifftshift(grid.mu)
    return _mode_multiply(psi0, grid, np.exp(-1j * mu**2 * t))


def advance_limit(initial: LimitState, grid: Grid, t: float) -> LimitState:
    """Limit state at absolute time t, from well-prepared data at t=0."""
    if initial.t != 0.0:
        raise ValueError(
            "limit propagation starts from well-prepared data at t=0 "
            f"(got a state at t={initial.t})"
        )
    if initial.model == "wave_operator":
        z = propagate_wave_operator(initial.z, grid, initial.eps, t)
    else:
        z = propagate_schrodinger_z(initial.z, grid, t)
    psi = propagate_free_psi(initial.psi, grid, t)
    return LimitState(
        z=_freeze(z), psi=_freeze(psi), model=initial.model, eps=initial.eps, t=float(t)
    )


def reconstruct_phi(z, eps: float, t: float) -> np.ndarray:
    """Two-scale meson reconstruction 2 Re(e^{it/eps^2} z) at the nodes."""
    t = float(t)
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    phase = np.exp(1j * reduced_phase(t / float(eps) ** 2))
    return 2.0 * (phase * np.asarray(z, dtype=np.complex128)).real


def _eta(full: FieldState, limit: LimitState) -> float:
    if limit.z.shape != (full.grid.N,):
        raise ValueError(
            f"limit state has {limit.z.shape[0]} nodes, grid has {full.grid.N}"
        )
    if abs(limit.t - full.t) > 1e-12 * max(1.0, abs(full.t)):
        raise ValueError(f"time mismatch: full state at t={full.t}, limit at t={limit.t}")
    phi_model = reconstruct_phi(limit.z, limit.eps, limit.t)
    grid = full.grid
    e_phi = np.fft.fftshift(np.fft.fft(full.Phi - phi_model) / grid.N)
    e_psi = np.fft.fftshift(np.fft.fft(full.Psi - limit.psi) / grid.N)
    return sobolev_norm(SpectralField(grid, e_phi), 1) + sobolev_norm(
        SpectralField(grid, e_psi), 1
    )


def eta_errors(
    full: FieldState, limit_sw: LimitState, limit_s: LimitState
) -> tuple[float, float]:
    """H1 distances (meson plus nucleon) of the full solution to each limit."""
    return _eta(full, limit_sw), _eta(full, limit_s)
