"""Brute-force solvers used to validate the multiscale stepper.

Two independent reference paths:

* a classical RK4 integration of the Fourier method-of-lines system

      phi_hat'_l    = phidot_hat_l
      phidot_hat'_l = [ (|psi|^2)~_l - mu_l^2 phi_hat_l - phi_hat_l/eps^2 ] / eps^2
      psi_hat'_l    = -i mu_l^2 psi_hat_l + i (phi psi)~_l

  which shares nothing with the multiscale stepper beyond the FFT itself.
  The fastest mode oscillates at omega_max ~ 1/eps^2, so the step size must
  satisfy dt * omega_max <= 0.1; that restricts practical use to eps >= 1/8.

* a fine-mesh run of the multiscale stepper itself (reference_solve), the
  standard way to produce reference solutions for convergence tables once
  the stepper has been independently validated at moderate eps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, make_grid
from .stepper import FieldState, evolve, init_state

__all__ = [
    "ModeODEState",
    "mode_state_from_fields",
    "fields_from_mode_state",
    "rhs",
    "rk4_evolve",
    "reference_solve",
    "MIN_ORACLE_EPS",
]

MIN_ORACLE_EPS = 0.125
_STABILITY_LIMIT = 0.1


@dataclass(frozen=True, eq=False)
class ModeODEState:
    """Fourier coefficients (mode order l = -N/2..N/2-1) of the ODE system."""

    phi_hat: np.ndarray
    phi_hat_dot: np.ndarray
    psi_hat: np.ndarray
    t: float


def _frozen(vec: np.ndarray) -> np.ndarray:
    out = np.asarray(vec, dtype=np.complex128).copy()
    out.flags.writeable = False
    return out


def mode_state_from_fields(state: FieldState) -> ModeODEState:
    n = state.grid.N
    rows = np.empty((3, n), dtype=np.complex128)
    rows[0] = state.Phi
    rows[1] = state.PhiDot
    rows[2] = state.Psi
    spec = np.fft.fftshift(np.fft.fft(rows) / n, axes=-1)
    return ModeODEState(
        phi_hat=_frozen(spec[0]),
        phi_hat_dot=_frozen(spec[1]),
        psi_hat=_frozen(spec[2]),
        t=state.t,
    )


def fields_from_mode_state(mode_state: ModeODEState, grid: Grid, eps: float) -> FieldState:
    n = grid.N
    rows = np.stack(
        [mode_state.phi_hat, mode_state.phi_hat_dot, mode_state.psi_hat]
    )
    nodes = np.fft.ifft(np.fft.ifftshift(rows, axes=-1)) * n
    phi, phidot, psi = nodes
    for name, vec in (("Phi", phi), ("PhiDot", phidot)):
        scale = max(float(np.max(np.abs(vec))), 1e-300)
        peak = float(np.max(np.abs(vec.imag)))
        if peak > 1e-10 * scale:
            raise FloatingPointError(
                f"{name} is not Hermitian-symmetric: imaginary residue "
                f"{peak:.3e} at field scale {scale:.3e}"
            )
    phi_r = phi.real.copy()
    phidot_r = phidot.real.copy()
    psi_c = psi.copy()
    for arr in (phi_r, phidot_r, psi_c):
        arr.flags.writeable = False
    return FieldState(
        grid=grid, eps=float(eps), t=mode_state.t, Phi=phi_r, PhiDot=phidot_r, Psi=psi_c
    )


def _rhs_natural(stacked: np.ndarray, mu2: np.ndarray, eps2: float) -> np.ndarray:
    """Derivative of the stacked natural-order system [phi^, phidot^, psi^]."""
    n = stacked.shape[-1]
    nodes = np.fft.ifft(stacked[[0, 2]]) * n
    phi, psi = nodes
    prods = np.empty((2, n), dtype=np.complex128)
    prods[0] = psi.real**2 + psi.imag**2
    prods[1] = phi * psi
    spec = np.fft.fft(prods) / n
    rho_t, phipsi_t = spec
    out = np.empty_like(stacked)
    out[0] = stacked[1]
    out[1] = (rho_t - mu2 * stacked[0] - stacked[0] / eps2) / eps2
    out[2] = -1j * mu2 * stacked[2] + 1j * phipsi_t
    return out


def rhs(state: ModeODEState, grid: Grid, eps: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Time derivative (phi_hat', phi_hat_dot', psi_hat'), mode order."""
    eps = float(eps)
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    stacked = np.fft.ifftshift(
        np.stack([state.phi_hat, state.phi_hat_dot, state.psi_hat]), axes=-1
    )
    mu2 = np.fft.ifftshift(grid.mu) ** 2
    d = np.fft.fftshift(_rhs_natural(stacked, mu2, eps * eps), axes=-1)
    return _frozen(d[0]), _frozen(d[1]), _frozen(d[2])


def max_stable_dt(grid: Grid, eps: float) -> float:
    """Largest dt the RK4 stability precondition accepts."""
    mu_max = np.pi * grid.N / grid.length
    omega_max = np.sqrt(1.0 + (mu_max * eps) ** 2) / eps**2
    return _STABILITY_LIMIT / omega_max


def rk4_evolve(
    state: ModeODEState, dt: float, n: int, grid: Grid, eps: float
) -> ModeODEState:
    """n classical RK4 steps of size dt on the mode ODE system."""
    eps = float(eps)
    if eps < MIN_ORACLE_EPS:
        raise ValueError(
            f"the brute-force oracle requires eps >= {MIN_ORACLE_EPS} "
            f"(got {eps}); its stable dt scales like eps^2"
        )
    if not eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    if n != int(n) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n}")
    n = int(n)
    dt = float(dt)
    if n > 0:
        if dt <= 0.0:
            raise ValueError(f"dt must be positive, got {dt}")
        limit = max_stable_dt(grid, eps)
        if dt > limit:
            raise ValueError(
                f"dt={dt:.3e} violates the stability precondition "
                f"dt*omega_max <= {_STABILITY_LIMIT}; use dt <= {limit:.6e}"
            )
    if n == 0:
        return state

    y = np.fft.ifftshift(
        np.stack([state.phi_hat, state.phi_hat_dot, state.psi_hat]), axes=-1
    )
    mu2 = np.fft.ifftshift(grid.mu) ** 2
    eps2 = eps * eps
    half = 0.5 * dt
    sixth = dt / 6.0
    for _ in range(n):
        k1 = _rhs_natural(y, mu2, eps2)
        k2 = _rhs_natural(y + half * k1, mu2, eps2)
        k3 = _rhs_natural(y + half * k2, mu2, eps2)
        k4 = _rhs_natural(y + dt * k3, mu2, eps2)
        y += sixth * (k1 + 2.0 * (k2 + k3) + k4)
    out = np.fft.fftshift(y, axes=-1)
    return ModeODEState(
        phi_hat=_frozen(out[0]),
        phi_hat_dot=_frozen(out[1]),
        psi_hat=_frozen(out[2]),
        t=state.t + n * dt,
    )


def reference_solve(
    psi0,
    phi0,
    phi1,
    grid: Grid,
    eps: float,
    t_final: float,
    *,
    h_ref: float = 1.0 / 32.0,
    tau_ref: float = 5e-6,
) -> FieldState:
    """Fine-mesh multiscale run used as the reference for convergence tables.

    psi0, phi0, phi1 are callables on node coordinates. The returned state
    lives on the fine grid (same interval as ``grid``, spacing h_ref); node
    subsampling restricts it to any coarser nested grid.
    """
    n_ref_f = grid.length / h_ref
    n_ref = int(round(n_ref_f))
    if abs(n_ref_f - n_ref) > 1e-9 * max(1.0, n_ref_f) or n_ref < 4 or n_ref % 2:
        raise ValueError(
            f"h_ref={h_ref} does not divide the interval length {grid.length} "
            "into an even number of cells"
        )
    fine = grid if n_ref == grid.N else make_grid(grid.a, grid.b, n_ref)
    x = fine.interior_nodes
    state = init_state(psi0(x), phi0(x), phi1(x), fine, eps)
    if t_final == 0.0:
        return state
    steps_f = t_final / tau_ref
    steps = int(round(steps_f))
    if steps <= 0 or abs(steps_f - steps) > 1e-9 * steps_f:
        raise ValueError(
            f"t_final={t_final} is not an integral number of reference steps "
            f"tau_ref={tau_ref}"
        )
    return evolve(state, tau_ref, steps)
