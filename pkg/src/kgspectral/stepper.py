"""The multiscale time integrator.

One step advances the meson/nucleon pair (Phi, PhiDot, Psi) by tau through
four stages, all in Fourier space:

1. decompose: split the meson data into the fast-phase envelope pair
   (z0, dz0) -- via Z0~_l = (Phi~_l - i eps^2 PhiDot~_l)/2 and the filtered
   derivative dZ0~_l = i sin(mu_l^2 tau)/(2 tau) Z0~_l -- plus a remainder
   with dR0~_l = -dZ0~_l - (conj dz0)~_l, and form the filtered nucleon
   derivative dPsi~_l = -i sin(mu_l^2 tau)/tau Psi~_l + i (Phi Psi)~_l.
2. envelope/remainder update: propagate (z, dz) with the exact mode
   propagator (a, b, a', b'), and the remainder with the oscillatory
   source weights (p, q, p', q') acting on |Psi|^2 and Re{conj(Psi) dPsi}.
3. nucleon update: free Schroedinger phase plus the coupling weights
   c^+-, d^+- applied to the transformed products of (z0, dz0, conj z0,
   conj dz0) with (Psi, dPsi), closed by the remainder terms
   (i tau/2)(R1 Psi)~ and (i tau^2/2)(R1 dPsi)~.
4. reconstruct: Phi1 = 2 Re(e^{i tau/eps^2} z1) + r1 and the analogous
   derivative formula; realness of the meson pair is asserted, not assumed.

The nonlinear products are always formed at nodes and transformed once;
conjugations happen in node space so the asymmetric l = -N/2 coefficient
is treated exactly as the transform conventions demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .backend import select_kernels
from .coefficients import CoefficientTable, build_coefficient_table
from .grid import Grid

__all__ = [
    "FieldState",
    "DecomposedState",
    "init_state",
    "decompose",
    "step",
    "step_phi_closed_form",
    "evolve",
    "REALNESS_TOL",
]

# permitted relative size of the imaginary residue discarded from Phi/PhiDot
REALNESS_TOL = 1e-11


@dataclass(frozen=True, eq=False)
class FieldState:
    """Solver state at time t: real meson pair and complex nucleon field."""

    grid: Grid
    eps: float
    t: float
    Phi: np.ndarray
    PhiDot: np.ndarray
    Psi: np.ndarray


@dataclass(frozen=True, eq=False)
class DecomposedState:
    """Coefficient vectors (mode order) of the per-step frequency splitting."""

    Z0: np.ndarray
    Z0Dot: np.ndarray
    R0Dot: np.ndarray
    PsiDot: np.ndarray


def _real_nodes(values, grid: Grid, name: str) -> np.ndarray:
    if np.iscomplexobj(values):
        raise ValueError(f"{name} must be real-valued")
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (grid.N,):
        raise ValueError(f"{name}: expected {grid.N} node values, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def init_state(psi0, phi0, phi1, grid: Grid, eps: float) -> FieldState:
    """State at t=0: Phi = phi0, PhiDot = phi1/eps^2, Psi = psi0."""
    eps = float(eps)
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    phi0 = _real_nodes(phi0, grid, "phi0")
    phi1 = _real_nodes(phi1, grid, "phi1")
    psi0 = np.asarray(psi0, dtype=np.complex128)
    if psi0.shape != (grid.N,):
        raise ValueError(f"psi0: expected {grid.N} node values, got {psi0.shape}")
    if not np.all(np.isfinite(psi0)):
        raise ValueError("psi0 contains non-finite values")
    return _make_state(grid, eps, 0.0, phi0.copy(), phi1 / eps**2, psi0.copy())


def _make_state(grid, eps, t, phi, phidot, psi) -> FieldState:
    for arr in (phi, phidot, psi):
        arr.flags.writeable = False
    return FieldState(grid=grid, eps=eps, t=float(t), Phi=phi, PhiDot=phidot, Psi=psi)


def _sinc_filter(grid: Grid, tau: float) -> np.ndarray:
    mu = np.fft.ifftshift(grid.mu)
    return np.sin(mu * mu * tau) / tau


def _decompose_spectra(state: FieldState, sinc_filter: np.ndarray, kernels):
    """Natural-order spectra and node values of (z0, dz0, dPsi)."""
    n = state.grid.N
    rows = np.empty((4, n), dtype=np.complex128)
    rows[0] = state.Phi
    rows[1] = state.PhiDot
    rows[2] = state.Psi
    rows[3] = state.Phi * state.Psi
    spec = np.fft.fft(rows) / n
    z0_t, z0dot_t, psidot_t = kernels.decompose_spectra(
        spec[0], spec[1], spec[2], spec[3], sinc_filter, state.eps**2
    )
    nodes = np.fft.ifft(np.stack([z0_t, z0dot_t, psidot_t])) * n
    return spec[2], z0_t, z0dot_t, psidot_t, nodes[0], nodes[1], nodes[2]


def decompose(state: FieldState, tau: float) -> DecomposedState:
    """The four coefficient vectors the step starts from, in mode order."""
    tau = float(tau)
    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    kernels = select_kernels()
    sinc = _sinc_filter(state.grid, tau)
    _, z0_t, z0dot_t, psidot_t, _, z0dot, _ = _decompose_spectra(state, sinc, kernels)
    # conjugate in node space, then transform: (dR0)~_l = -(dz0)~_l - (conj dz0)~_l
    r0dot_t = np.fft.fft(-2.0 * z0dot.real) / state.grid.N
    out = []
    for vec in (z0_t, z0dot_t, r0dot_t.astype(np.complex128), psidot_t):
        shifted = np.fft.fftshift(vec)
        shifted.flags.writeable = False
        out.append(shifted)
    return DecomposedState(Z0=out[0], Z0Dot=out[1], R0Dot=out[2], PsiDot=out[3])


def _check_realness(imag_peak: float, field: np.ndarray, source: np.ndarray, name: str):
    scale = max(
        float(np.max(np.abs(field))) if field.size else 0.0,
        float(np.max(np.abs(source))) if source.size else 0.0,
    )
    if imag_peak > REALNESS_TOL * scale + 1e-300:
        raise FloatingPointError(
            f"{name} drifted off the real axis: imaginary residue {imag_peak:.3e} "
            f"exceeds {REALNESS_TOL:.0e} relative to field scale {scale:.3e}"
        )


def step(state: FieldState, coeffs: CoefficientTable, *, kernels=None) -> FieldState:
    """Advance by one time step coeffs.tau."""
    if coeffs.grid is not state.grid and coeffs.grid.N != state.grid.N:
        raise ValueError("coefficient table was built for a different grid")
    if coeffs.eps != state.eps:
        raise ValueError(
            f"coefficient table eps {coeffs.eps} does not match state eps {state.eps}"
        )
    if kernels is None:
        kernels = select_kernels()
    n = state.grid.N
    eps2 = state.eps**2
    tau = coeffs.tau

    psi_t, z0_t, z0dot_t, psidot_t, z0, z0dot, psidot = _decompose_spectra(
        state, coeffs.sinc_filter, kernels
    )

    products = kernels.build_products(z0, z0dot, state.Psi, psidot)
    spec = np.fft.fft(np.stack(products)) / n
    (
        rho_t,
        mixed_t,
        r0dot_t,
        z0psi_t,
        z0dotpsi_t,
        z0psidot_t,
        cz0psi_t,
        cz0dotpsi_t,
        cz0psidot_t,
    ) = spec

    z1_t, z1dot_t, r1_t, r1dot_t = kernels.zr_update(
        z0_t,
        z0dot_t,
        r0dot_t,
        rho_t,
        mixed_t,
        coeffs.a,
        coeffs.b,
        coeffs.a_dot,
        coeffs.b_dot,
        coeffs.p,
        coeffs.q,
        coeffs.p_dot,
        coeffs.q_dot,
        coeffs.sin_omega_over_omega,
        coeffs.cos_omega,
        eps2,
    )
    psi_partial_t = kernels.psi_update(
        psi_t,
        coeffs.psi_phase,
        coeffs.c_plus,
        coeffs.c_minus,
        coeffs.d_plus,
        coeffs.d_minus,
        z0psi_t,
        z0dotpsi_t,
        z0psidot_t,
        cz0psi_t,
        cz0dotpsi_t,
        cz0psidot_t,
    )

    nodes = np.fft.ifft(np.stack([z1_t, z1dot_t, r1_t, r1dot_t])) * n
    z1, z1dot, r1, r1dot = nodes

    phi1, phidot1, imag_r1, imag_r1dot = kernels.reconstruct(
        z1, z1dot, r1, r1dot, coeffs.phase_plus, eps2
    )
    _check_realness(imag_r1, phi1, r1, "Phi")
    _check_realness(imag_r1dot, phidot1, r1dot, "PhiDot")

    r1_real = r1.real
    tail = np.fft.fft(np.stack([r1_real * state.Psi, r1_real * psidot])) / n
    psi1_t = kernels.psi_finish(psi_partial_t, tail[0], tail[1], tau)
    psi1 = np.fft.ifft(psi1_t) * n

    if not (
        np.all(np.isfinite(phi1))
        and np.all(np.isfinite(phidot1))
        and np.all(np.isfinite(psi1))
    ):
        raise FloatingPointError(
            f"non-finite field values after step from t={state.t:.6g} "
            "(blow-up or too large a time step)"
        )
    return _make_state(state.grid, state.eps, state.t + tau, phi1, phidot1, psi1)


def step_phi_closed_form(
    state: FieldState, coeffs: CoefficientTable
) -> tuple[np.ndarray, np.ndarray]:
    """Meson update through the direct trigonometric formula.

    Algebraically identical to the (Phi, PhiDot) produced by step(): the
    envelope/remainder split telescopes back into

        Phi1~_l    = cos(w tau) Phi~_l + sin(w tau)/w PhiDot~_l
                     + p |Psi|^2~_l + 2 q Re{conj(Psi) dPsi}~_l,
        PhiDot1~_l = -w sin(w tau) Phi~_l + cos(w tau) PhiDot~_l
                     + p' |Psi|^2~_l + 2 q' Re{conj(Psi) dPsi}~_l.

    Kept as an independent code path for cross-checking the stepper.
    """
    n = state.grid.N
    rows = np.empty((4, n), dtype=np.complex128)
    rows[0] = state.Phi
    rows[1] = state.PhiDot
    rows[2] = state.Psi
    rows[3] = state.Phi * state.Psi
    spec = np.fft.fft(rows) / n
    phi_t, phidot_t, psi_t, phipsi_t = spec

    psidot_t = -1j * coeffs.sinc_filter * psi_t + 1j * phipsi_t
    psidot = np.fft.ifft(psidot_t) * n
    rho = (state.Psi.real**2 + state.Psi.imag**2).astype(np.complex128)
    mixed = (np.conj(state.Psi) * psidot).real.astype(np.complex128)
    src = np.fft.fft(np.stack([rho, mixed])) / n
    rho_t, mixed_t = src

    phi1_t = (
        coeffs.cos_omega * phi_t
        + coeffs.sin_omega_over_omega * phidot_t
        + coeffs.p * rho_t
        + 2.0 * coeffs.q * mixed_t
    )
    phidot1_t = (
        -coeffs.omega_sin * phi_t
        + coeffs.cos_omega * phidot_t
        + coeffs.p_dot * rho_t
        + 2.0 * coeffs.q_dot * mixed_t
    )
    out = np.fft.ifft(np.stack([phi1_t, phidot1_t])) * n
    phi1c, phidot1c = out
    _check_realness(float(np.max(np.abs(phi1c.imag))), phi1c.real, phi1c, "Phi")
    _check_realness(
        float(np.max(np.abs(phidot1c.imag))), phidot1c.real, phidot1c, "PhiDot"
    )
    return phi1c.real, phidot1c.real


def evolve(
    state: FieldState,
    tau: float,
    n_steps: int,
    observer: Callable[[int, FieldState], None] | None = None,
) -> FieldState:
    """Apply step() n_steps times, building the coefficient table once."""
    if n_steps != int(n_steps) or n_steps < 0:
        raise ValueError(f"n_steps must be a nonnegative integer, got {n_steps}")
    n_steps = int(n_steps)
    if n_steps == 0:
        return state
    table = build_coefficient_table(state.grid, state.eps, tau)
    kernels = select_kernels()
    for i in range(n_steps):
        try:
            state = step(state, table, kernels=kernels)
        except FloatingPointError as exc:
            raise FloatingPointError(f"at step {i + 1} of {n_steps}: {exc}") from exc
        if observer is not None:
            observer(i, state)
    return state
