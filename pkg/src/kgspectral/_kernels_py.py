"""Pure-numpy spectral step kernels (fallback backend).

Mirrors kgspectral._core function-for-function; the compiled module fuses
these elementwise passes into single C loops, nothing more.
"""

import numpy as np

BACKEND_NAME = "python"


def decompose_spectra(phi_t, phidot_t, psi_t, phipsi_t, sinc_filter, eps2):
    """Spectra of the envelope pair (z0, dz0) and the filtered psi derivative."""
    z0 = 0.5 * (phi_t - 1j * eps2 * phidot_t)
    z0dot = 0.5j * sinc_filter * z0
    psidot = -1j * sinc_filter * psi_t + 1j * phipsi_t
    return z0, z0dot, psidot


def build_products(z0, z0dot, psi, psidot):
    """The nine node-space rows transformed together mid-step."""
    rho = (psi.real**2 + psi.imag**2).astype(np.complex128)
    mixed = (np.conj(psi) * psidot).real.astype(np.complex128)
    r0dot = (-2.0 * z0dot.real).astype(np.complex128)
    return (
        rho,
        mixed,
        r0dot,
        z0 * psi,
        z0dot * psi,
        z0 * psidot,
        np.conj(z0) * psi,
        np.conj(z0dot) * psi,
        np.conj(z0) * psidot,
    )


def zr_update(
    z0_t,
    z0dot_t,
    r0dot_t,
    rho_t,
    mixed_t,
    a,
    b,
    a_dot,
    b_dot,
    p,
    q,
    p_dot,
    q_dot,
    sin_omega_over_omega,
    cos_omega,
    eps2,
):
    z1 = a * z0_t + eps2 * b * z0dot_t
    z1dot = a_dot * z0_t + eps2 * b_dot * z0dot_t
    r1 = sin_omega_over_omega * r0dot_t + p * rho_t + 2.0 * q * mixed_t
    r1dot = cos_omega * r0dot_t + p_dot * rho_t + 2.0 * q_dot * mixed_t
    return z1, z1dot, r1, r1dot


def psi_update(
    psi_t,
    psi_phase,
    c_plus,
    c_minus,
    d_plus,
    d_minus,
    z0psi_t,
    z0dotpsi_t,
    z0psidot_t,
    cz0psi_t,
    cz0dotpsi_t,
    cz0psidot_t,
):
    return (
        psi_phase * psi_t
        + c_plus * z0psi_t
        + d_plus * (z0dotpsi_t + z0psidot_t)
        + c_minus * cz0psi_t
        + d_minus * (cz0dotpsi_t + cz0psidot_t)
    )


def psi_finish(psi_partial_t, r1psi_t, r1psidot_t, tau):
    return psi_partial_t + 0.5j * tau * r1psi_t + 0.5j * tau**2 * r1psidot_t


def reconstruct(z1, z1dot, r1, r1dot, phase_plus, eps2):
    """Node-space meson pair plus the peak imaginary residue of each remainder."""
    phi = 2.0 * (phase_plus * z1).real + r1.real
    phidot = 2.0 * (phase_plus * (z1dot + (1j / eps2) * z1)).real + r1dot.real
    imag_r1 = float(np.max(np.abs(r1.imag))) if r1.size else 0.0
    imag_r1dot = float(np.max(np.abs(r1dot.imag))) if r1dot.size else 0.0
    return phi, phidot, imag_r1, imag_r1dot
