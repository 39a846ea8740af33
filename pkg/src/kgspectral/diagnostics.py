"""Conserved quantities, error norms, and convergence-rate bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, SpectralField, sobolev_norm, spectral_derivative
from .stepper import FieldState

__all__ = [
    "ErrorRecord",
    "mass",
    "energy",
    "error_h2",
    "error_energy_functional",
    "observed_orders",
]


@dataclass(frozen=True)
class ErrorRecord:
    """One convergence-table entry: H2 errors of a run against a reference."""

    eps: float
    tau: float
    h: float
    t: float
    err_phi_H2: float
    err_psi_H2: float
    err_phidot_H2_scaled: float

    def __post_init__(self):
        for name in ("err_phi_H2", "err_psi_H2", "err_phidot_H2_scaled"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be finite and nonnegative, got {v}")


def mass(psi, grid: Grid) -> float:
    """Discrete nucleon mass h * sum_j |psi_j|^2."""
    psi = np.asarray(psi)
    return float(grid.h * np.sum(psi.real**2 + psi.imag**2))


def energy(state: FieldState) -> float:
    """Discrete total energy.

    h-weighted nodal sum of
        (1/2) (eps^2 |PhiDot|^2 + |dPhi/dx|^2 + |Phi|^2/eps^2)
        + |dPsi/dx|^2 - |Psi|^2 Phi
    with the gradients evaluated spectrally.
    """
    grid = state.grid
    n = grid.N
    spec = np.fft.fft(np.stack([state.Phi.astype(np.complex128), state.Psi])) / n
    imu = 1j * np.fft.ifftshift(grid.mu)
    grads = np.fft.ifft(spec * imu) * n
    dphi, dpsi = grads
    eps2 = state.eps**2
    dens = 0.5 * (
        eps2 * state.PhiDot**2
        + dphi.real**2
        + dphi.imag**2
        + state.Phi**2 / eps2
    )
    dens += dpsi.real**2 + dpsi.imag**2
    dens -= (state.Psi.real**2 + state.Psi.imag**2) * state.Phi
    return float(grid.h * np.sum(dens))


def error_h2(numeric, reference, grid: Grid) -> float:
    """H2 norm of (numeric - reference) on grid.

    reference may live on a finer nested grid (its length an integer
    multiple of grid.N); it is then restricted by node subsampling.
    """
    numeric = np.asarray(numeric)
    reference = np.asarray(reference)
    if numeric.shape != (grid.N,):
        raise ValueError(f"numeric: expected {grid.N} node values, got {numeric.shape}")
    if reference.ndim != 1 or reference.size % grid.N:
        raise ValueError(
            f"reference length {reference.shape} is not an integer multiple "
            f"of the grid size {grid.N}"
        )
    stride = reference.size // grid.N
    diff = numeric - reference[::stride]
    coeffs = np.fft.fftshift(np.fft.fft(diff.astype(np.complex128)) / grid.N)
    return sobolev_norm(SpectralField(grid, coeffs), 2)


def error_energy_functional(
    e_phi: SpectralField, e_psi: SpectralField, e_phidot: SpectralField, eps: float
) -> float:
    """Weighted error functional

        eps^2 ||e_phidot||_{H2}^2 + ||d/dx e_phi||_{H2}^2
        + (1/eps^2) (||e_phi||_{H2}^2 + ||e_psi||_{H2}^2).

    Diagnostic only; not used by the convergence tables.
    """
    eps = float(eps)
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    eps2 = eps * eps
    return (
        eps2 * sobolev_norm(e_phidot, 2) ** 2
        + sobolev_norm(spectral_derivative(e_phi, 1), 2) ** 2
        + (sobolev_norm(e_phi, 2) ** 2 + sobolev_norm(e_psi, 2) ** 2) / eps2
    )


def observed_orders(errors, refinement_factor: float) -> np.ndarray:
    """Convergence rates log(err_{k-1}/err_k) / log(factor) between neighbors."""
    errors = np.asarray(errors, dtype=np.float64)
    if errors.ndim != 1 or errors.size < 2:
        raise ValueError("need at least two error values")
    if np.any(errors <= 0.0) or not np.all(np.isfinite(errors)):
        raise ValueError("errors must be positive and finite")
    factor = float(refinement_factor)
    if factor <= 1.0:
        raise ValueError(f"refinement factor must exceed 1, got {factor}")
    return np.log(errors[:-1] / errors[1:]) / np.log(factor)
