"""Periodic uniform grid and the discrete Fourier machinery built on it.

A field v on the grid is represented either by its node values
(v_0, ..., v_{N-1}) -- the value at x_N is identified with x_0 by
periodicity -- or by Fourier coefficients

    v~_l = (1/N) * sum_j v_j exp(-i mu_l (x_j - a)),   mu_l = 2 pi l / (b - a),

for l = -N/2, ..., N/2-1, so that v_j = sum_l v~_l exp(i mu_l (x_j - a)).
Coefficients are stored in increasing-l ("mode") order; conversion to the
FFT library's natural layout happens at this module's boundary and nowhere
else.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

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
]


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform periodic grid on [a, b] with N intervals.

    nodes holds the N+1 points x_j = a + j*h (x_N = b included for
    completeness; fields carry N values, one per interval start).
    modes/mu are in mode order l = -N/2, ..., N/2-1.
    """

    a: float
    b: float
    N: int
    h: float
    nodes: np.ndarray
    modes: np.ndarray
    mu: np.ndarray

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def interior_nodes(self) -> np.ndarray:
        """The N nodes fields live on (x_N dropped)."""
        return self.nodes[:-1]


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a grid field, mode order l = -N/2..N/2-1."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.grid.N,):
            raise ValueError(
                f"expected {self.grid.N} coefficients, got shape {c.shape}"
            )
        object.__setattr__(self, "coeffs", _readonly(c.copy()))


def make_grid(a: float, b: float, N: int) -> Grid:
    if b <= a:
        raise ValueError(f"need b > a, got [{a}, {b}]")
    if N != int(N) or N < 4 or N % 2:
        raise ValueError(f"N must be an even integer >= 4, got {N}")
    N = int(N)
    a = float(a)
    b = float(b)
    h = (b - a) / N
    nodes = a + h * np.arange(N + 1)
    modes = np.arange(-(N // 2), N // 2)
    mu = 2.0 * np.pi * modes / (b - a)
    return Grid(
        a=a,
        b=b,
        N=N,
        h=h,
        nodes=_readonly(nodes),
        modes=_readonly(modes),
        mu=_readonly(mu),
    )


def forward_transform(node_values: np.ndarray, grid: Grid) -> SpectralField:
    """Node values -> Fourier coefficients v~_l (mode order)."""
    v = np.asarray(node_values, dtype=np.complex128)
    if v.shape != (grid.N,):
        raise ValueError(f"expected {grid.N} node values, got shape {v.shape}")
    # fft gives sum_j v_j e^{-2 pi i k j / N}; shifting k -> l and dividing
    # by N realizes the stated convention exactly.
    return SpectralField(grid, np.fft.fftshift(np.fft.fft(v)) / grid.N)


def inverse_transform(field: SpectralField) -> np.ndarray:
    """Fourier coefficients -> the N node values v_j."""
    return np.fft.ifft(np.fft.ifftshift(field.coeffs)) * field.grid.N


def spectral_derivative(field: SpectralField, order: int) -> SpectralField:
    """d^order/dx^order: multiply coefficient l by (i mu_l)^order."""
    if order != int(order) or order < 1:
        raise ValueError(f"order must be a positive integer, got {order}")
    factor = (1j * field.grid.mu) ** int(order)
    return SpectralField(field.grid, field.coeffs * factor)


def filtered_laplacian(field: SpectralField, tau: float) -> SpectralField:
    """Regularized second derivative: multiply coefficient l by -sin(mu_l^2 tau)/tau.

    For mu_l^2 tau -> 0 this approaches the plain Laplacian multiplier
    -mu_l^2; the sine cap is what keeps the time integrator's error
    constants bounded for all mesh/step combinations.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    mu = field.grid.mu
    return SpectralField(field.grid, field.coeffs * (-np.sin(mu * mu * tau) / tau))


def pointwise_product(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Nodal (collocation) product; transform afterwards if coefficients are needed."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    return u * v


def sobolev_norm(field: SpectralField, s: int) -> float:
    """Spectral H^s norm, s in {0,1,2}.

    sqrt( (b-a) * sum_l (1 + mu_l^2 + ... + mu_l^{2s}) |v~_l|^2 );
    s=0 reduces to the L^2 norm (h * sum_j |v_j|^2)^{1/2} by Parseval.
    """
    if s not in (0, 1, 2):
        raise ValueError(f"s must be 0, 1, or 2, got {s}")
    mu2 = field.grid.mu**2
    weight = np.ones_like(mu2)
    if s >= 1:
        weight += mu2
    if s == 2:
        weight += mu2 * mu2
    total = np.sum(weight * np.abs(field.coeffs) ** 2)
    return float(np.sqrt(field.grid.length * total))
