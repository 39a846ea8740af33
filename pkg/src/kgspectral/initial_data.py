"""Benchmark initial profiles.

The standard test problem used throughout the experiment drivers:

    psi0(x) = (1 + i)/2 * sech(x^2)
    phi0(x) = 1/2 * exp(-x^2)
    phi1(x) = 1/sqrt(2) * exp(-x^2)

sech is written in overflow-safe form so the tails at |x| ~ 32 underflow
cleanly to zero instead of tripping cosh overflow.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid
from .stepper import FieldState, init_state

__all__ = ["sech", "benchmark_psi0", "benchmark_phi0", "benchmark_phi1", "benchmark_state"]


def sech(x: np.ndarray) -> np.ndarray:
    """1/cosh(x), safe for large |x| (2 e^{-|x|} / (1 + e^{-2|x|}))."""
    t = np.abs(np.asarray(x, dtype=np.float64))
    e = np.exp(-t)
    return 2.0 * e / (1.0 + e * e)


def benchmark_psi0(x: np.ndarray) -> np.ndarray:
    return (0.5 + 0.5j) * sech(np.asarray(x, dtype=np.float64) ** 2)


def benchmark_phi0(x: np.ndarray) -> np.ndarray:
    return 0.5 * np.exp(-np.asarray(x, dtype=np.float64) ** 2)


def benchmark_phi1(x: np.ndarray) -> np.ndarray:
    return np.exp(-np.asarray(x, dtype=np.float64) ** 2) / np.sqrt(2.0)


def benchmark_state(grid: Grid, eps: float) -> FieldState:
    """Initial solver state for the standard test problem on grid."""
    x = grid.interior_nodes
    return init_state(benchmark_psi0(x), benchmark_phi0(x), benchmark_phi1(x), grid, eps)
