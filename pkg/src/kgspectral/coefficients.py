"""Per-mode exponential-integrator coefficients.

Everything the time integrator needs for one Fourier mode mu_l at
parameters (eps, tau) lives here: the frequencies

    omega_l   = sqrt(1 + mu_l^2 eps^2) / eps^2,
    lambda^+- = -(1 +- sqrt(1 + mu_l^2 eps^2)) / eps^2,

the homogeneous envelope propagator (a, b, a', b') solving the mode ODE
2i u' + eps^2 u'' + mu_l^2 u = 0, the oscillatory source weights
(p, q, p', q'), and the nucleon coupling weights (c^+-, d^+-) defined by

    c^+-(s) = i e^{-i mu^2 s} int_0^s e^{i (mu^2 +- 1/eps^2) theta} d theta,
    d^+-(s) = same integrand weighted by theta.

All closed forms are evaluated in cancellation-safe arrangements:

* lambda^- is computed as mu^2 / (1 + sqrt(1 + eps^2 mu^2)) (the algebraic
  conjugate of the defining difference, exact-cancellation-free);
* p, q, p', q' switch to short Taylor series when omega*tau is tiny,
  where 1 - cos and theta - sin would lose digits;
* c^-, d^- divide by (1 - eps^2 mu^2), which vanishes at the resonant
  mode eps*mu = 1; inside a narrow band around it they are evaluated by a
  Taylor expansion of the defining integral in delta = mu^2 - 1/eps^2.

A quadrature/ODE oracle re-derives all twelve coefficients from their
definitions with no shared code path, for validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .grid import Grid

__all__ = [
    "ModeFrequencies",
    "ModeCoefficients",
    "CoefficientTable",
    "QuadratureBudgetError",
    "mode_frequencies",
    "propagator_coeffs",
    "source_coeffs",
    "schrodinger_coeffs",
    "mode_coefficients",
    "coeff_quadrature_oracle",
    "build_coefficient_table",
    "reduced_phase",
    "RESONANCE_BAND",
    "SMALL_PHASE",
]

TWO_PI = 2.0 * math.pi

# |1 - eps^2 mu^2| below this: series branch for c^-, d^-.  Chosen so both
# branches agree to better than 1e-9 at the seam (worst-case truncation of
# the 3-term series at the band edge is ~2e-11 for tau <= 0.2, eps >= 1/8).
RESONANCE_BAND = 1e-4

# omega*tau below this: series branch for p, q, p', q'.
SMALL_PHASE = 1e-4


class QuadratureBudgetError(RuntimeError):
    """Adaptive panel quadrature could not reach the requested tolerance."""


def reduced_phase(x: float) -> float:
    """x modulo 2*pi, applied to large phase arguments before exponentiation."""
    return math.fmod(float(x), TWO_PI)


@dataclass(frozen=True)
class ModeFrequencies:
    eps: float
    mu_l: float
    omega_l: float
    lambda_plus: float
    lambda_minus: float


@dataclass(frozen=True)
class ModeCoefficients:
    """All twelve per-mode weights at time step tau."""

    freq: ModeFrequencies
    tau: float
    a: complex
    b: complex
    a_dot: complex
    b_dot: complex
    p: float
    q: float
    p_dot: float
    q_dot: float
    c_plus: complex
    c_minus: complex
    d_plus: complex
    d_minus: complex


# the twelve coefficient fields, in the order they appear in the update
_COEFF_NAMES = (
    "a",
    "b",
    "a_dot",
    "b_dot",
    "p",
    "q",
    "p_dot",
    "q_dot",
    "c_plus",
    "c_minus",
    "d_plus",
    "d_minus",
)


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    return eps


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if tau < 0.0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    return tau


def mode_frequencies(eps: float, mu_l: float) -> ModeFrequencies:
    eps = _check_eps(eps)
    mu_l = float(mu_l)
    omega, lam_p, lam_m = _frequencies(eps, mu_l)
    return ModeFrequencies(
        eps=eps,
        mu_l=mu_l,
        omega_l=float(omega),
        lambda_plus=float(lam_p),
        lambda_minus=float(lam_m),
    )


# ---------------------------------------------------------------------------
# Vectorized closed forms.  Scalars and arrays share these code paths, so the
# per-mode API and the per-grid tables cannot drift apart.
# ---------------------------------------------------------------------------


def _frequencies(eps, mu):
    root = np.sqrt(1.0 + (eps * mu) ** 2)
    omega = root / eps**2
    lam_plus = -(1.0 + root) / eps**2
    # -(1 - root)/eps^2 rearranged to avoid the 1 - sqrt(1 + small) cancellation
    lam_minus = mu**2 / (1.0 + root)
    return omega, lam_plus, lam_minus


def _propagator(eps, lam_plus, lam_minus, tau):
    ep = np.exp(1j * tau * lam_plus)
    em = np.exp(1j * tau * lam_minus)
    gap = lam_plus - lam_minus  # = -2 sqrt(1 + eps^2 mu^2)/eps^2, never zero
    a = (lam_plus * em - lam_minus * ep) / gap
    b = 1j * (em - ep) / (eps**2 * gap)
    a_dot = 1j * lam_plus * lam_minus * (em - ep) / gap
    b_dot = (lam_plus * ep - lam_minus * em) / (eps**2 * gap)
    return a, b, a_dot, b_dot


def _source(eps, omega, tau):
    theta = omega * tau
    eps2 = eps**2
    with np.errstate(invalid="ignore"):
        p = (1.0 - np.cos(theta)) / (eps2 * omega**2)
        p_dot = np.sin(theta) / (eps2 * omega)
        q = (tau * omega - np.sin(theta)) / (eps2 * omega**3)
    small = theta < SMALL_PHASE
    if np.any(small):
        th2 = theta**2
        # (1 - cos t)/t^2, (t - sin t)/t^3, sin(t)/t
        g1 = 0.5 - th2 / 24.0 + th2**2 / 720.0 - th2**3 / 40320.0
        g2 = 1.0 / 6.0 - th2 / 120.0 + th2**2 / 5040.0 - th2**3 / 362880.0
        g3 = 1.0 - th2 / 6.0 + th2**2 / 120.0 - th2**3 / 5040.0
        p = np.where(small, g1 * tau**2 / eps2, p)
        q = np.where(small, g2 * tau**3 / eps2, q)
        p_dot = np.where(small, g3 * tau / eps2, p_dot)
    q_dot = p  # identical closed forms
    return p, q, p_dot, q_dot


def _schrodinger(eps, mu, tau):
    eps2 = eps**2
    r = eps2 * mu**2
    phase_psi = np.exp(-1j * mu**2 * tau)  # e^{-i mu^2 tau}
    e_fast_p = np.exp(1j * tau / eps2)  # e^{+i tau/eps^2}
    e_fast_m = np.conj(e_fast_p)

    c_plus = eps2 * phase_psi * (np.exp(1j * tau * (mu**2 + 1.0 / eps2)) - 1.0) / (
        1.0 + r
    )
    d_plus = (
        1j
        * eps2
        / (1.0 + r) ** 2
        * (e_fast_p * (eps2 - 1j * tau * (1.0 + r)) - eps2 * phase_psi)
    )

    one_minus = 1.0 - r
    resonant = np.abs(one_minus) < RESONANCE_BAND
    safe = np.where(resonant, 1.0, one_minus)
    with np.errstate(invalid="ignore"):
        c_minus = eps2 * (phase_psi - e_fast_m) / safe
        d_minus = (
            1j
            * eps2
            / safe**2
            * (e_fast_m * (eps2 - 1j * tau * (r - 1.0)) - eps2 * phase_psi)
        )
    if np.any(resonant):
        # Taylor expansion of the defining integrals in delta = mu^2 - 1/eps^2:
        #   int_0^tau e^{i delta th} d th        = tau + i delta tau^2/2 - delta^2 tau^3/6 + ...
        #   int_0^tau th e^{i delta th} d th     = tau^2/2 + i delta tau^3/3 - delta^2 tau^4/8 + ...
        delta = mu**2 - 1.0 / eps2
        c_res = phase_psi * (
            1j * tau - delta * tau**2 / 2.0 - 1j * delta**2 * tau**3 / 6.0
        )
        d_res = 1j * phase_psi * (
            tau**2 / 2.0 + 1j * delta * tau**3 / 3.0 - delta**2 * tau**4 / 8.0
        )
        c_minus = np.where(resonant, c_res, c_minus)
        d_minus = np.where(resonant, d_res, d_minus)
    return c_plus, c_minus, d_plus, d_minus


# ---------------------------------------------------------------------------
# Per-mode API.
# ---------------------------------------------------------------------------


def propagator_coeffs(
    freq: ModeFrequencies, tau: float
) -> tuple[complex, complex, complex, complex]:
    """(a, b, a', b') at s = tau: u(tau) = a u(0) + eps^2 b u'(0), etc."""
    tau = _check_tau(tau)
    a, b, a_dot, b_dot = _propagator(
        freq.eps, freq.lambda_plus, freq.lambda_minus, tau
    )
    return complex(a), complex(b), complex(a_dot), complex(b_dot)


def source_coeffs(
    freq: ModeFrequencies, tau: float
) -> tuple[float, float, float, float]:
    """(p, q, p', q') at s = tau; q' == p identically."""
    tau = _check_tau(tau)
    p, q, p_dot, q_dot = _source(freq.eps, np.float64(freq.omega_l), tau)
    return float(p), float(q), float(p_dot), float(q_dot)


def schrodinger_coeffs(
    freq: ModeFrequencies, tau: float
) -> tuple[complex, complex, complex, complex]:
    """(c^+, c^-, d^+, d^-) at s = tau, resonance-safe."""
    tau = _check_tau(tau)
    c_p, c_m, d_p, d_m = _schrodinger(freq.eps, np.float64(freq.mu_l), tau)
    return complex(c_p), complex(c_m), complex(d_p), complex(d_m)


def mode_coefficients(freq: ModeFrequencies, tau: float) -> ModeCoefficients:
    """All twelve closed-form coefficients bundled."""
    a, b, a_dot, b_dot = propagator_coeffs(freq, tau)
    p, q, p_dot, q_dot = source_coeffs(freq, tau)
    c_p, c_m, d_p, d_m = schrodinger_coeffs(freq, tau)
    return ModeCoefficients(
        freq=freq,
        tau=float(tau),
        a=a,
        b=b,
        a_dot=a_dot,
        b_dot=b_dot,
        p=p,
        q=q,
        p_dot=p_dot,
        q_dot=q_dot,
        c_plus=c_p,
        c_minus=c_m,
        d_plus=d_p,
        d_minus=d_m,
    )


# ---------------------------------------------------------------------------
# Independent oracle: adaptive panel quadrature of the defining integrals for
# the eight source/coupling weights, high-order ODE integration for the four
# propagator entries.  Shares no arithmetic with the closed forms above.
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)
_GL_NODES = (_GL_NODES + 1.0) / 2.0  # map to [0, 1]
_GL_WEIGHTS = _GL_WEIGHTS / 2.0

_QUAD_TOL = 1e-13
_MAX_PANELS = 1 << 19


def _panel_integral(f, upper: float, n_panels: int) -> complex:
    edges = np.linspace(0.0, upper, n_panels + 1)
    widths = np.diff(edges)
    pts = edges[:-1, None] + widths[:, None] * _GL_NODES[None, :]
    vals = f(pts)
    return complex(np.sum(vals * (widths[:, None] * _GL_WEIGHTS[None, :])))


def _adaptive_integral(f, upper: float, phase_rate: float) -> complex:
    """Integrate f over [0, upper], resolving oscillation rate phase_rate.

    Starts at >= 4 Gauss-Legendre panels (10 points each) per oscillation
    period and doubles until two successive refinements agree to _QUAD_TOL
    absolutely, within a hard panel budget.
    """
    if upper == 0.0:
        return 0.0 + 0.0j
    periods = abs(phase_rate) * upper / TWO_PI
    n = max(4, 4 * math.ceil(periods))
    prev = _panel_integral(f, upper, n)
    residual = math.inf
    while 2 * n <= _MAX_PANELS:
        n *= 2
        cur = _panel_integral(f, upper, n)
        residual = abs(cur - prev)
        if residual <= _QUAD_TOL:
            return cur
        prev = cur
    raise QuadratureBudgetError(
        f"panel budget {_MAX_PANELS} exhausted at residual "
        f"{residual:.3e} (target {_QUAD_TOL:.0e})"
    )


def _ode_propagator(freq: ModeFrequencies, tau: float):
    """(a, b, a', b') by integrating 2i u' + eps^2 u'' + mu^2 u = 0."""
    eps2 = freq.eps**2
    mu2 = freq.mu_l**2

    def rhs(_t, y):
        # y = (Re u, Im u, Re u', Im u'); u'' = (-2i u' - mu^2 u)/eps^2
        u = y[0] + 1j * y[1]
        v = y[2] + 1j * y[3]
        w = (-2j * v - mu2 * u) / eps2
        return [v.real, v.imag, w.real, w.imag]

    def endpoint(u0: complex, v0: complex) -> tuple[complex, complex]:
        sol = solve_ivp(
            rhs,
            (0.0, tau),
            [u0.real, u0.imag, v0.real, v0.imag],
            method="DOP853",
            rtol=1e-13,
            atol=1e-14,
        )
        if not sol.success:
            raise RuntimeError(f"mode-ODE oracle failed: {sol.message}")
        y = sol.y[:, -1]
        return y[0] + 1j * y[1], y[2] + 1j * y[3]

    ua, va = endpoint(1.0 + 0j, 0.0 + 0j)  # u(0)=1, u'(0)=0
    ub, vb = endpoint(0.0 + 0j, 1.0 + 0j)  # u(0)=0, u'(0)=1
    return ua, ub / eps2, va, vb / eps2


def coeff_quadrature_oracle(freq: ModeFrequencies, tau: float) -> ModeCoefficients:
    """All twelve coefficients re-derived from their definitions numerically."""
    tau = _check_tau(tau)
    eps = freq.eps
    eps2 = eps**2
    omega = freq.omega_l
    mu2 = freq.mu_l**2

    if tau == 0.0:
        return ModeCoefficients(
            freq=freq,
            tau=0.0,
            a=1.0 + 0j,
            b=0.0 + 0j,
            a_dot=0.0 + 0j,
            b_dot=1.0 / eps2 + 0j,
            p=0.0,
            q=0.0,
            p_dot=0.0,
            q_dot=0.0,
            c_plus=0j,
            c_minus=0j,
            d_plus=0j,
            d_minus=0j,
        )

    a, b, a_dot, b_dot = _ode_propagator(freq, tau)

    p = _adaptive_integral(
        lambda th: np.sin(omega * (tau - th)) / (eps2 * omega), tau, omega
    )
    p_dot = _adaptive_integral(lambda th: np.cos(omega * (tau - th)) / eps2, tau, omega)
    q = _adaptive_integral(
        lambda th: th * np.sin(omega * (tau - th)) / (eps2 * omega), tau, omega
    )
    q_dot = _adaptive_integral(
        lambda th: th * np.cos(omega * (tau - th)) / eps2, tau, omega
    )

    rate_p = mu2 + 1.0 / eps2
    rate_m = mu2 - 1.0 / eps2
    front = 1j * np.exp(-1j * mu2 * tau)
    c_plus = front * _adaptive_integral(
        lambda th: np.exp(1j * rate_p * th), tau, rate_p
    )
    c_minus = front * _adaptive_integral(
        lambda th: np.exp(1j * rate_m * th), tau, rate_m
    )
    d_plus = front * _adaptive_integral(
        lambda th: th * np.exp(1j * rate_p * th), tau, rate_p
    )
    d_minus = front * _adaptive_integral(
        lambda th: th * np.exp(1j * rate_m * th), tau, rate_m
    )

    return ModeCoefficients(
        freq=freq,
        tau=tau,
        a=complex(a),
        b=complex(b),
        a_dot=complex(a_dot),
        b_dot=complex(b_dot),
        p=p.real,
        q=q.real,
        p_dot=p_dot.real,
        q_dot=q_dot.real,
        c_plus=complex(c_plus),
        c_minus=complex(c_minus),
        d_plus=complex(d_plus),
        d_minus=complex(d_minus),
    )


# ---------------------------------------------------------------------------
# Whole-grid table: every per-mode weight the stepper consumes, precomputed
# once per (grid, eps, tau) in the FFT's natural mode layout.
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    grid: Grid
    eps: float
    tau: float
    # natural (FFT) mode order throughout
    a: np.ndarray
    b: np.ndarray
    a_dot: np.ndarray
    b_dot: np.ndarray
    p: np.ndarray
    q: np.ndarray
    p_dot: np.ndarray
    q_dot: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray
    d_plus: np.ndarray
    d_minus: np.ndarray
    sinc_filter: np.ndarray  # sin(mu^2 tau)/tau
    sin_omega_over_omega: np.ndarray  # sin(omega tau)/omega
    cos_omega: np.ndarray  # cos(omega tau)
    omega_sin: np.ndarray  # omega sin(omega tau)
    psi_phase: np.ndarray  # e^{-i mu^2 tau}
    phase_plus: complex  # e^{+i tau/eps^2}, argument reduced mod 2 pi


def build_coefficient_table(grid: Grid, eps: float, tau: float) -> CoefficientTable:
    eps = _check_eps(eps)
    tau = float(tau)
    if tau <= 0.0:
        raise ValueError(f"time step must be positive, got {tau}")
    mu = np.fft.ifftshift(grid.mu)
    omega, lam_p, lam_m = _frequencies(eps, mu)
    a, b, a_dot, b_dot = _propagator(eps, lam_p, lam_m, tau)
    p, q, p_dot, q_dot = _source(eps, omega, tau)
    c_plus, c_minus, d_plus, d_minus = _schrodinger(eps, mu, tau)
    wt = omega * tau
    table = CoefficientTable(
        grid=grid,
        eps=eps,
        tau=tau,
        a=a,
        b=b,
        a_dot=a_dot,
        b_dot=b_dot,
        p=p,
        q=q,
        p_dot=p_dot,
        q_dot=q_dot,
        c_plus=c_plus,
        c_minus=c_minus,
        d_plus=d_plus,
        d_minus=d_minus,
        sinc_filter=np.sin(mu**2 * tau) / tau,
        sin_omega_over_omega=np.sin(wt) / omega,
        cos_omega=np.cos(wt),
        omega_sin=omega * np.sin(wt),
        psi_phase=np.exp(-1j * mu**2 * tau),
        phase_plus=complex(np.exp(1j * reduced_phase(tau / eps**2))),
    )
    for name in (
        "a",
        "b",
        "a_dot",
        "b_dot",
        "p",
        "q",
        "p_dot",
        "q_dot",
        "c_plus",
        "c_minus",
        "d_plus",
        "d_minus",
        "sinc_filter",
        "sin_omega_over_omega",
        "cos_omega",
        "omega_sin",
        "psi_phase",
    ):
        getattr(table, name).flags.writeable = False
    return table
