import math

import numpy as np
import pytest

from kgspectral import (
    QuadratureBudgetError,
    build_coefficient_table,
    coeff_quadrature_oracle,
    make_grid,
    mode_coefficients,
    mode_frequencies,
    propagator_coeffs,
    reduced_phase,
    schrodinger_coeffs,
    source_coeffs,
)
from kgspectral.coefficients import RESONANCE_BAND, _adaptive_integral


def test_frequencies_mu_zero():
    f = mode_frequencies(1.0, 0.0)
    assert (f.omega_l, f.lambda_plus, f.lambda_minus) == (1.0, -2.0, 0.0)
    f = mode_frequencies(0.5, 0.0)
    assert (f.omega_l, f.lambda_plus, f.lambda_minus) == (4.0, -8.0, 0.0)


def test_frequencies_high_precision_point():
    # frozen from a 40-digit evaluation of the radical expressions at the
    # float64 inputs eps=1/4, mu=float64(pi/32)
    f = mode_frequencies(0.25, np.pi / 32.0)
    assert f.omega_l == pytest.approx(16.004818417238198, rel=1e-14)
    assert f.lambda_plus == pytest.approx(-32.004818417238198, rel=1e-14)
    assert f.lambda_minus == pytest.approx(4.81841723819812036e-3, rel=1e-14)


@pytest.mark.parametrize("eps", [1.0, 0.5, 0.25, 0.03125])
@pytest.mark.parametrize("mu", [0.0, np.pi / 32, 1.0, 4.0, 40.0])
def test_frequency_identities(eps, mu):
    f = mode_frequencies(eps, mu)
    # roots of the quadratic eps^2 lam^2 + 2 lam - mu^2 = 0
    assert f.lambda_plus + f.lambda_minus == pytest.approx(-2.0 / eps**2, rel=1e-13)
    assert f.lambda_plus * f.lambda_minus == pytest.approx(
        -(mu**2) / eps**2, rel=1e-13, abs=1e-300
    )
    assert eps**2 * f.omega_l >= 1.0
    if mu == 0.0:
        assert f.omega_l == 1.0 / eps**2
    else:
        assert f.omega_l > 1.0 / eps**2


def test_frequency_lemma_bounds_on_grid_modes():
    grid = make_grid(-32.0, 32.0, 1024)
    for eps in (1.0, 0.125, 2.0**-9):
        for mu in (grid.mu[0], grid.mu[-1], grid.mu[513]):
            f = mode_frequencies(eps, float(mu))
            assert 1.0 / (eps**2 * f.omega_l) <= 1.0 + 1e-15
            assert abs(mu) / (eps**2 * f.omega_l) <= 1.0 / eps + 1e-15


def test_frequencies_reject_bad_eps():
    with pytest.raises(ValueError):
        mode_frequencies(0.0, 1.0)
    with pytest.raises(ValueError):
        mode_frequencies(1.5, 1.0)


def test_propagator_identity_at_tiny_tau():
    f = mode_frequencies(0.5, 3.0)
    a, b, a_dot, b_dot = propagator_coeffs(f, 1e-12)
    assert a == pytest.approx(1.0, abs=1e-9)
    assert abs(b) < 1e-9
    assert abs(a_dot) < 1e-9
    assert f.eps**2 * b_dot == pytest.approx(1.0, abs=1e-9)


def test_propagator_mu_zero_branch():
    f = mode_frequencies(1.0, 0.0)
    for tau in (0.05, 0.7):
        a, b, _, _ = propagator_coeffs(f, tau)
        assert a == pytest.approx(1.0, abs=1e-15)
        assert b == pytest.approx(1j * (np.exp(-2j * tau) - 1.0) / 2.0, abs=1e-15)


def test_propagator_matches_ode_oracle():
    f = mode_frequencies(0.5, 2.0)
    closed = mode_coefficients(f, 0.1)
    oracle = coeff_quadrature_oracle(f, 0.1)
    for name in ("a", "b", "a_dot", "b_dot"):
        assert abs(getattr(closed, name) - getattr(oracle, name)) < 1e-10


def test_propagator_exactness_random_draws(rng):
    # the (a, b; a', b') matrix must propagate the mode ODE itself: check
    # u(tau) against the high-order ODE oracle on random data
    for _ in range(1000):
        eps = float(np.exp(rng.uniform(np.log(0.05), 0.0)))
        mu = float(rng.uniform(0.0, 6.0))
        tau = float(np.exp(rng.uniform(np.log(1e-3), np.log(0.2))))
        f = mode_frequencies(eps, mu)
        a, b, a_dot, b_dot = propagator_coeffs(f, tau)
        oracle = coeff_quadrature_oracle(f, tau)
        u0 = complex(rng.standard_normal(), rng.standard_normal())
        v0 = complex(rng.standard_normal(), rng.standard_normal())
        u_closed = a * u0 + eps**2 * b * v0
        u_oracle = oracle.a * u0 + eps**2 * oracle.b * v0
        v_closed = a_dot * u0 + eps**2 * b_dot * v0
        v_oracle = oracle.a_dot * u0 + eps**2 * oracle.b_dot * v0
        scale_u = max(abs(u_oracle), 1e-30)
        scale_v = max(abs(v_oracle), 1e-30)
        assert abs(u_closed - u_oracle) / scale_u < 1e-9
        assert abs(v_closed - v_oracle) / scale_v < 1e-9


def test_propagator_semigroup(rng):
    for _ in range(50):
        eps = float(np.exp(rng.uniform(np.log(0.01), 0.0)))
        mu = float(rng.uniform(0.0, 8.0))
        tau = float(np.exp(rng.uniform(np.log(1e-4), np.log(0.1))))
        f = mode_frequencies(eps, mu)
        eps2 = eps**2
        a, b, a_dot, b_dot = propagator_coeffs(f, tau)
        single = np.array([[a, eps2 * b], [a_dot, eps2 * b_dot]])
        a2, b2, a2_dot, b2_dot = propagator_coeffs(f, 2.0 * tau)
        double = np.array([[a2, eps2 * b2], [a2_dot, eps2 * b2_dot]])
        np.testing.assert_allclose(single @ single, double, rtol=0, atol=1e-11 * np.max(np.abs(double)))


def test_source_vanishes_at_tiny_tau():
    f = mode_frequencies(1.0, 1.0)
    assert all(abs(v) <= 1e-11 for v in source_coeffs(f, 1e-12))


def test_source_qdot_equals_p():
    for eps in (1.0, 0.125, 2.0**-8):
        for mu in (0.0, 1.0, 30.0):
            f = mode_frequencies(eps, mu)
            for tau in (0.2, 1e-3, 1e-7):
                p, _, _, q_dot = source_coeffs(f, tau)
                assert q_dot == p  # same closed form, bitwise


def test_source_matches_quadrature():
    f = mode_frequencies(0.25, 1.0)
    closed = mode_coefficients(f, 0.05)
    oracle = coeff_quadrature_oracle(f, 0.05)
    for name in ("p", "q", "p_dot", "q_dot"):
        assert abs(getattr(closed, name) - getattr(oracle, name)) < 1e-11


def test_source_small_phase_branch_consistency():
    # seam check: just below the series switch the package takes the Taylor
    # branch; the trig closed forms evaluated here must agree. Just above it
    # takes the trig branch; the (machine-exact at this theta) series must
    # agree. Together: no jump at the seam.
    f = mode_frequencies(1.0, 0.0)  # omega = 1, eps = 1

    def trig(tau):
        return (1.0 - math.cos(tau), (tau - math.sin(tau)), math.sin(tau), 0.0)

    def series(tau):
        th2 = tau * tau
        p = tau**2 * (0.5 - th2 / 24.0 + th2**2 / 720.0)
        q = tau**3 * (1.0 / 6.0 - th2 / 120.0 + th2**2 / 5040.0)
        return (p, q, tau * (1.0 - th2 / 6.0 + th2**2 / 120.0), p)

    below = 0.99e-4
    p, q, p_dot, _ = source_coeffs(f, below)
    assert p == pytest.approx(trig(below)[0], rel=1e-6)
    assert q == pytest.approx(trig(below)[1], rel=1e-6)
    assert p_dot == pytest.approx(trig(below)[2], rel=1e-9)

    above = 1.01e-4
    p, q, p_dot, _ = source_coeffs(f, above)
    assert p == pytest.approx(series(above)[0], rel=1e-6)
    assert q == pytest.approx(series(above)[1], rel=1e-6)
    assert p_dot == pytest.approx(series(above)[2], rel=1e-9)


def test_schrodinger_vanishes_at_tiny_tau():
    f = mode_frequencies(0.5, 1.5)
    assert all(abs(v) <= 1e-11 for v in schrodinger_coeffs(f, 1e-12))


def test_schrodinger_exact_resonance():
    # eps*mu = 1: the defining integral collapses to i tau e^{-i mu^2 tau}
    eps = 0.5
    mu = 2.0
    tau = 0.1
    f = mode_frequencies(eps, mu)
    _, c_minus, _, d_minus = schrodinger_coeffs(f, tau)
    phase = np.exp(-1j * mu**2 * tau)
    assert c_minus == pytest.approx(1j * tau * phase, abs=1e-12)
    assert d_minus == pytest.approx(0.5j * tau**2 * phase, abs=1e-12)


def test_schrodinger_resonance_band_vs_quadrature():
    f = mode_frequencies(0.5, 2.0 * (1.0 + 1e-6))
    closed = mode_coefficients(f, 0.1)
    oracle = coeff_quadrature_oracle(f, 0.1)
    for name in ("c_plus", "c_minus", "d_plus", "d_minus"):
        assert abs(getattr(closed, name) - getattr(oracle, name)) < 1e-9


def test_schrodinger_resonance_branch_continuity():
    # points just inside and just outside the band, both signs of 1-eps^2mu^2:
    # each branch is anchored to the quadrature oracle within 5e-10, so the
    # jump across the seam is at most 1e-9 (the trig branch's d^- divides by
    # (1-eps^2mu^2)^2 ~ 1e-8 at the edge, which sets the noise floor)
    eps = 0.5
    tau = 0.1
    for sign in (+1.0, -1.0):
        for scale in (0.999, 1.001):
            r = 1.0 - sign * scale * RESONANCE_BAND
            f = mode_frequencies(eps, math.sqrt(r) / eps)
            closed = schrodinger_coeffs(f, tau)
            oracle = coeff_quadrature_oracle(f, tau)
            assert abs(closed[1] - oracle.c_minus) < 5e-10
            assert abs(closed[3] - oracle.d_minus) < 5e-10


def test_schrodinger_modulus_bounds(rng):
    for _ in range(200):
        eps = float(np.exp(rng.uniform(np.log(0.01), 0.0)))
        mu = float(rng.uniform(0.0, 20.0))
        tau = float(np.exp(rng.uniform(np.log(1e-4), np.log(0.2))))
        c_p, c_m, d_p, d_m = schrodinger_coeffs(mode_frequencies(eps, mu), tau)
        slack = 1.0 + 1e-9
        assert abs(c_p) <= tau * slack
        assert abs(c_m) <= tau * slack
        assert abs(d_p) <= tau**2 / 2.0 * slack
        assert abs(d_m) <= tau**2 / 2.0 * slack


def test_oracle_tau_zero_is_identity():
    f = mode_frequencies(0.5, 1.0)
    c = coeff_quadrature_oracle(f, 0.0)
    assert (c.a, c.b, c.a_dot) == (1.0, 0.0, 0.0)
    assert c.b_dot == pytest.approx(1.0 / f.eps**2)
    assert (c.p, c.q, c.p_dot, c.q_dot) == (0.0, 0.0, 0.0, 0.0)
    assert (c.c_plus, c.c_minus, c.d_plus, c.d_minus) == (0j, 0j, 0j, 0j)


def test_oracle_budget_error():
    # a nonsmooth integrand can never reach the 1e-13 self-agreement target
    def jagged(theta):
        return np.sign(np.sin(5000.0 * theta)) + 0.1

    with pytest.raises(QuadratureBudgetError, match="panel budget"):
        _adaptive_integral(jagged, 1.0, 0.0)


def test_reduced_phase():
    assert reduced_phase(0.3) == 0.3
    assert reduced_phase(2.0 * math.pi) == pytest.approx(0.0, abs=1e-15)
    assert abs(reduced_phase(12345.678)) < 2.0 * math.pi
    # exponentiating the reduced argument matches the plain phase
    x = 987.125
    assert np.exp(1j * reduced_phase(x)) == pytest.approx(np.exp(1j * (x % (2 * math.pi))), abs=1e-12)


def test_table_matches_per_mode_values():
    grid = make_grid(-32.0, 32.0, 16)
    eps, tau = 0.25, 0.05
    table = build_coefficient_table(grid, eps, tau)
    mu_natural = np.fft.ifftshift(grid.mu)
    for idx in (0, 3, 8, 15):
        f = mode_frequencies(eps, float(mu_natural[idx]))
        c = mode_coefficients(f, tau)
        for name in ("a", "b", "a_dot", "b_dot", "p", "q", "p_dot", "q_dot",
                     "c_plus", "c_minus", "d_plus", "d_minus"):
            assert getattr(table, name)[idx] == pytest.approx(
                getattr(c, name), rel=1e-13, abs=1e-300
            ), name


def test_table_auxiliary_columns():
    grid = make_grid(-32.0, 32.0, 8)
    eps, tau = 0.5, 0.01
    table = build_coefficient_table(grid, eps, tau)
    mu = np.fft.ifftshift(grid.mu)
    omega = np.sqrt(1.0 + (eps * mu) ** 2) / eps**2
    np.testing.assert_allclose(table.sinc_filter, np.sin(mu**2 * tau) / tau, rtol=1e-14)
    np.testing.assert_allclose(table.cos_omega, np.cos(omega * tau), rtol=1e-14)
    np.testing.assert_allclose(table.omega_sin, omega * np.sin(omega * tau), rtol=1e-14)
    np.testing.assert_allclose(table.psi_phase, np.exp(-1j * mu**2 * tau), rtol=1e-14)
    assert table.phase_plus == pytest.approx(np.exp(1j * (tau / eps**2)), abs=1e-13)


def test_table_is_frozen():
    grid = make_grid(-1.0, 1.0, 8)
    table = build_coefficient_table(grid, 1.0, 0.1)
    with pytest.raises(ValueError):
        table.a[0] = 0.0


def test_table_rejects_nonpositive_tau():
    grid = make_grid(-1.0, 1.0, 8)
    with pytest.raises(ValueError):
        build_coefficient_table(grid, 1.0, 0.0)
    with pytest.raises(ValueError):
        build_coefficient_table(grid, 1.0, -0.1)
