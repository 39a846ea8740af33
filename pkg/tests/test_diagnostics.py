import numpy as np
import pytest

from kgspectral import benchmark_state, init_state, make_grid
from kgspectral.diagnostics import (
    ErrorRecord,
    energy,
    error_energy_functional,
    error_h2,
    mass,
    observed_orders,
)
from kgspectral.grid import SpectralField, forward_transform
from kgspectral.limits import propagate_free_psi

from naive_impls import naive_dft, naive_error_energy


def test_mass_zero():
    grid = make_grid(-32.0, 32.0, 64)
    assert mass(np.zeros(64, dtype=complex), grid) == 0.0


def test_mass_of_unit_field_is_domain_length():
    grid = make_grid(-32.0, 32.0, 128)
    assert mass(np.ones(128, dtype=complex), grid) == pytest.approx(64.0, rel=1e-15)


def test_mass_benchmark_golden_value():
    grid = make_grid(-32.0, 32.0, 2048)
    state = benchmark_state(grid, 0.5)
    assert mass(state.Psi, grid) == pytest.approx(0.9527814706107520, rel=1e-14)


def test_energy_zero_state():
    grid = make_grid(-32.0, 32.0, 32)
    zero = np.zeros(32)
    state = init_state(zero.astype(complex), zero, zero, grid, 1.0)
    assert energy(state) == 0.0


def test_energy_constant_meson():
    # psi = 0, Phi = c, PhiDot = 0, eps = 1: only the (1/2) Phi^2 term
    grid = make_grid(-32.0, 32.0, 64)
    c = 0.7
    state = init_state(
        np.zeros(64, dtype=complex), np.full(64, c), np.zeros(64), grid, 1.0
    )
    assert energy(state) == pytest.approx(0.5 * c**2 * 64.0, rel=1e-13)


def test_energy_benchmark_golden_values():
    grid = make_grid(-32.0, 32.0, 2048)
    assert energy(benchmark_state(grid, 1.0)) == pytest.approx(
        0.9825471825159506, rel=1e-13
    )
    assert energy(benchmark_state(grid, 0.5)) == pytest.approx(
        2.3925255869958884, rel=1e-13
    )


def test_energy_invariant_under_free_nucleon_flow(rng):
    # with Phi = PhiDot = 0 the energy is the kinetic term alone, and the
    # free flow only rotates mode phases
    grid = make_grid(-32.0, 32.0, 64)
    x = grid.interior_nodes
    psi0 = np.exp(-(x**2)) * (1.0 + 0.4j)
    zero = np.zeros(64)
    before = init_state(psi0, zero, zero, grid, 0.5)
    after = init_state(propagate_free_psi(psi0, grid, 1.7), zero, zero, grid, 0.5)
    assert energy(after) == pytest.approx(energy(before), rel=1e-12)


def test_error_h2_identical_fields(rng):
    grid = make_grid(-32.0, 32.0, 32)
    v = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    assert error_h2(v, v, grid) == 0.0


def test_error_h2_single_mode_amplitude():
    grid = make_grid(-32.0, 32.0, 64)
    x = grid.interior_nodes
    alpha = 0.3
    mu = 2.0 * np.pi * 5 / 64.0
    diff = alpha * np.exp(1j * mu * (x + 32.0))
    expected = alpha * np.sqrt(64.0 * (1.0 + mu**2 + mu**4))
    assert error_h2(diff, np.zeros(64), grid) == pytest.approx(expected, rel=1e-12)


def test_error_h2_symmetry(rng):
    grid = make_grid(-32.0, 32.0, 32)
    u = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    v = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    assert error_h2(u, v, grid) == pytest.approx(error_h2(v, u, grid), rel=1e-14)


def test_error_h2_subsamples_nested_reference():
    coarse = make_grid(-32.0, 32.0, 32)
    fine = make_grid(-32.0, 32.0, 128)
    f = lambda x: np.exp(-(x**2) / 4.0)
    numeric = f(coarse.interior_nodes).astype(complex)
    reference = f(fine.interior_nodes).astype(complex)
    assert error_h2(numeric, reference, coarse) < 1e-13
    # perturbing one shared node must register
    bumped = reference.copy()
    bumped[0] += 0.01
    assert error_h2(numeric, bumped, coarse) > 1e-4


def test_error_h2_rejects_incompatible_lengths():
    grid = make_grid(-32.0, 32.0, 32)
    with pytest.raises(ValueError, match="expected 32"):
        error_h2(np.zeros(16), np.zeros(32), grid)
    with pytest.raises(ValueError, match="integer multiple"):
        error_h2(np.zeros(32), np.zeros(48), grid)


def test_error_energy_functional_zero():
    grid = make_grid(-32.0, 32.0, 16)
    zero = SpectralField(grid, np.zeros(16, dtype=complex))
    assert error_energy_functional(zero, zero, zero, 0.5) == 0.0


def test_error_energy_functional_quadratic_scaling(rng):
    grid = make_grid(-32.0, 32.0, 16)
    fields = [
        SpectralField(grid, rng.standard_normal(16) + 1j * rng.standard_normal(16))
        for _ in range(3)
    ]
    doubled = [SpectralField(grid, 2.0 * f.coeffs) for f in fields]
    one = error_energy_functional(*fields, 0.5)
    four = error_energy_functional(*doubled, 0.5)
    assert four == pytest.approx(4.0 * one, rel=1e-13)


def test_error_energy_functional_matches_naive(rng):
    grid = make_grid(-32.0, 32.0, 16)
    eps = 0.25
    e_phi = 0.1 * rng.standard_normal(16)
    e_psi = 0.1 * (rng.standard_normal(16) + 1j * rng.standard_normal(16))
    e_phidot = 0.1 * rng.standard_normal(16)
    got = error_energy_functional(
        forward_transform(e_phi, grid),
        forward_transform(e_psi, grid),
        forward_transform(e_phidot, grid),
        eps,
    )
    want = naive_error_energy(
        naive_dft(e_phi, -32.0, 32.0),
        naive_dft(e_psi, -32.0, 32.0),
        naive_dft(e_phidot, -32.0, 32.0),
        -32.0,
        32.0,
        eps,
    )
    assert got == pytest.approx(want, rel=1e-12)


def test_error_energy_functional_rejects_bad_eps():
    grid = make_grid(-32.0, 32.0, 16)
    zero = SpectralField(grid, np.zeros(16, dtype=complex))
    with pytest.raises(ValueError, match="eps"):
        error_energy_functional(zero, zero, zero, 0.0)


def test_observed_orders_examples():
    np.testing.assert_allclose(observed_orders([1.0, 0.25], 4.0), [1.0])
    np.testing.assert_allclose(
        observed_orders([1.31e-1, 1.60e-2], 4.0), [1.5167], atol=5e-4
    )
    np.testing.assert_allclose(
        observed_orders([3.74e-2, 1.50e-3], 4.0), [2.3200], atol=5e-4
    )


def test_observed_orders_scale_invariance(rng):
    errs = np.exp(rng.standard_normal(5))
    np.testing.assert_allclose(
        observed_orders(errs, 2.0), observed_orders(1e3 * errs, 2.0), rtol=1e-12
    )


def test_observed_orders_validation():
    with pytest.raises(ValueError, match="two error values"):
        observed_orders([1.0], 2.0)
    with pytest.raises(ValueError, match="positive and finite"):
        observed_orders([1.0, 0.0], 2.0)
    with pytest.raises(ValueError, match="refinement factor"):
        observed_orders([1.0, 0.5], 1.0)


def test_error_record_validation():
    rec = ErrorRecord(
        eps=1.0, tau=0.05, h=0.5, t=1.0,
        err_phi_H2=1e-3, err_psi_H2=1e-4, err_phidot_H2_scaled=1e-2,
    )
    assert rec.err_phi_H2 == 1e-3
    with pytest.raises(ValueError, match="err_psi_H2"):
        ErrorRecord(
            eps=1.0, tau=0.05, h=0.5, t=1.0,
            err_phi_H2=1e-3, err_psi_H2=-1e-4, err_phidot_H2_scaled=1e-2,
        )
    with pytest.raises(ValueError, match="finite"):
        ErrorRecord(
            eps=1.0, tau=0.05, h=0.5, t=1.0,
            err_phi_H2=np.inf, err_psi_H2=1e-4, err_phidot_H2_scaled=1e-2,
        )
