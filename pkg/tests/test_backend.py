import numpy as np
import pytest

from kgspectral import benchmark_state, make_grid
from kgspectral.backend import active_backend, compiled_available, select_kernels
from kgspectral.coefficients import build_coefficient_table
from kgspectral.stepper import step
from kgspectral import _kernels_py

needs_compiled = pytest.mark.skipif(
    not compiled_available(), reason="compiled backend not built"
)


def cvec(rng, n=64):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def test_select_kernels_names():
    assert select_kernels("python") is _kernels_py
    with pytest.raises(ValueError, match="unknown backend"):
        select_kernels("fortran")


def test_select_kernels_env_var(monkeypatch):
    monkeypatch.setenv("KGSPECTRAL_BACKEND", "python")
    assert select_kernels() is _kernels_py
    assert active_backend() == "python"
    monkeypatch.setenv("KGSPECTRAL_BACKEND", "cuda")
    with pytest.raises(ValueError, match="unknown backend"):
        select_kernels()


@needs_compiled
def test_select_kernels_compiled():
    mod = select_kernels("compiled")
    assert mod.BACKEND_NAME == "compiled"
    assert mod is not _kernels_py


def test_select_kernels_auto_prefers_compiled(monkeypatch):
    monkeypatch.delenv("KGSPECTRAL_BACKEND", raising=False)
    mod = select_kernels()
    if compiled_available():
        assert mod.BACKEND_NAME == "compiled"
    else:
        assert mod is _kernels_py


def test_missing_compiled_backend_is_reported(monkeypatch):
    import kgspectral.backend as backend_mod

    monkeypatch.setattr(backend_mod, "_core", None)
    assert backend_mod.compiled_available() is False
    with pytest.raises(RuntimeError, match="not importable"):
        backend_mod.select_kernels("compiled")


@needs_compiled
class TestKernelAgreement:
    """Compiled kernels must reproduce the numpy fallback elementwise."""

    def setup_method(self):
        self.py = select_kernels("python")
        self.c = select_kernels("compiled")

    @staticmethod
    def check(outs_py, outs_c):
        if not isinstance(outs_py, tuple):
            outs_py, outs_c = (outs_py,), (outs_c,)
        assert len(outs_py) == len(outs_c)
        for a, b in zip(outs_py, outs_c):
            np.testing.assert_allclose(b, a, rtol=1e-15, atol=1e-15)

    def test_decompose_spectra(self, rng):
        args = (cvec(rng), cvec(rng), cvec(rng), cvec(rng),
                rng.standard_normal(64), 0.0625)
        self.check(self.py.decompose_spectra(*args), self.c.decompose_spectra(*args))

    def test_build_products(self, rng):
        args = (cvec(rng), cvec(rng), cvec(rng), cvec(rng))
        self.check(self.py.build_products(*args), self.c.build_products(*args))

    def test_zr_update(self, rng):
        spectra = tuple(cvec(rng) for _ in range(5))
        meson_coeffs = tuple(cvec(rng) for _ in range(4))
        source_coeffs = tuple(rng.standard_normal(64) for _ in range(6))
        args = spectra + meson_coeffs + source_coeffs + (0.0625,)
        self.check(self.py.zr_update(*args), self.c.zr_update(*args))

    def test_psi_update(self, rng):
        args = tuple(cvec(rng) for _ in range(12))
        self.check(self.py.psi_update(*args), self.c.psi_update(*args))

    def test_psi_finish(self, rng):
        args = (cvec(rng), cvec(rng), cvec(rng), 0.0125)
        self.check(self.py.psi_finish(*args), self.c.psi_finish(*args))

    def test_reconstruct(self, rng):
        phase_plus = complex(np.exp(0.7j))  # scalar carrier phase
        args = (cvec(rng), cvec(rng), cvec(rng), cvec(rng), phase_plus, 0.0625)
        phi_py, phidot_py, i1_py, i2_py = self.py.reconstruct(*args)
        phi_c, phidot_c, i1_c, i2_c = self.c.reconstruct(*args)
        np.testing.assert_allclose(phi_c, phi_py, rtol=1e-15, atol=1e-15)
        np.testing.assert_allclose(phidot_c, phidot_py, rtol=1e-15, atol=1e-15)
        assert i1_c == pytest.approx(i1_py, rel=1e-15)
        assert i2_c == pytest.approx(i2_py, rel=1e-15)


@needs_compiled
def test_full_step_agrees_across_backends():
    grid = make_grid(-32.0, 32.0, 128)
    eps, tau = 0.25, 0.0125
    state = benchmark_state(grid, eps)
    table = build_coefficient_table(grid, eps, tau)
    out_py = step(state, table, kernels=select_kernels("python"))
    out_c = step(state, table, kernels=select_kernels("compiled"))
    np.testing.assert_allclose(out_c.Phi, out_py.Phi, rtol=0, atol=1e-13)
    np.testing.assert_allclose(out_c.PhiDot, out_py.PhiDot, rtol=0, atol=1e-13)
    np.testing.assert_allclose(out_c.Psi, out_py.Psi, rtol=0, atol=1e-13)


def test_benchmark_smoke(capsys):
    from kgspectral.benchmark import main

    assert main(["--mesh", "64", "--steps", "3"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].lstrip().startswith("N")
    assert "64" in out
