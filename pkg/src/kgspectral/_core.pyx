# cython: boundscheck=False, wraparound=False, cdivision=True
"""Fused elementwise spectral step kernels (compiled backend).

Function-for-function mirror of kgspectral._kernels_py; each kernel runs
one C loop instead of a chain of numpy temporaries.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"

ctypedef double complex dc


def decompose_spectra(
    const dc[::1] phi_t,
    const dc[::1] phidot_t,
    const dc[::1] psi_t,
    const dc[::1] phipsi_t,
    const double[::1] sinc_filter,
    double eps2,
):
    cdef Py_ssize_t n = phi_t.shape[0]
    z0_arr = np.empty(n, dtype=np.complex128)
    z0dot_arr = np.empty(n, dtype=np.complex128)
    psidot_arr = np.empty(n, dtype=np.complex128)
    cdef dc[::1] z0 = z0_arr
    cdef dc[::1] z0dot = z0dot_arr
    cdef dc[::1] psidot = psidot_arr
    cdef Py_ssize_t i
    cdef dc z
    for i in range(n):
        z = 0.5 * (phi_t[i] - 1j * eps2 * phidot_t[i])
        z0[i] = z
        z0dot[i] = 0.5j * sinc_filter[i] * z
        psidot[i] = -1j * sinc_filter[i] * psi_t[i] + 1j * phipsi_t[i]
    return z0_arr, z0dot_arr, psidot_arr


def build_products(const dc[::1] z0, const dc[::1] z0dot, const dc[::1] psi, const dc[::1] psidot):
    cdef Py_ssize_t n = z0.shape[0]
    out = [np.empty(n, dtype=np.complex128) for _ in range(9)]
    cdef dc[::1] rho = out[0]
    cdef dc[::1] mixed = out[1]
    cdef dc[::1] r0dot = out[2]
    cdef dc[::1] z0psi = out[3]
    cdef dc[::1] z0dotpsi = out[4]
    cdef dc[::1] z0psidot = out[5]
    cdef dc[::1] cz0psi = out[6]
    cdef dc[::1] cz0dotpsi = out[7]
    cdef dc[::1] cz0psidot = out[8]
    cdef Py_ssize_t i
    cdef dc ps, pd, z, zd, cz, czd
    for i in range(n):
        ps = psi[i]
        pd = psidot[i]
        z = z0[i]
        zd = z0dot[i]
        cz = z.conjugate()
        czd = zd.conjugate()
        rho[i] = ps.real * ps.real + ps.imag * ps.imag
        mixed[i] = (ps.conjugate() * pd).real
        r0dot[i] = -2.0 * zd.real
        z0psi[i] = z * ps
        z0dotpsi[i] = zd * ps
        z0psidot[i] = z * pd
        cz0psi[i] = cz * ps
        cz0dotpsi[i] = czd * ps
        cz0psidot[i] = cz * pd
    return tuple(out)


def zr_update(
    const dc[::1] z0_t,
    const dc[::1] z0dot_t,
    const dc[::1] r0dot_t,
    const dc[::1] rho_t,
    const dc[::1] mixed_t,
    const dc[::1] a,
    const dc[::1] b,
    const dc[::1] a_dot,
    const dc[::1] b_dot,
    const double[::1] p,
    const double[::1] q,
    const double[::1] p_dot,
    const double[::1] q_dot,
    const double[::1] sin_omega_over_omega,
    const double[::1] cos_omega,
    double eps2,
):
    cdef Py_ssize_t n = z0_t.shape[0]
    z1_arr = np.empty(n, dtype=np.complex128)
    z1dot_arr = np.empty(n, dtype=np.complex128)
    r1_arr = np.empty(n, dtype=np.complex128)
    r1dot_arr = np.empty(n, dtype=np.complex128)
    cdef dc[::1] z1 = z1_arr
    cdef dc[::1] z1dot = z1dot_arr
    cdef dc[::1] r1 = r1_arr
    cdef dc[::1] r1dot = r1dot_arr
    cdef Py_ssize_t i
    for i in range(n):
        z1[i] = a[i] * z0_t[i] + eps2 * b[i] * z0dot_t[i]
        z1dot[i] = a_dot[i] * z0_t[i] + eps2 * b_dot[i] * z0dot_t[i]
        r1[i] = sin_omega_over_omega[i] * r0dot_t[i] + p[i] * rho_t[i] \
            + 2.0 * q[i] * mixed_t[i]
        r1dot[i] = cos_omega[i] * r0dot_t[i] + p_dot[i] * rho_t[i] \
            + 2.0 * q_dot[i] * mixed_t[i]
    return z1_arr, z1dot_arr, r1_arr, r1dot_arr


def psi_update(
    const dc[::1] psi_t,
    const dc[::1] psi_phase,
    const dc[::1] c_plus,
    const dc[::1] c_minus,
    const dc[::1] d_plus,
    const dc[::1] d_minus,
    const dc[::1] z0psi_t,
    const dc[::1] z0dotpsi_t,
    const dc[::1] z0psidot_t,
    const dc[::1] cz0psi_t,
    const dc[::1] cz0dotpsi_t,
    const dc[::1] cz0psidot_t,
):
    cdef Py_ssize_t n = psi_t.shape[0]
    out_arr = np.empty(n, dtype=np.complex128)
    cdef dc[::1] out = out_arr
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = psi_phase[i] * psi_t[i] \
            + c_plus[i] * z0psi_t[i] \
            + d_plus[i] * (z0dotpsi_t[i] + z0psidot_t[i]) \
            + c_minus[i] * cz0psi_t[i] \
            + d_minus[i] * (cz0dotpsi_t[i] + cz0psidot_t[i])
    return out_arr


def psi_finish(const dc[::1] psi_partial_t, const dc[::1] r1psi_t, const dc[::1] r1psidot_t, double tau):
    cdef Py_ssize_t n = psi_partial_t.shape[0]
    out_arr = np.empty(n, dtype=np.complex128)
    cdef dc[::1] out = out_arr
    cdef dc half_itau = 0.5j * tau
    cdef dc half_itau2 = 0.5j * tau * tau
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = psi_partial_t[i] + half_itau * r1psi_t[i] + half_itau2 * r1psidot_t[i]
    return out_arr


def reconstruct(
    const dc[::1] z1,
    const dc[::1] z1dot,
    const dc[::1] r1,
    const dc[::1] r1dot,
    dc phase_plus,
    double eps2,
):
    cdef Py_ssize_t n = z1.shape[0]
    phi_arr = np.empty(n, dtype=np.float64)
    phidot_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] phi = phi_arr
    cdef double[::1] phidot = phidot_arr
    cdef double imag_r1 = 0.0
    cdef double imag_r1dot = 0.0
    cdef double v
    cdef dc inv = 1j / eps2
    cdef Py_ssize_t i
    for i in range(n):
        phi[i] = 2.0 * (phase_plus * z1[i]).real + r1[i].real
        phidot[i] = 2.0 * (phase_plus * (z1dot[i] + inv * z1[i])).real + r1dot[i].real
        v = r1[i].imag
        if v < 0:
            v = -v
        if v > imag_r1:
            imag_r1 = v
        v = r1dot[i].imag
        if v < 0:
            v = -v
        if v > imag_r1dot:
            imag_r1dot = v
    return phi_arr, phidot_arr, imag_r1, imag_r1dot
