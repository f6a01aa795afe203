# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled cyclic Jacobi eigensolver kernel for Hermitian matrices.

Mirrors ``_kernels_py.jacobi_eigh`` exactly; the suites spend most of their
time in this loop, so it is the one piece worth compiling.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport copysign, fabs, sqrt

cnp.import_array()

cdef double _EPS = 2.220446049250313e-16


cdef double _offdiag_norm(double complex[:, ::1] a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double acc = 0.0, m
    for i in range(n):
        for j in range(n):
            if i != j:
                m = abs(a[i, j])
                acc += m * m
    return sqrt(acc)


def jacobi_eigh(a_in, double sweep_tol, int max_sweeps):
    """Compiled twin of ``_kernels_py.jacobi_eigh``; same contract."""
    a_arr = np.array(a_in, dtype=np.complex128, order="C")
    cdef Py_ssize_t n = a_arr.shape[0]
    u_arr = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] a = a_arr
    cdef double complex[:, ::1] u = u_arr

    cdef double fro = float(np.linalg.norm(a_arr))
    if n == 1 or fro == 0.0:
        return np.real(np.diagonal(a_arr)).copy(), u_arr, 0.0, 0, True

    cdef double tol_eff = max(sweep_tol, 8.0 * n * _EPS) * fro
    cdef double skip = tol_eff / (2.0 * n)

    cdef Py_ssize_t p, q, k
    cdef int sweeps = 0
    cdef double off, r, app, aqq, theta, t, c, s
    cdef double complex apq, phase, s_ph, s_ct, xp, xq

    with nogil:
        off = _offdiag_norm(a, n)
        while off > tol_eff and sweeps < max_sweeps:
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    r = abs(apq)
                    if r <= skip:
                        continue
                    app = a[p, p].real
                    aqq = a[q, q].real
                    phase = apq / r
                    theta = (aqq - app) / (2.0 * r)
                    if theta == 0.0:
                        t = 1.0
                    else:
                        t = copysign(1.0, theta) / (fabs(theta) + sqrt(theta * theta + 1.0))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    s_ph = s * phase
                    s_ct = s * phase.conjugate()

                    for k in range(n):
                        xp = a[k, p]
                        xq = a[k, q]
                        a[k, p] = c * xp - s_ct * xq
                        a[k, q] = s_ph * xp + c * xq
                    for k in range(n):
                        xp = a[p, k]
                        xq = a[q, k]
                        a[p, k] = c * xp - s_ph * xq
                        a[q, k] = s_ct * xp + c * xq
                    a[p, p] = app - t * r
                    a[q, q] = aqq + t * r
                    a[p, q] = 0.0
                    a[q, p] = 0.0

                    for k in range(n):
                        xp = u[k, p]
                        xq = u[k, q]
                        u[k, p] = c * xp - s_ct * xq
                        u[k, q] = s_ph * xp + c * xq
            sweeps += 1
            off = _offdiag_norm(a, n)

    return np.real(np.diagonal(a_arr)).copy(), u_arr, off, sweeps, off <= tol_eff
