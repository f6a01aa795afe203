"""Numpy fallback for the cyclic Jacobi eigensolver kernel.

Same algorithm and contract as the compiled extension in ``_kernels.pyx``:
complex Givens rotations applied in row-cyclic order until the off-diagonal
Frobenius mass drops below ``sweep_tol`` times the Frobenius norm of the
input.  Dimensions here are small (<= 16), so plain row/column updates on
numpy arrays are adequate when the extension is not built.
"""

import math

import numpy as np

_EPS = np.finfo(np.float64).eps


def _offdiag_norm(a):
    n = a.shape[0]
    mask = ~np.eye(n, dtype=bool)
    return float(np.linalg.norm(a[mask]))


def jacobi_eigh(a, sweep_tol, max_sweeps):
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Parameters are the working matrix (copied internally), the relative
    off-diagonal target, and the sweep cap.  Returns
    ``(diag, vectors, offdiag_residual, sweeps, converged)`` with the diagonal
    unsorted; callers sort and repackage.
    """
    a = np.array(a, dtype=np.complex128, order="C")
    n = a.shape[0]
    u = np.eye(n, dtype=np.complex128)
    fro = float(np.linalg.norm(a))
    if n == 1 or fro == 0.0:
        return np.real(np.diagonal(a)).copy(), u, 0.0, 0, True
    # Floor at a few n*eps: rotations regrow O(eps) off-diagonal mass, so a
    # tighter target than this is unreachable in double precision.
    tol_eff = max(sweep_tol, 8.0 * n * _EPS) * fro
    skip = tol_eff / (2.0 * n)

    off = _offdiag_norm(a)
    sweeps = 0
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
                    t = math.copysign(1.0, theta) / (
                        abs(theta) + math.sqrt(theta * theta + 1.0)
                    )
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                s_ph = s * phase
                s_ct = s * np.conj(phase)

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s_ct * col_q
                a[:, q] = s_ph * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s_ph * row_q
                a[q, :] = s_ct * row_p + c * row_q
                # The rotated pair is known analytically; writing it directly
                # keeps the zero exact instead of leaving rounding residue.
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                a[p, q] = 0.0
                a[q, p] = 0.0

                u_p = u[:, p].copy()
                u_q = u[:, q].copy()
                u[:, p] = c * u_p - s_ct * u_q
                u[:, q] = s_ph * u_p + c * u_q
        sweeps += 1
        off = _offdiag_norm(a)

    return np.real(np.diagonal(a)).copy(), u, off, sweeps, off <= tol_eff
