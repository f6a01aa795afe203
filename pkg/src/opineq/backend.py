"""Eigensolver kernel selection.

The compiled extension is used when it was built; otherwise the numpy
implementation takes over transparently.  Setting ``OPINEQ_PURE_PYTHON=1``
in the environment forces the fallback (used by the benchmark and by tests
that exercise both paths).
"""

import os

from . import _kernels_py

try:
    from . import _kernels
except ImportError:
    _kernels = None

_FORCE_PURE = os.environ.get("OPINEQ_PURE_PYTHON", "0") not in ("", "0")

if _kernels is not None and not _FORCE_PURE:
    jacobi_eigh = _kernels.jacobi_eigh
    BACKEND = "compiled"
else:
    jacobi_eigh = _kernels_py.jacobi_eigh
    BACKEND = "python"


def backend_name() -> str:
    """Name of the active eigensolver kernel ("compiled" or "python")."""
    return BACKEND
