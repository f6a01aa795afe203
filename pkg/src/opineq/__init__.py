"""Numerical toolkit for operator means, positive linear maps, and the
matrix inequalities built from them.

Subpackages:

- ``matcore``      dense Hermitian linear algebra and functional calculus
- ``means``        Kubo-Ando operator means and interpolational power paths
- ``maps``         positive linear / multilinear maps, tensor and Hadamard products
- ``constants``    generalized Kantorovich constant and Specht ratio
- ``functionals``  composite operator/trace functionals and the operator-valued
                   determinant
- ``verify``       randomized inequality checking engine and fixed counterexamples
- ``suite``        named theorem checks wired for the CLI
- ``cli``          ``opineq`` command-line entry point
"""

from .backend import backend_name

__version__ = "0.1.0"

__all__ = ["backend_name", "__version__"]
