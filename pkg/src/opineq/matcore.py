"""Dense complex Hermitian linear algebra.

Everything downstream (means, positive maps, trace functionals, the theorem
suites) reduces to eigendecompositions of small Hermitian matrices and the
functional calculus built on them.  The eigensolver is a self-contained
cyclic Jacobi iteration (compiled kernel with a numpy fallback, see
``backend``); no LAPACK eigenroutines are used outside the test oracles.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .backend import jacobi_eigh

__all__ = [
    "MatrixError",
    "DimensionMismatchError",
    "DomainError",
    "NotPositiveDefiniteError",
    "SingularMatrixError",
    "EigenConvergenceError",
    "HermitianMatrix",
    "SpectralDecomposition",
    "SpectralBounds",
    "ScalarFunction",
    "LoewnerResult",
    "hermitian",
    "identity",
    "diagonal",
    "eigh",
    "apply_function",
    "mpow",
    "msqrt",
    "mlog",
    "mexp",
    "inverse",
    "operator_norm",
    "trace",
    "loewner_leq",
    "spectral_bounds",
    "is_positive_definite",
    "assert_positive_definite",
    "tightened_eigensolver",
    "matrix_to_json",
    "matrix_from_json",
    "DEFAULT_LOEWNER_TOL",
]

HERMITIAN_ATOL = 1e-12
DEFAULT_SWEEP_TOL = 1e-13
TIGHT_SWEEP_TOL = 1e-15
MAX_SWEEPS = 64
DEFAULT_LOEWNER_TOL = 1e-9
PD_EIG_FACTOR = 1e-12  # lambda_min must exceed dim * this * (1 + ||A||_op)

_sweep_tol: contextvars.ContextVar[float] = contextvars.ContextVar(
    "opineq_sweep_tol", default=DEFAULT_SWEEP_TOL
)


class MatrixError(Exception):
    """Base class for all matrix-level failures."""


class DimensionMismatchError(MatrixError):
    pass


class DomainError(MatrixError):
    """An eigenvalue fell outside the domain of a scalar function."""


class NotPositiveDefiniteError(MatrixError):
    pass


class SingularMatrixError(MatrixError):
    pass


class EigenConvergenceError(MatrixError):
    """Jacobi sweeps hit the cap; carries the remaining off-diagonal mass."""

    def __init__(self, residual: float, sweeps: int):
        super().__init__(
            f"eigensolver did not converge after {sweeps} sweeps "
            f"(off-diagonal residual {residual:.3e})"
        )
        self.residual = residual
        self.sweeps = sweeps


@contextlib.contextmanager
def tightened_eigensolver(sweep_tol: float = TIGHT_SWEEP_TOL):
    """Re-run numerics with a tighter Jacobi stopping target.

    Used when a comparison lands close to a decision threshold and should be
    recomputed before being counted.  The effective target is still floored
    at a few ULPs per rotation, so this cannot fail to converge where the
    default would succeed.
    """
    token = _sweep_tol.set(sweep_tol)
    try:
        yield
    finally:
        _sweep_tol.reset(token)


def current_sweep_tol() -> float:
    return _sweep_tol.get()


class HermitianMatrix:
    """Immutable dense complex Hermitian matrix.

    The constructor symmetrizes its input via (A + A*)/2 and rejects input
    further than ``HERMITIAN_ATOL`` (scaled) from Hermitian, so downstream
    code can rely on exact Hermitian storage.
    """

    __slots__ = ("_mat",)

    def __init__(self, entries):
        m = np.array(entries, dtype=np.complex128, order="C")
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
        if m.shape[0] < 1:
            raise DimensionMismatchError("dimension must be >= 1")
        if not np.all(np.isfinite(m.view(np.float64))):
            raise MatrixError("matrix entries must be finite")
        scale = max(1.0, float(np.max(np.abs(m))))
        dev = float(np.max(np.abs(m - m.conj().T)))
        if dev > 2.0 * HERMITIAN_ATOL * scale:
            raise MatrixError(
                f"input is not Hermitian (max |A - A*| = {dev:.3e} at scale {scale:.3e})"
            )
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "_mat", m)

    @property
    def mat(self) -> np.ndarray:
        """Read-only complex128 array view of the entries."""
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        self._check_dim(other)
        return _wrap(self._mat + other._mat)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        self._check_dim(other)
        return _wrap(self._mat - other._mat)

    def __neg__(self) -> "HermitianMatrix":
        return _wrap(-self._mat)

    def __mul__(self, scalar) -> "HermitianMatrix":
        s = float(scalar)
        return _wrap(s * self._mat)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "HermitianMatrix":
        return self * (1.0 / float(scalar))

    def _check_dim(self, other: "HermitianMatrix") -> None:
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dimensions differ: {self.dim} vs {other.dim}")

    def allclose(self, other: "HermitianMatrix", atol: float = 1e-10) -> bool:
        return self.dim == other.dim and bool(
            np.allclose(self._mat, other._mat, atol=atol, rtol=0.0)
        )

    def __repr__(self) -> str:
        return f"HermitianMatrix(dim={self.dim})"


def _wrap(mat: np.ndarray) -> HermitianMatrix:
    """Wrap an array already known to be Hermitian (internal fast path)."""
    out = HermitianMatrix.__new__(HermitianMatrix)
    m = np.ascontiguousarray(mat, dtype=np.complex128)
    m = 0.5 * (m + m.conj().T)
    m.setflags(write=False)
    object.__setattr__(out, "_mat", m)
    return out


def hermitian(entries) -> HermitianMatrix:
    """Construct a :class:`HermitianMatrix` from array-like entries."""
    return HermitianMatrix(entries)


def identity(dim: int) -> HermitianMatrix:
    return _wrap(np.eye(dim, dtype=np.complex128))


def diagonal(values) -> HermitianMatrix:
    v = np.asarray(values, dtype=np.float64)
    return _wrap(np.diag(v).astype(np.complex128))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and a unitary of eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def rebuild(self, values: np.ndarray) -> HermitianMatrix:
        """Assemble U diag(values) U* for transformed eigenvalues."""
        u = self.eigenvectors
        return _wrap((u * values) @ u.conj().T)

    def reconstruct(self) -> HermitianMatrix:
        return self.rebuild(self.eigenvalues)


@dataclass(frozen=True)
class SpectralBounds:
    """Scalars 0 < m <= M enclosing the spectrum of a positive matrix."""

    m: float
    M: float

    @property
    def h(self) -> float:
        """Generalized condition number M/m."""
        return self.M / self.m


@dataclass(frozen=True)
class ScalarFunction:
    """A scalar function with an explicit domain for the functional calculus.

    ``lo``/``hi`` bound the admissible eigenvalues; ``lo_open``/``hi_open``
    mark strict endpoints.  ``fn`` must be vectorized over float arrays.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    lo: float = -math.inf
    hi: float = math.inf
    lo_open: bool = False
    hi_open: bool = False

    def check_domain(self, eigenvalues: np.ndarray) -> None:
        for lam in eigenvalues:
            bad = (
                lam < self.lo
                or lam > self.hi
                or (self.lo_open and lam <= self.lo)
                or (self.hi_open and lam >= self.hi)
            )
            if bad:
                raise DomainError(
                    f"eigenvalue {lam!r} outside the domain of {self.name}"
                )

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(x), dtype=np.float64)


def eigh(a: HermitianMatrix) -> SpectralDecomposition:
    """Full eigendecomposition with eigenvalues sorted ascending."""
    w, u, off, sweeps, converged = jacobi_eigh(a.mat, _sweep_tol.get(), MAX_SWEEPS)
    if not converged:
        raise EigenConvergenceError(off, sweeps)
    idx = np.argsort(w, kind="stable")
    w = np.ascontiguousarray(w[idx])
    u = np.ascontiguousarray(u[:, idx])
    w.setflags(write=False)
    u.setflags(write=False)
    return SpectralDecomposition(w, u)


def apply_function(a: HermitianMatrix, f) -> HermitianMatrix:
    """Evaluate f on A through the spectrum: U diag(f(lambda)) U*.

    ``f`` is a :class:`ScalarFunction` (domain-checked against the spectrum)
    or a plain callable (assumed total).
    """
    dec = eigh(a)
    if isinstance(f, ScalarFunction):
        f.check_domain(dec.eigenvalues)
        vals = f(dec.eigenvalues)
    else:
        vals = np.asarray(f(dec.eigenvalues), dtype=np.float64)
    if not np.all(np.isfinite(vals)):
        raise DomainError("scalar function produced a non-finite value on the spectrum")
    return dec.rebuild(vals)


def _pd_threshold(dim: int, op_norm: float) -> float:
    return dim * PD_EIG_FACTOR * (1.0 + op_norm)


def mpow(a: HermitianMatrix, p: float) -> HermitianMatrix:
    """Matrix power A^p.

    Integer p >= 1 works for any Hermitian A; every other exponent
    (including 0) requires A strictly positive definite — there is no
    pseudo-inverse fallback.
    """
    dec = eigh(a)
    w = dec.eigenvalues
    if p == 1.0:
        return dec.reconstruct()
    if float(p).is_integer() and p >= 1:
        return dec.rebuild(w ** int(p))
    lam_min = float(w[0])
    op = float(max(abs(w[0]), abs(w[-1])))
    if lam_min <= _pd_threshold(a.dim, op):
        raise NotPositiveDefiniteError(
            f"matrix power p={p} needs a positive definite input "
            f"(lambda_min = {lam_min:.3e})"
        )
    if p == 0.0:
        return identity(a.dim)
    return dec.rebuild(w**p)


def msqrt(a: HermitianMatrix) -> HermitianMatrix:
    return mpow(a, 0.5)


def mlog(a: HermitianMatrix) -> HermitianMatrix:
    dec = eigh(a)
    w = dec.eigenvalues
    if w[0] <= 0.0:
        raise DomainError(f"eigenvalue {float(w[0])!r} outside the domain of log")
    return dec.rebuild(np.log(w))


def mexp(a: HermitianMatrix) -> HermitianMatrix:
    dec = eigh(a)
    return dec.rebuild(np.exp(dec.eigenvalues))


def inverse(a: HermitianMatrix) -> HermitianMatrix:
    """Inverse through reciprocal eigenvalues; rejects near-singular input."""
    dec = eigh(a)
    w = dec.eigenvalues
    op = float(np.max(np.abs(w)))
    if np.min(np.abs(w)) <= a.dim * 1e-12 * op or op == 0.0:
        raise SingularMatrixError(
            f"matrix is singular to working precision (min |lambda| = "
            f"{float(np.min(np.abs(w))):.3e})"
        )
    return dec.rebuild(1.0 / w)


def operator_norm(a: HermitianMatrix) -> float:
    w = eigh(a).eigenvalues
    return float(max(abs(w[0]), abs(w[-1])))


def trace(a: HermitianMatrix) -> float:
    """Trace of a Hermitian matrix (exactly real by storage)."""
    return float(np.trace(a.mat).real)


@dataclass(frozen=True)
class LoewnerResult:
    """Outcome of a Loewner-order comparison A <= B."""

    holds: bool
    margin: float  # lambda_min(B - A); negative when the order fails
    scale: float  # ||B - A||_op, used for the relative tolerance

    def __bool__(self) -> bool:
        return self.holds


def loewner_leq(
    a: HermitianMatrix, b: HermitianMatrix, tol: float = DEFAULT_LOEWNER_TOL
) -> LoewnerResult:
    """Decide A <= B in the Loewner order with a scale-relative tolerance.

    Holds iff lambda_min(B - A) >= -tol * (1 + ||B - A||_op).  The margin is
    reported either way.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimensions differ: {a.dim} vs {b.dim}")
    w = eigh(b - a).eigenvalues
    margin = float(w[0])
    scale = float(max(abs(w[0]), abs(w[-1])))
    return LoewnerResult(margin >= -tol * (1.0 + scale), margin, scale)


def spectral_bounds(a: HermitianMatrix) -> SpectralBounds:
    """Tight spectral enclosure m = lambda_min, M = lambda_max for A > 0."""
    w = eigh(a).eigenvalues
    lam_min, lam_max = float(w[0]), float(w[-1])
    if lam_min <= _pd_threshold(a.dim, max(abs(lam_min), abs(lam_max))):
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite (lambda_min = {lam_min:.3e})"
        )
    return SpectralBounds(lam_min, lam_max)


def is_positive_definite(a: HermitianMatrix) -> bool:
    w = eigh(a).eigenvalues
    op = float(max(abs(w[0]), abs(w[-1])))
    return float(w[0]) > _pd_threshold(a.dim, op)


def assert_positive_definite(a: HermitianMatrix, what: str = "input") -> None:
    if not is_positive_definite(a):
        raise NotPositiveDefiniteError(f"{what} must be positive definite")


def matrix_to_json(a: HermitianMatrix) -> dict:
    """Serialize to the shared JSON literal format.

    ``{"dim": n, "re": [[...]], "im": [[...]]}`` — "im" is omitted when the
    matrix is real.
    """
    doc = {"dim": a.dim, "re": a.mat.real.tolist()}
    if np.any(a.mat.imag != 0.0):
        doc["im"] = a.mat.imag.tolist()
    return doc


def matrix_from_json(doc: dict) -> HermitianMatrix:
    """Parse the shared JSON matrix format ("im" optional, defaults to 0)."""
    if "re" not in doc:
        raise MatrixError('matrix JSON needs a "re" field')
    re = np.asarray(doc["re"], dtype=np.float64)
    im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=np.float64)
    if re.shape != im.shape:
        raise DimensionMismatchError('"re" and "im" shapes differ')
    m = re + 1j * im
    dim = doc.get("dim")
    if dim is not None and (m.ndim != 2 or m.shape[0] != int(dim)):
        raise DimensionMismatchError(
            f'"dim" field ({dim}) does not match entries of shape {m.shape}'
        )
    return HermitianMatrix(m)
