"""Kubo-Ando operator means and the interpolational power-mean paths.

A mean is carried by its normalized representing function f (f(1) = 1) and
evaluated as A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2} on positive definite
pairs.  The weighted arithmetic / geometric / harmonic means and the
one-parameter family joining them (power exponent r in [-1, 1], weight t)
are built in; arbitrary representing functions are accepted with a runtime
normalization check only — operator monotonicity is not decidable from
samples, so user-supplied means are trusted to be monotone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import matcore
from .matcore import HermitianMatrix, assert_positive_definite, eigh, inverse

__all__ = [
    "OperatorMean",
    "PathParams",
    "make_mean",
    "arithmetic",
    "geometric",
    "harmonic",
    "power_path",
    "mean",
    "weighted_arithmetic",
    "weighted_geometric",
    "weighted_harmonic",
    "interpolational_path",
    "adjoint_mean",
    "parse_mean",
    "R_EPS",
]

# Below this |r| the power path is evaluated as the geometric path: the
# exponent 1/r is numerically explosive while the r -> 0 limit is exact.
R_EPS = 1e-4

_CHECK_GRID = np.array([0.05, 0.2, 0.5, 1.0, 2.0, 7.0, 40.0])


@dataclass(frozen=True)
class OperatorMean:
    """An operator mean given by its representing function on (0, inf)."""

    name: str
    f: Callable[[np.ndarray], np.ndarray]

    def __repr__(self) -> str:
        return f"OperatorMean({self.name!r})"


@dataclass(frozen=True)
class PathParams:
    """Power exponent r in [-1, 1] and weight t in [0, 1] for the path."""

    r: float
    t: float

    def __post_init__(self):
        if not -1.0 <= self.r <= 1.0:
            raise ValueError(f"path exponent r must lie in [-1, 1], got {self.r}")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"weight t must lie in [0, 1], got {self.t}")


def make_mean(name: str, f: Callable[[np.ndarray], np.ndarray]) -> OperatorMean:
    """Wrap a representing function, checking normalization and positivity.

    Verifies f(1) = 1 and f > 0 on a sample grid of (0, inf).  Operator
    monotonicity of f is assumed, not checked.
    """
    one = float(np.asarray(f(np.array([1.0])))[0])
    if abs(one - 1.0) > 1e-12:
        raise ValueError(f"representing function must satisfy f(1) = 1, got {one!r}")
    vals = np.asarray(f(_CHECK_GRID), dtype=np.float64)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
        raise ValueError("representing function must be positive and finite on (0, inf)")
    return OperatorMean(name, f)


def _check_weight(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"weight t must lie in [0, 1], got {t}")
    return t


def arithmetic(t: float = 0.5) -> OperatorMean:
    t = _check_weight(t)
    return OperatorMean(f"arith:{t:g}", lambda x: (1.0 - t) + t * x)


def geometric(t: float = 0.5) -> OperatorMean:
    t = _check_weight(t)
    return OperatorMean(f"geo:{t:g}", lambda x: x**t)


def harmonic(t: float = 0.5) -> OperatorMean:
    t = _check_weight(t)
    return OperatorMean(f"harm:{t:g}", lambda x: x / ((1.0 - t) * x + t))


def power_path(r: float, t: float) -> OperatorMean:
    """Mean of the interpolational path: f(x) = ((1-t) + t x^r)^(1/r).

    r = 1 is the weighted arithmetic mean, r = -1 the weighted harmonic,
    and |r| < R_EPS evaluates the r -> 0 geometric limit x^t.
    """
    params = PathParams(float(r), _check_weight(t))
    r, t = params.r, params.t
    if abs(r) < R_EPS:
        return OperatorMean(f"path:{r:g}:{t:g}", lambda x: x**t)
    return OperatorMean(
        f"path:{r:g}:{t:g}", lambda x: ((1.0 - t) + t * x**r) ** (1.0 / r)
    )


def mean(sigma: OperatorMean, a: HermitianMatrix, b: HermitianMatrix) -> HermitianMatrix:
    """Evaluate A sigma B = A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}.

    Both operands must be strictly positive definite; boundary extensions by
    limits are out of scope.
    """
    if a.dim != b.dim:
        raise matcore.DimensionMismatchError(f"dimensions differ: {a.dim} vs {b.dim}")
    dec = eigh(a)
    w = dec.eigenvalues
    if float(w[0]) <= 0.0 or not matcore.is_positive_definite(a):
        raise matcore.NotPositiveDefiniteError("left operand must be positive definite")
    assert_positive_definite(b, "right operand")
    u = dec.eigenvectors
    root = u * np.sqrt(w)  # A^{1/2} columns, reassembled below
    inv_root = u / np.sqrt(w)
    a_half = root @ u.conj().T
    a_inv_half = inv_root @ u.conj().T
    inner = matcore._wrap(a_inv_half @ b.mat @ a_inv_half)
    f_inner = matcore.apply_function(inner, sigma.f)
    return matcore._wrap(a_half @ f_inner.mat @ a_half)


def weighted_arithmetic(a: HermitianMatrix, b: HermitianMatrix, t: float) -> HermitianMatrix:
    t = _check_weight(t)
    if a.dim != b.dim:
        raise matcore.DimensionMismatchError(f"dimensions differ: {a.dim} vs {b.dim}")
    return (1.0 - t) * a + t * b


def weighted_harmonic(a: HermitianMatrix, b: HermitianMatrix, t: float) -> HermitianMatrix:
    t = _check_weight(t)
    assert_positive_definite(a, "left operand")
    assert_positive_definite(b, "right operand")
    if t == 0.0:
        return a
    if t == 1.0:
        return b
    return inverse((1.0 - t) * inverse(a) + t * inverse(b))


def weighted_geometric(a: HermitianMatrix, b: HermitianMatrix, t: float) -> HermitianMatrix:
    return mean(geometric(t), a, b)


def interpolational_path(
    a: HermitianMatrix, b: HermitianMatrix, params: PathParams
) -> HermitianMatrix:
    """Point on the path from the harmonic (r=-1) through the geometric
    (r=0) to the arithmetic (r=1) weighted mean."""
    if params.r == 1.0:
        assert_positive_definite(a, "left operand")
        assert_positive_definite(b, "right operand")
        return weighted_arithmetic(a, b, params.t)
    if params.r == -1.0:
        return weighted_harmonic(a, b, params.t)
    return mean(power_path(params.r, params.t), a, b)


def adjoint_mean(sigma: OperatorMean) -> OperatorMean:
    """Adjoint mean: A sigma* B = (A^{-1} sigma B^{-1})^{-1}.

    On representing functions this is f*(x) = 1 / f(1/x); it exchanges the
    arithmetic and harmonic means and fixes the geometric one.
    """
    f = sigma.f
    name = sigma.name[:-1] if sigma.name.endswith("*") else sigma.name + "*"
    return OperatorMean(name, lambda x: 1.0 / np.asarray(f(1.0 / np.asarray(x))))


def parse_mean(spec: str) -> OperatorMean:
    """Parse a mean id: "arith:t", "geo:t", "harm:t", or "path:r:t"."""
    parts = spec.split(":")
    try:
        if parts[0] == "arith" and len(parts) == 2:
            return arithmetic(float(parts[1]))
        if parts[0] == "geo" and len(parts) == 2:
            return geometric(float(parts[1]))
        if parts[0] == "harm" and len(parts) == 2:
            return harmonic(float(parts[1]))
        if parts[0] == "path" and len(parts) == 3:
            return power_path(float(parts[1]), float(parts[2]))
    except ValueError as exc:
        raise ValueError(f"bad mean id {spec!r}: {exc}") from None
    raise ValueError(
        f"unknown mean id {spec!r} (expected arith:t, geo:t, harm:t, or path:r:t)"
    )
