"""Composite operator and trace functionals.

The two-variable forms evaluated here are

    F1(A, B) = h[ Phi(f(A))^{1/2} Psi(g(B)) Phi(f(A))^{1/2} ]
    F2(A, B) = h[ Phi(f(A)) sigma Psi(g(B)) ]
    F3(A)    = h[ Phi(f(A)) ]

together with their traces, the Lieb-type trace form
Tr{Phi(f1(A))^p K* Psi(f2(B))^q K}, the Minkowski trace power
Tr[ Phi(A^p)^{1/p} ], and the operator-valued determinant
Delta_Phi(A) = exp Phi(log A) for unital Phi.

Scalar functions are drawn from a small named registry with explicit
domains so out-of-range spectra fail loudly rather than silently.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import matcore
from .matcore import (
    HermitianMatrix,
    MatrixError,
    ScalarFunction,
    apply_function,
    assert_positive_definite,
    mexp,
    mlog,
    mpow,
    msqrt,
)
from .maps import PositiveLinearMap, apply_map, identity_map
from .means import OperatorMean, mean, parse_mean

__all__ = [
    "FunctionalSpec",
    "parse_scalar",
    "F1",
    "F2",
    "F3",
    "trace_F2",
    "lieb_trace",
    "trace_minkowski_power",
    "op_determinant",
    "real_trace",
    "TraceResidueError",
    "spec_from_json",
    "spec_to_json",
]

log = logging.getLogger(__name__)

TRACE_RESIDUE_REL = 1e-10


class TraceResidueError(MatrixError):
    """A trace that must be real carried a large imaginary part."""


def _named(name, fn, **kw) -> ScalarFunction:
    return ScalarFunction(name, fn, **kw)


def parse_scalar(spec: str) -> ScalarFunction:
    """Resolve a scalar-function id.

    Known ids: "id", "sqrt", "log", "exp", "inv_log", "power:p".  Each
    carries the domain on which the functional calculus will accept it.
    """
    if spec == "id":
        return _named("id", lambda x: x)
    if spec == "sqrt":
        return _named("sqrt", np.sqrt, lo=0.0)
    if spec == "log":
        return _named("log", np.log, lo=0.0, lo_open=True)
    if spec == "exp":
        return _named("exp", np.exp)
    if spec == "inv_log":
        return _named("inv_log", lambda x: 1.0 / np.log(x), lo=1.0, lo_open=True)
    if spec.startswith("power:"):
        p = float(spec.split(":", 1)[1])
        if p == 1.0:
            return _named("power:1", lambda x: x)
        return _named(f"power:{p:g}", lambda x: x**p, lo=0.0, lo_open=True)
    raise ValueError(
        f"unknown scalar function {spec!r} "
        "(expected id, sqrt, log, exp, inv_log, or power:p)"
    )


def _as_scalar(f) -> ScalarFunction:
    return parse_scalar(f) if isinstance(f, str) else f


def _as_map(phi) -> PositiveLinearMap:
    if isinstance(phi, str):
        from .maps import parse_map

        return parse_map(phi)
    return phi


def _as_mean(sigma) -> OperatorMean:
    return parse_mean(sigma) if isinstance(sigma, str) else sigma


@dataclass(frozen=True)
class FunctionalSpec:
    """Ingredients of the composite functionals.

    Scalar slots accept registry ids or :class:`ScalarFunction` values;
    map/mean slots accept their ids or constructed objects.
    """

    f: ScalarFunction
    g: ScalarFunction
    h: ScalarFunction
    phi: PositiveLinearMap
    psi: PositiveLinearMap
    sigma: OperatorMean
    K: Optional[np.ndarray] = None

    @staticmethod
    def build(f="id", g="id", h="id", phi="id", psi="id", sigma="arith:0.5", K=None):
        return FunctionalSpec(
            _as_scalar(f),
            _as_scalar(g),
            _as_scalar(h),
            _as_map(phi),
            _as_map(psi),
            _as_mean(sigma),
            None if K is None else np.asarray(K, dtype=np.complex128),
        )


def F1(spec: FunctionalSpec, a: HermitianMatrix, b: HermitianMatrix) -> HermitianMatrix:
    """h[ Phi(f(A))^{1/2} Psi(g(B)) Phi(f(A))^{1/2} ]."""
    assert_positive_definite(a, "A")
    assert_positive_definite(b, "B")
    x = apply_map(spec.phi, apply_function(a, spec.f))
    y = apply_map(spec.psi, apply_function(b, spec.g))
    root = msqrt(x)
    inner = matcore._wrap(root.mat @ y.mat @ root.mat)
    return apply_function(inner, spec.h)


def F2(spec: FunctionalSpec, a: HermitianMatrix, b: HermitianMatrix) -> HermitianMatrix:
    """h[ Phi(f(A)) sigma Psi(g(B)) ]."""
    assert_positive_definite(a, "A")
    assert_positive_definite(b, "B")
    x = apply_map(spec.phi, apply_function(a, spec.f))
    y = apply_map(spec.psi, apply_function(b, spec.g))
    return apply_function(mean(spec.sigma, x, y), spec.h)


def F3(spec: FunctionalSpec, a: HermitianMatrix) -> HermitianMatrix:
    """h[ Phi(f(A)) ]."""
    assert_positive_definite(a, "A")
    return apply_function(apply_map(spec.phi, apply_function(a, spec.f)), spec.h)


def trace_F2(spec: FunctionalSpec, a: HermitianMatrix, b: HermitianMatrix) -> float:
    return matcore.trace(F2(spec, a, b))


def real_trace(m: np.ndarray) -> float:
    """Trace of a matrix that is real by theory.

    A small imaginary residue (relative 1e-10) is truncated with a warning;
    anything larger indicates an internal inconsistency and aborts.
    """
    t = complex(np.trace(m))
    if abs(t.imag) > TRACE_RESIDUE_REL * (1.0 + abs(t.real)):
        raise TraceResidueError(
            f"trace expected to be real has imaginary part {t.imag:.3e} "
            f"(real part {t.real:.3e})"
        )
    if abs(t.imag) > 1e-13 * (1.0 + abs(t.real)):
        # distinctly above rounding noise but below the abort threshold
        log.warning("discarding imaginary trace residue %.3e", t.imag)
    return float(t.real)


def lieb_trace(
    phi: PositiveLinearMap,
    psi: PositiveLinearMap,
    f1: ScalarFunction,
    f2: ScalarFunction,
    k: np.ndarray,
    p: float,
    a: HermitianMatrix,
    b: HermitianMatrix,
    second: str = "complement",
) -> float:
    """Tr{ Phi(f1(A))^p K* Psi(f2(B))^q K }.

    ``second`` selects the exponent on the second factor: "complement" uses
    q = 1 - p (the jointly concave regime, 0 <= p <= 1) and "shifted" uses
    q = -1 - p (the jointly convex regime, -1 <= p <= 0).
    """
    if second == "complement":
        q = 1.0 - p
    elif second == "shifted":
        q = -1.0 - p
    else:
        raise ValueError(f"second must be 'complement' or 'shifted', got {second!r}")
    assert_positive_definite(a, "A")
    assert_positive_definite(b, "B")
    x = mpow(apply_map(phi, apply_function(a, _as_scalar(f1))), p)
    y = mpow(apply_map(psi, apply_function(b, _as_scalar(f2))), q)
    k = np.asarray(k, dtype=np.complex128)
    return real_trace(x.mat @ k.conj().T @ y.mat @ k)


def trace_minkowski_power(phi: PositiveLinearMap, a: HermitianMatrix, p: float) -> float:
    """Tr[ Phi(A^p)^{1/p} ] for A > 0, p != 0, Phi unital."""
    if p == 0.0:
        raise ValueError("p must be nonzero")
    if not phi.unital:
        raise MatrixError("trace Minkowski power needs a unital map")
    return matcore.trace(mpow(apply_map(phi, mpow(a, p)), 1.0 / p))


def op_determinant(phi: PositiveLinearMap, a: HermitianMatrix) -> HermitianMatrix:
    """Operator-valued determinant Delta_Phi(A) = exp Phi(log A).

    Defined for unital positive Phi and A > 0; satisfies power equality,
    homogeneity, and the bounds ||A^{-1}||^{-1} <= Delta_Phi(A) <= ||A||.
    """
    if not phi.unital:
        raise MatrixError("operator-valued determinant needs a unital map")
    return mexp(apply_map(phi, mlog(a)))


def spec_to_json(spec: FunctionalSpec) -> dict:
    doc = {
        "f": spec.f.name,
        "g": spec.g.name,
        "h": spec.h.name,
        "phi": spec.phi.name,
        "psi": spec.psi.name,
        "sigma": spec.sigma.name,
    }
    if spec.K is not None:
        # K is a general (not necessarily Hermitian) matrix, so it is stored
        # as plain re/im entry lists rather than the Hermitian literal form.
        doc["K"] = {"re": spec.K.real.tolist(), "im": spec.K.imag.tolist()}
    return doc


def spec_from_json(doc: dict, base_dir: str = ".") -> FunctionalSpec:
    """Build a :class:`FunctionalSpec` from its JSON form.

    ``{"f": "power:0.5", "g": "power:0.5", "h": "id", "phi": "avg:2",
    "psi": "id", "sigma": "geo:0.5", "K": <matrix JSON or file name>?}``
    """
    from .maps import parse_map

    k = doc.get("K")
    if isinstance(k, str):
        import json as _json

        with open(f"{base_dir}/{k}") as fh:
            k = _json.load(fh)
    if isinstance(k, dict):
        re = np.asarray(k["re"], dtype=np.float64)
        im = np.asarray(k.get("im", np.zeros_like(re)), dtype=np.float64)
        k = re + 1j * im
    return FunctionalSpec(
        _as_scalar(doc.get("f", "id")),
        _as_scalar(doc.get("g", "id")),
        _as_scalar(doc.get("h", "id")),
        parse_map(doc.get("phi", "id"), base_dir),
        parse_map(doc.get("psi", "id"), base_dir),
        _as_mean(doc.get("sigma", "arith:0.5")),
        None if k is None else np.asarray(k, dtype=np.complex128),
    )
