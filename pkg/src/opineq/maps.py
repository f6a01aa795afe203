"""Positive linear and multilinear maps applied structurally.

Maps are tagged descriptions (congruence, averaging over direct-sum blocks,
pinching, Schur multiplier, trace, identity) applied by their defining
formulas — never materialized as n^2 x n^2 super-operators, which keeps the
tensor-product checks exact and cheap.  A multilinear map is a positive
linear map composed with the k-fold tensor product.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import matcore
from .matcore import DimensionMismatchError, HermitianMatrix, MatrixError
from .means import OperatorMean

__all__ = [
    "PositiveLinearMap",
    "MultilinearMap",
    "identity_map",
    "congruence",
    "averaging",
    "pinching",
    "schur",
    "trace_map",
    "tensor_map",
    "apply_map",
    "multi_apply",
    "kron",
    "hadamard",
    "check_mean_monotonicity",
    "parse_map",
]


@dataclass(frozen=True)
class PositiveLinearMap:
    """Tagged positive linear map between matrix algebras.

    kind is one of "identity", "congruence", "averaging", "pinching",
    "schur", "trace".  ``unital`` records whether the map fixes the
    identity (checked at construction where it is a constraint, e.g.
    K*K = I for a unital congruence).
    """

    kind: str
    name: str
    unital: bool
    matrix: Optional[np.ndarray] = None  # K for congruence, C for schur
    blocks: int = 0  # averaging arity
    partition: Optional[tuple] = None  # pinching index groups

    def __call__(self, a: HermitianMatrix) -> HermitianMatrix:
        return apply_map(self, a)

    def output_dim(self, in_dim: int) -> int:
        if self.kind == "congruence":
            return self.matrix.shape[1]
        if self.kind == "averaging":
            if in_dim % self.blocks:
                raise DimensionMismatchError(
                    f"averaging over {self.blocks} blocks needs dim divisible "
                    f"by {self.blocks}, got {in_dim}"
                )
            return in_dim // self.blocks
        if self.kind == "trace":
            return 1
        return in_dim

    def __repr__(self) -> str:
        return f"PositiveLinearMap({self.name!r})"


def identity_map() -> PositiveLinearMap:
    return PositiveLinearMap("identity", "id", unital=True)


def congruence(k: np.ndarray, unital: bool = False) -> PositiveLinearMap:
    """Map A -> K* A K.  With ``unital=True`` the constraint K*K = I is
    enforced at construction."""
    k = np.asarray(k, dtype=np.complex128)
    if k.ndim != 2:
        raise MatrixError("congruence matrix must be 2-d")
    if unital:
        gram = k.conj().T @ k
        if not np.allclose(gram, np.eye(k.shape[1]), atol=1e-10, rtol=0.0):
            raise MatrixError("unital congruence requires K*K = I")
    return PositiveLinearMap("congruence", "congr", unital=unital, matrix=k)


def averaging(blocks: int = 2) -> PositiveLinearMap:
    """Map A1 (+) ... (+) An -> (A1 + ... + An)/n on direct sums."""
    if blocks < 1:
        raise ValueError("averaging needs at least one block")
    return PositiveLinearMap("averaging", f"avg:{blocks}", unital=True, blocks=blocks)


def pinching(partition: Optional[Sequence[Sequence[int]]] = None) -> PositiveLinearMap:
    """Block-diagonal projection onto an index partition.

    Without a partition the map pinches every index separately, i.e. keeps
    only the diagonal.
    """
    part = None
    if partition is not None:
        part = tuple(tuple(int(i) for i in group) for group in partition)
        seen = [i for group in part for i in group]
        if len(seen) != len(set(seen)):
            raise MatrixError("pinching partition has repeated indices")
    return PositiveLinearMap("pinching", "pinch", unital=True, partition=part)


def schur(c) -> PositiveLinearMap:
    """Schur multiplier A -> C o A with a correlation matrix C (PSD, unit
    diagonal); unit diagonal makes it unital."""
    cm = c.mat if isinstance(c, HermitianMatrix) else HermitianMatrix(c).mat
    if not np.allclose(np.diagonal(cm), 1.0, atol=1e-10):
        raise MatrixError("Schur multiplier matrix must have unit diagonal")
    w = matcore.eigh(matcore._wrap(cm)).eigenvalues
    if float(w[0]) < -1e-10 * max(1.0, float(abs(w[-1]))):
        raise MatrixError("Schur multiplier matrix must be positive semidefinite")
    return PositiveLinearMap("schur", "schur", unital=True, matrix=cm)


def trace_map() -> PositiveLinearMap:
    """A -> [Tr A] as a 1x1 matrix (positive linear functional)."""
    return PositiveLinearMap("trace", "tr", unital=False)


def apply_map(phi: PositiveLinearMap, a: HermitianMatrix) -> HermitianMatrix:
    """Apply a positive linear map; Hermitian in, Hermitian out."""
    m = a.mat
    n = a.dim
    if phi.kind == "identity":
        return a
    if phi.kind == "congruence":
        k = phi.matrix
        if k.shape[0] != n:
            raise DimensionMismatchError(
                f"congruence matrix expects dim {k.shape[0]}, got {n}"
            )
        return matcore._wrap(k.conj().T @ m @ k)
    if phi.kind == "averaging":
        d = phi.output_dim(n)
        acc = np.zeros((d, d), dtype=np.complex128)
        for i in range(phi.blocks):
            acc += m[i * d : (i + 1) * d, i * d : (i + 1) * d]
        return matcore._wrap(acc / phi.blocks)
    if phi.kind == "pinching":
        part = phi.partition
        if part is None:
            return matcore._wrap(np.diag(np.diagonal(m)))
        flat = sorted(i for g in part for i in g)
        if flat != list(range(n)):
            raise DimensionMismatchError(
                f"pinching partition does not cover indices 0..{n - 1}"
            )
        out = np.zeros_like(m)
        for g in part:
            idx = np.asarray(g)
            out[np.ix_(idx, idx)] = m[np.ix_(idx, idx)]
        return matcore._wrap(out)
    if phi.kind == "schur":
        if phi.matrix.shape[0] != n:
            raise DimensionMismatchError(
                f"Schur multiplier expects dim {phi.matrix.shape[0]}, got {n}"
            )
        return matcore._wrap(phi.matrix * m)
    if phi.kind == "trace":
        return matcore._wrap(np.array([[np.trace(m)]], dtype=np.complex128))
    raise MatrixError(f"unknown map kind {phi.kind!r}")


def kron(a: HermitianMatrix, b: HermitianMatrix) -> HermitianMatrix:
    """Tensor product; eigenvalues are all products lambda_i * mu_j."""
    return matcore._wrap(np.kron(a.mat, b.mat))


def hadamard(a: HermitianMatrix, b: HermitianMatrix) -> HermitianMatrix:
    """Entrywise product; PSD for PSD factors (Schur product theorem)."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimensions differ: {a.dim} vs {b.dim}")
    return matcore._wrap(a.mat * b.mat)


@dataclass(frozen=True)
class MultilinearMap:
    """Positive multilinear map: (A_1, ..., A_k) -> post(A_1 (x) ... (x) A_k)."""

    arity: int
    post: PositiveLinearMap

    @property
    def name(self) -> str:
        return f"tensor{self.arity}>{self.post.name}"

    def __call__(self, *operands: HermitianMatrix) -> HermitianMatrix:
        return multi_apply(self, operands)


def tensor_map(arity: int, post: Optional[PositiveLinearMap] = None) -> MultilinearMap:
    if arity < 1:
        raise ValueError("arity must be >= 1")
    return MultilinearMap(arity, post if post is not None else identity_map())


def multi_apply(
    phi: MultilinearMap, operands: Sequence[HermitianMatrix]
) -> HermitianMatrix:
    if len(operands) != phi.arity:
        raise DimensionMismatchError(
            f"map of arity {phi.arity} applied to {len(operands)} operands"
        )
    dims = {op.dim for op in operands}
    if len(dims) != 1:
        raise DimensionMismatchError(f"operand dimensions differ: {sorted(dims)}")
    acc = operands[0].mat
    for op in operands[1:]:
        acc = np.kron(acc, op.mat)
    return apply_map(phi.post, matcore._wrap(acc))


def check_mean_monotonicity(
    phi: PositiveLinearMap, sigma: OperatorMean, trials: int = 200, seed: int = 0
):
    """Probe Phi(A sigma B) <= Phi(A) sigma Phi(B) on random positive pairs.

    Returns an :class:`opineq.verify.InequalityReport`; zero violations are
    expected for every positive map and mean.
    """
    from . import verify  # runtime import; verify builds on this module

    config = verify.ProbeConfig(trials=trials, seed=seed)
    return verify.check_mean_monotonicity(phi, sigma, config)


def parse_map(spec: str, base_dir: str = ".") -> PositiveLinearMap:
    """Parse a map id: "id", "avg:n", "congr:FILE", "pinch", "schur:FILE".

    FILE arguments name JSON matrix documents relative to ``base_dir``.
    """
    if spec == "id":
        return identity_map()
    if spec == "pinch":
        return pinching()
    if spec == "tr":
        return trace_map()
    if spec.startswith("avg:"):
        return averaging(int(spec.split(":", 1)[1]))
    if spec.startswith("congr:") or spec.startswith("schur:"):
        kind, path = spec.split(":", 1)
        with open(os.path.join(base_dir, path)) as fh:
            doc = json.load(fh)
        if kind == "congr":
            return congruence(matcore.matrix_from_json(doc).mat)
        return schur(matcore.matrix_from_json(doc))
    raise ValueError(
        f"unknown map id {spec!r} (expected id, avg:n, congr:FILE, pinch, schur:FILE)"
    )
