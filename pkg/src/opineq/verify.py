"""Randomized inequality verification engine.

A check turns one random trial into a list of signed margins (nonnegative
means the inequality held); the engine runs seeded trials, applies the
scale-relative violation threshold, re-runs near-threshold trials with a
tightened eigensolver before counting them, and reduces everything into an
:class:`InequalityReport`.  Trial generators are derived from
(seed, salt, trial index), so results are independent of execution order
and identical across runs with the same config.

Also here: the random positive-definite sampler, the generic joint
convexity/concavity prober, the two fixed counterexample reproductions, the
Kantorovich-constant sandwiches, determinant bounds, and the randomized
violation search with local refinement.
"""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import matcore
from .constants import kantorovich, specht
from .functionals import op_determinant, real_trace
from .maps import PositiveLinearMap, apply_map
from .matcore import (
    HermitianMatrix,
    MatrixError,
    eigh,
    identity,
    inverse,
    loewner_leq,
    mpow,
    msqrt,
    operator_norm,
    tightened_eigensolver,
)
from .means import OperatorMean, weighted_arithmetic, weighted_geometric

__all__ = [
    "ProbeConfig",
    "InequalityReport",
    "MarginRecord",
    "trial_rng",
    "haar_unitary",
    "sample_pd",
    "sample_pd_dim",
    "sample_invertible",
    "sample_correlation",
    "run_trials",
    "merge_reports",
    "check_joint_convexity",
    "check_mean_monotonicity",
    "check_reverse_jensen",
    "check_minkowski_sandwich",
    "check_determinant_bounds",
    "check_trace_theorems",
    "reproduce_counterexample_sqrt_geo",
    "reproduce_counterexample_minkowski",
    "search_violations",
]

FULL_LAMBDA_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)


@dataclass(frozen=True)
class ProbeConfig:
    """Sampling contract for randomized checks.

    ``dims`` is the inclusive range matrices are drawn from, ``window`` the
    spectral enclosure [m, M] of every sampled matrix, ``lambdas`` the
    convex-combination weights probed (midpoint by default; midpoint
    convexity plus continuity already implies convexity for these
    functionals, the full grid is for paranoia runs).
    """

    trials: int = 200
    dims: tuple[int, int] = (2, 5)
    lambdas: tuple[float, ...] = (0.5,)
    tol: float = 1e-9
    seed: int = 0
    window: tuple[float, float] = (0.5, 2.0)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        lo, hi = self.dims
        if not (1 <= lo <= hi):
            raise ValueError(f"bad dimension range {self.dims}")
        m, M = self.window
        if not (0.0 < m <= M):
            raise ValueError(f"spectral window must satisfy 0 < m <= M, got {self.window}")
        if any(not 0.0 <= l <= 1.0 for l in self.lambdas) or not self.lambdas:
            raise ValueError("lambda grid must be a nonempty subset of [0, 1]")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")

    def replace(self, **kw) -> "ProbeConfig":
        return dataclasses.replace(self, **kw)

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "dims": list(self.dims),
            "lambdas": list(self.lambdas),
            "tol": self.tol,
            "seed": self.seed,
            "window": list(self.window),
        }

    @staticmethod
    def from_json(doc: dict) -> "ProbeConfig":
        return ProbeConfig(
            trials=int(doc.get("trials", 200)),
            dims=tuple(doc.get("dims", (2, 5))),
            lambdas=tuple(doc.get("lambdas", (0.5,))),
            tol=float(doc.get("tol", 1e-9)),
            seed=int(doc.get("seed", 0)),
            window=tuple(doc.get("window", (0.5, 2.0))),
        )


@dataclass
class MarginRecord:
    """One signed margin from a trial.

    ``margin >= 0`` means the inequality held; a violation is counted when
    margin < -tol * (1 + scale).  ``informational`` records are tracked in
    the report extras but never counted as violations (used for auxiliary
    stronger-form margins).
    """

    margin: float
    scale: float
    label: str
    witness: Optional[dict] = None
    informational: bool = False


@dataclass
class InequalityReport:
    """Outcome of a verification run."""

    theorem: str
    trials: int
    violations: int
    worst_margin: float
    seed: int
    config: dict
    marginal_count: int = 0
    witness: Optional[dict] = None
    passed: bool = True
    expect_violation: bool = False
    elapsed_s: float = 0.0
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        doc = {
            "theorem": self.theorem,
            "trials": self.trials,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "seed": self.seed,
            "config": self.config,
            "marginal_count": self.marginal_count,
            "passed": self.passed,
            "expect_violation": self.expect_violation,
            "elapsed_s": self.elapsed_s,
        }
        if self.witness is not None:
            doc["witness"] = self.witness
        if self.extras:
            doc["extras"] = self.extras
        return doc


def trial_rng(seed: int, salt: int, index: int) -> np.random.Generator:
    """Generator for one trial, independent of execution order."""
    return np.random.default_rng([seed, salt, index])


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the phase-fixed QR of a Gaussian."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def sample_pd_dim(dim: int, window: tuple[float, float], rng) -> HermitianMatrix:
    """Positive definite matrix with spectrum inside [m, M]."""
    m, M = window
    if m == M:
        return float(m) * identity(dim)
    lam = rng.uniform(m, M, dim)
    u = haar_unitary(dim, rng)
    return matcore._wrap((u * lam) @ u.conj().T)


def sample_pd(config: ProbeConfig, rng) -> HermitianMatrix:
    """Positive definite sample at a dimension drawn from the config range."""
    dim = int(rng.integers(config.dims[0], config.dims[1] + 1))
    return sample_pd_dim(dim, config.window, rng)


def sample_invertible(dim: int, rng) -> np.ndarray:
    """Invertible matrix with singular values in [0.3, 2] (well conditioned)."""
    u = haar_unitary(dim, rng)
    v = haar_unitary(dim, rng)
    s = rng.uniform(0.3, 2.0, dim)
    return (u * s) @ v


def sample_correlation(dim: int, rng) -> HermitianMatrix:
    """Random PSD matrix with unit diagonal (Schur multiplier material)."""
    z = rng.normal(size=(dim, dim + 2)) + 1j * rng.normal(size=(dim, dim + 2))
    g = z @ z.conj().T
    d = np.sqrt(np.real(np.diagonal(g)))
    return matcore._wrap(g / np.outer(d, d))


# ---------------------------------------------------------------------------
# trial runner


def run_trials(
    theorem: str,
    config: ProbeConfig,
    trial_fn: Callable[[np.random.Generator, ProbeConfig], list[MarginRecord]],
    expect_violation: bool = False,
    salt: int = 0,
    trials: Optional[int] = None,
    stop_at_first_violation: bool = False,
) -> InequalityReport:
    """Run seeded trials of ``trial_fn`` and reduce margins into a report.

    Near-threshold margins (within 10x the scaled tolerance) mark the trial
    as marginal; the whole trial is recomputed with a tightened eigensolver
    and only the recomputed margins are counted.  Trials that raise
    :class:`MatrixError` are recorded under extras["errors"] and excluded
    from the verdict.
    """
    t0 = time.perf_counter()
    n_trials = config.trials if trials is None else trials
    worst = math.inf
    worst_threshold = 0.0
    violations = 0
    marginal = 0
    errors = 0
    first_error = None
    witness = None
    info_worst: dict[str, float] = {}

    for i in range(n_trials):
        try:
            recs = trial_fn(trial_rng(config.seed, salt, i), config, i)
        except MatrixError as exc:
            errors += 1
            if first_error is None:
                first_error = {"trial": i, "error": str(exc)}
            continue

        def _thr(rec: MarginRecord) -> float:
            return config.tol * (1.0 + rec.scale)

        counted = [r for r in recs if not r.informational]
        if any(r.margin < 10.0 * _thr(r) for r in counted):
            marginal += 1
            with tightened_eigensolver():
                recs = trial_fn(trial_rng(config.seed, salt, i), config, i)
            counted = [r for r in recs if not r.informational]

        violated = False
        for rec in recs:
            if rec.informational:
                prev = info_worst.get(rec.label, math.inf)
                if rec.margin < prev:
                    info_worst[rec.label] = rec.margin
                continue
            if rec.margin < worst:
                worst = rec.margin
                worst_threshold = _thr(rec)
            if rec.margin < -_thr(rec):
                violated = True
                if witness is None or rec.margin < witness["margin"]:
                    witness = {
                        "trial": i,
                        "salt": salt,
                        "label": rec.label,
                        "margin": rec.margin,
                        "scale": rec.scale,
                        "eig_sweep_tol": matcore.TIGHT_SWEEP_TOL,
                        "inputs": rec.witness or {},
                    }
        if violated:
            violations += 1
            if stop_at_first_violation:
                break

    passed = (violations > 0) if expect_violation else (violations == 0)
    report = InequalityReport(
        theorem=theorem,
        trials=n_trials,
        violations=violations,
        worst_margin=worst if worst is not math.inf else 0.0,
        seed=config.seed,
        config=config.to_json(),
        marginal_count=marginal,
        witness=witness,
        passed=passed,
        expect_violation=expect_violation,
        elapsed_s=time.perf_counter() - t0,
    )
    if info_worst:
        report.extras["informational_worst"] = dict(sorted(info_worst.items()))
    if errors:
        report.extras["errors"] = {"count": errors, "first": first_error}
        report.passed = False
    return report


def merge_reports(
    theorem: str, parts: Sequence[InequalityReport], config: ProbeConfig
) -> InequalityReport:
    """Combine per-case reports (min margin, summed counts, all must pass)."""
    worst = min((p.worst_margin for p in parts), default=0.0)
    witness = None
    for p in parts:
        if p.witness is not None and (witness is None or p.witness["margin"] < witness["margin"]):
            witness = dict(p.witness, case=p.theorem)
    merged = InequalityReport(
        theorem=theorem,
        trials=sum(p.trials for p in parts),
        violations=sum(p.violations for p in parts),
        worst_margin=worst,
        seed=config.seed,
        config=config.to_json(),
        marginal_count=sum(p.marginal_count for p in parts),
        witness=witness,
        passed=all(p.passed for p in parts),
        expect_violation=any(p.expect_violation for p in parts),
        elapsed_s=sum(p.elapsed_s for p in parts),
    )
    merged.extras["cases"] = {
        p.theorem: {
            "trials": p.trials,
            "violations": p.violations,
            "worst_margin": p.worst_margin,
            "passed": p.passed,
            **({"extras": p.extras} if p.extras else {}),
        }
        for p in parts
    }
    return merged


# ---------------------------------------------------------------------------
# margin helpers


def loewner_margin(
    lhs: HermitianMatrix, rhs: HermitianMatrix, label: str, witness: Optional[dict] = None
) -> MarginRecord:
    """Margin of lhs <= rhs: lambda_min(rhs - lhs) with the gap norm as scale."""
    w = eigh(rhs - lhs).eigenvalues
    margin = float(w[0])
    scale = float(max(abs(w[0]), abs(w[-1])))
    return MarginRecord(margin, scale, label, witness)


def scalar_margin(
    lhs: float, rhs: float, label: str, witness: Optional[dict] = None
) -> MarginRecord:
    """Margin of lhs <= rhs for scalars."""
    return MarginRecord(rhs - lhs, max(abs(lhs), abs(rhs)), label, witness)


def equality_margin(
    err: float, scale: float, atol_rel: float, label: str, witness: Optional[dict] = None
) -> MarginRecord:
    """Margin for an equality check |err| <= atol_rel * (1 + scale).

    Pre-normalized: the record carries scale 0, so the engine threshold
    reduces to the config tolerance on top of the stated one.
    """
    return MarginRecord(atol_rel * (1.0 + scale) - abs(err), 0.0, label, witness)


def _geo_mid(x: HermitianMatrix, y: HermitianMatrix) -> HermitianMatrix:
    return weighted_geometric(x, y, 0.5)


# ---------------------------------------------------------------------------
# joint convexity probing

Pack = tuple[HermitianMatrix, ...]


def convexity_records(
    F: Callable[..., object],
    draw: Callable[[np.random.Generator, ProbeConfig], tuple[Pack, Pack]],
    mode: str,
    comparison: str,
    rng: np.random.Generator,
    config: ProbeConfig,
    label: str = "",
) -> list[MarginRecord]:
    """Margins of one randomly drawn joint convexity/concavity trial.

    ``draw`` produces both endpoint packs at once so their shapes agree.
    """
    x1, x2 = draw(rng, config)
    return records_for_packs(F, x1, x2, mode, comparison, config, label)


def records_for_packs(
    F: Callable[..., object],
    x1: Pack,
    x2: Pack,
    mode: str,
    comparison: str,
    config: ProbeConfig,
    label: str = "",
) -> list[MarginRecord]:
    """Margins of one joint convexity/concavity comparison on fixed packs.

    ``F`` maps a pack of matrices to a Hermitian matrix (comparison
    "loewner") or a float ("scalar").  ``mode`` is one of convex, concave,
    log-convex, log-concave.  The log modes compare the image of the
    midpoint pack against the geometric mean of the endpoint images, which
    is their defining form; the plain modes run over the config lambda grid.
    """
    wit = {
        "mode": mode,
        **{f"X1_{j}": matcore.matrix_to_json(m) for j, m in enumerate(x1)},
        **{f"X2_{j}": matcore.matrix_to_json(m) for j, m in enumerate(x2)},
    }
    f1 = F(*x1)
    f2 = F(*x2)
    recs = []
    if mode in ("log-convex", "log-concave"):
        mid = tuple(weighted_arithmetic(a, b, 0.5) for a, b in zip(x1, x2))
        fm = F(*mid)
        if comparison == "loewner":
            gmean = _geo_mid(f1, f2)
            lhs, rhs = (fm, gmean) if mode == "log-convex" else (gmean, fm)
            recs.append(loewner_margin(lhs, rhs, f"{label}{mode}", wit))
        else:
            if f1 <= 0.0 or f2 <= 0.0:
                raise MatrixError("scalar log-convexity needs positive values")
            gmean = math.sqrt(f1 * f2)
            lhs, rhs = (fm, gmean) if mode == "log-convex" else (gmean, fm)
            recs.append(scalar_margin(lhs, rhs, f"{label}{mode}", wit))
            # harmonic-mean form: a stronger bound that the trace arguments
            # actually deliver; tracked but not a pass/fail criterion
            hmean = 2.0 / (1.0 / f1 + 1.0 / f2)
            hm = (hmean - fm) if mode == "log-convex" else (fm - hmean)
            recs.append(
                MarginRecord(hm, max(abs(fm), abs(hmean)), f"{label}{mode}-harmonic",
                             informational=True)
            )
        return recs

    for lam in config.lambdas:
        mid = tuple(weighted_arithmetic(a, b, lam) for a, b in zip(x1, x2))
        fm = F(*mid)
        wl = dict(wit, weight=lam)
        if comparison == "loewner":
            mix = (1.0 - lam) * f1 + lam * f2
            lhs, rhs = (fm, mix) if mode == "convex" else (mix, fm)
            recs.append(loewner_margin(lhs, rhs, f"{label}{mode}:{lam:g}", wl))
        else:
            mix = (1.0 - lam) * f1 + lam * f2
            lhs, rhs = (fm, mix) if mode == "convex" else (mix, fm)
            recs.append(scalar_margin(lhs, rhs, f"{label}{mode}:{lam:g}", wl))
    return recs


def pd_pack_drawer(arity: int, dim: Optional[int] = None):
    """Draw two endpoint packs of ``arity`` positive matrices at one dim."""

    def draw(rng, config):
        d = dim if dim is not None else int(rng.integers(config.dims[0], config.dims[1] + 1))
        x1 = tuple(sample_pd_dim(d, config.window, rng) for _ in range(arity))
        x2 = tuple(sample_pd_dim(d, config.window, rng) for _ in range(arity))
        return x1, x2

    return draw


def check_joint_convexity(
    F,
    mode: str,
    comparison: str,
    config: ProbeConfig,
    arity: int = 2,
    theorem: str = "joint-convexity",
    draw=None,
    expect_violation: bool = False,
    salt: int = 0,
) -> InequalityReport:
    """Randomized joint convexity/concavity check of a matrix functional."""
    if mode not in ("convex", "concave", "log-convex", "log-concave"):
        raise ValueError(f"unknown mode {mode!r}")
    if comparison not in ("loewner", "scalar"):
        raise ValueError(f"unknown comparison {comparison!r}")
    drawer = draw if draw is not None else pd_pack_drawer(arity)

    def trial(rng, cfg, idx):
        return convexity_records(F, drawer, mode, comparison, rng, cfg)

    return run_trials(theorem, config, trial, expect_violation=expect_violation, salt=salt)


# ---------------------------------------------------------------------------
# named checks


def check_mean_monotonicity(
    phi: PositiveLinearMap, sigma: OperatorMean, config: ProbeConfig, salt: int = 0
) -> InequalityReport:
    """Phi(A sigma B) <= Phi(A) sigma Phi(B) on random positive pairs."""
    from .means import mean

    def trial(rng, cfg, idx):
        dim = int(rng.integers(cfg.dims[0], cfg.dims[1] + 1))
        in_dim = phi.blocks * dim if phi.kind == "averaging" else dim
        if phi.kind in ("congruence", "schur") and phi.matrix is not None:
            in_dim = phi.matrix.shape[0]
        a = sample_pd_dim(in_dim, cfg.window, rng)
        b = sample_pd_dim(in_dim, cfg.window, rng)
        lhs = apply_map(phi, mean(sigma, a, b))
        rhs = mean(sigma, apply_map(phi, a), apply_map(phi, b))
        wit = {"A": matcore.matrix_to_json(a), "B": matcore.matrix_to_json(b)}
        return [loewner_margin(lhs, rhs, f"{phi.name}|{sigma.name}", wit)]

    return run_trials(
        f"mean-map-monotonicity[{phi.name},{sigma.name}]", config, trial, salt=salt
    )


def _jensen_regime(p: float) -> int:
    if 0.0 < p <= 1.0:
        return 1
    if -1.0 <= p < 0.0 or 1.0 < p <= 2.0:
        return 2
    return 3


def reverse_jensen_records(
    phi: PositiveLinearMap, a: HermitianMatrix, p: float, h: float, label: str, wit
) -> list[MarginRecord]:
    """Two-sided reverse Jensen bounds for Phi(A^p) vs Phi(A)^p."""
    k = kantorovich(h, p)
    phi_ap = apply_map(phi, mpow(a, p))
    phi_a_p = mpow(apply_map(phi, a), p)
    regime = _jensen_regime(p)
    if regime == 1:
        lo, hi = k * phi_a_p, phi_a_p
    elif regime == 2:
        lo, hi = phi_a_p, k * phi_a_p
    else:
        lo, hi = (1.0 / k) * phi_a_p, k * phi_a_p
    return [
        loewner_margin(lo, phi_ap, f"{label}:lower", wit),
        loewner_margin(phi_ap, hi, f"{label}:upper", wit),
    ]


def check_reverse_jensen(
    phi_kind: str, p: float, config: ProbeConfig, salt: int = 0
) -> InequalityReport:
    """Reverse Jensen inequality with the Kantorovich constant of the window."""
    h = config.window[1] / config.window[0]

    def trial(rng, cfg, idx):
        phi, in_dim = draw_unital_map(phi_kind, rng, cfg)
        a = sample_pd_dim(in_dim, cfg.window, rng)
        wit = {"A": matcore.matrix_to_json(a), "map": phi.name}
        return reverse_jensen_records(phi, a, p, h, f"{phi_kind}:p={p:g}", wit)

    return run_trials(f"reverse-jensen[{phi_kind},p={p:g}]", config, trial, salt=salt)


def draw_unital_map(kind: str, rng, config: ProbeConfig) -> tuple[PositiveLinearMap, int]:
    """Instantiate one of the unital map families at a random dimension.

    Returns the map and the input dimension it expects.  Kinds: "id",
    "avg:n", "pinch", "schur", "congr-u" (unitary congruence).
    """
    from . import maps

    dim = int(rng.integers(config.dims[0], config.dims[1] + 1))
    if kind == "id":
        return maps.identity_map(), dim
    if kind.startswith("avg:"):
        n = int(kind.split(":")[1])
        return maps.averaging(n), n * dim
    if kind == "pinch":
        if dim < 2:
            return maps.pinching(), dim
        cut = int(rng.integers(1, dim))
        part = (tuple(range(cut)), tuple(range(cut, dim)))
        return maps.pinching(part), dim
    if kind == "schur":
        return maps.schur(sample_correlation(dim, rng)), dim
    if kind == "congr-u":
        return maps.congruence(haar_unitary(dim, rng), unital=True), dim
    raise ValueError(f"unknown unital map kind {kind!r}")


def draw_positive_map(kind: str, rng, config: ProbeConfig) -> tuple[PositiveLinearMap, int]:
    """Like :func:`draw_unital_map` plus the non-unital "congr" kind."""
    from . import maps

    if kind == "congr":
        dim = int(rng.integers(config.dims[0], config.dims[1] + 1))
        return maps.congruence(sample_invertible(dim, rng)), dim
    return draw_unital_map(kind, rng, config)


def _mink_regime(p: float) -> tuple[int, float]:
    """Regime and K-exponent sign pattern for the Minkowski sandwich."""
    if p >= 1.0:
        return 1, 1.0 / p
    if p <= -1.0 or 0.5 <= p < 1.0:
        return 2, 1.0 / p
    if -1.0 < p < 0.0 or 0.0 < p < 0.5:
        return 3, 2.0 / p
    raise ValueError("p must be nonzero")


def minkowski_sandwich_records(
    phi: PositiveLinearMap,
    a: HermitianMatrix,
    b: HermitianMatrix,
    p: float,
    h: float,
    label: str,
    wit,
) -> list[MarginRecord]:
    regime, expo = _mink_regime(p)
    k = kantorovich(h, p)
    mid = mpow(apply_map(phi, mpow(a + b, p)), 1.0 / p)
    s = mpow(apply_map(phi, mpow(a, p)), 1.0 / p) + mpow(apply_map(phi, mpow(b, p)), 1.0 / p)
    if regime == 1:
        lo, hi = k ** (-expo), k**expo
    else:
        lo, hi = k**expo, k ** (-expo)
    return [
        loewner_margin(lo * s, mid, f"{label}:lower", wit),
        loewner_margin(mid, hi * s, f"{label}:upper", wit),
    ]


def check_minkowski_sandwich(
    phi_kind: str, p: float, config: ProbeConfig, salt: int = 0
) -> InequalityReport:
    """Two-sided Minkowski operator bound with regime-correct K exponents."""
    if p == 0.0:
        raise ValueError("p must be nonzero")
    h = config.window[1] / config.window[0]

    def trial(rng, cfg, idx):
        phi, in_dim = draw_unital_map(phi_kind, rng, cfg)
        a = sample_pd_dim(in_dim, cfg.window, rng)
        b = sample_pd_dim(in_dim, cfg.window, rng)
        wit = {"A": matcore.matrix_to_json(a), "B": matcore.matrix_to_json(b), "map": phi.name}
        return minkowski_sandwich_records(phi, a, b, p, h, f"{phi_kind}:p={p:g}", wit)

    return run_trials(f"minkowski-operator[{phi_kind},p={p:g}]", config, trial, salt=salt)


def check_determinant_bounds(
    phi_kind: str, config: ProbeConfig, p: Optional[float] = None, salt: int = 0
) -> InequalityReport:
    """Specht-ratio bounds for the operator-valued determinant of a sum.

    With ``p`` unset this is the additive two-sided bound with S(h)^{+-2};
    with ``p >= 1`` the Minkowski-type bound with S(h^{1/p})^{+-3} and
    K(h, 1/p).
    """
    h = config.window[1] / config.window[0]

    def trial(rng, cfg, idx):
        phi, in_dim = draw_unital_map(phi_kind, rng, cfg)
        a = sample_pd_dim(in_dim, cfg.window, rng)
        b = sample_pd_dim(in_dim, cfg.window, rng)
        wit = {"A": matcore.matrix_to_json(a), "B": matcore.matrix_to_json(b), "map": phi.name}
        da = op_determinant(phi, a)
        db = op_determinant(phi, b)
        dsum = op_determinant(phi, a + b)
        if p is None:
            s2 = specht(h) ** 2
            return [
                loewner_margin((1.0 / s2) * (da + db), dsum, "sum:lower", wit),
                loewner_margin(dsum, s2 * (da + db), "sum:upper", wit),
            ]
        c = 2.0 ** (1.0 - 1.0 / p)
        s3 = specht(h ** (1.0 / p)) ** 3
        k = kantorovich(h, 1.0 / p)
        lhs = mpow(da, 1.0 / p) + mpow(db, 1.0 / p)
        mid = mpow(dsum, 1.0 / p)
        return [
            loewner_margin(c * (1.0 / s3) * k * mid, lhs, f"p={p:g}:lower", wit),
            loewner_margin(lhs, c * s3 * mid, f"p={p:g}:upper", wit),
        ]

    name = f"determinant-bounds[{phi_kind}" + (f",p={p:g}]" if p is not None else "]")
    return run_trials(name, config, trial, salt=salt)


def check_trace_theorems(theorem_id: str, config: ProbeConfig) -> InequalityReport:
    """Run one of the registered trace-functional checks by id."""
    from . import suite

    entry = suite.get_check(theorem_id)
    if not entry.trace_family:
        raise ValueError(f"{theorem_id!r} is not a trace-functional check")
    return entry.run(config)


# ---------------------------------------------------------------------------
# fixed counterexamples

# 2x2 instance: squaring before the geometric mean breaks midpoint convexity
# of (A, B) -> (A^2 # B^2)^{1/2}.
SQRT_GEO_INSTANCE = {
    "A1": [[2.0, 1.0], [1.0, 2.0]],
    "A2": [[1.0, 0.0], [0.0, 2.0]],
    "B1": [[4.0, -2.0], [-2.0, 3.0]],
    "B2": [[1.0, -1.0], [-1.0, 3.0]],
}
SQRT_GEO_LHS = [[1.7915, -0.3082], [-0.3082, 2.1739]]
SQRT_GEO_RHS = [[1.6622, -0.3026], [-0.3026, 2.1916]]

# 3x3 instance: the operator Minkowski inequality fails for p = 2, n = 2.
MINKOWSKI_INSTANCE = {
    "A1": [[3.0, -1.0, 0.0], [-1.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    "A2": [[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    "B1": [[1.0, 0.0, 0.0], [0.0, 1.0, -1.0], [0.0, -1.0, 1.0]],
    "B2": [[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 1.0, 2.0]],
}
MINKOWSKI_DIFF = [
    [0.180869, -0.119435, -0.238421],
    [-0.119435, 0.501802, 0.0713442],
    [-0.238421, 0.0713442, 0.188193],
]
# Eigenvalue list as printed at the source.  Its middle entry (0.32367) is a
# digit slip: the printed difference matrix above has middle eigenvalue
# 0.3232669..., consistent with recomputing the expression exactly.  Both
# values are kept so the discrepancy stays visible.
MINKOWSKI_EIGS_PRINTED = [-0.0562778, 0.32367, 0.603875]
MINKOWSKI_EIGS_EXACT = [-0.0562778048, 0.3232669243, 0.6038752389]


def sqrt_geo_value(a: HermitianMatrix, b: HermitianMatrix) -> HermitianMatrix:
    """(A^2 # B^2)^{1/2} — the functional whose convexity fails."""
    return msqrt(_geo_mid(mpow(a, 2.0), mpow(b, 2.0)))


def reproduce_counterexample_sqrt_geo(tol_entry: float = 5e-4) -> InequalityReport:
    """Recompute the fixed 2x2 convexity counterexample and match goldens."""
    t0 = time.perf_counter()
    m = {k: matcore.hermitian(v) for k, v in SQRT_GEO_INSTANCE.items()}
    lhs = sqrt_geo_value(
        weighted_arithmetic(m["A1"], m["A2"], 0.5),
        weighted_arithmetic(m["B1"], m["B2"], 0.5),
    )
    rhs = 0.5 * (sqrt_geo_value(m["A1"], m["B1"]) + sqrt_geo_value(m["A2"], m["B2"]))
    err_lhs = float(np.max(np.abs(lhs.mat - np.asarray(SQRT_GEO_LHS))))
    err_rhs = float(np.max(np.abs(rhs.mat - np.asarray(SQRT_GEO_RHS))))
    cmp = loewner_leq(lhs, rhs)
    golden_ok = err_lhs <= tol_entry and err_rhs <= tol_entry
    report = InequalityReport(
        theorem="counterexample-sqrt-geo",
        trials=1,
        violations=int(not cmp.holds),
        worst_margin=cmp.margin,
        seed=0,
        config={"tol_entry": tol_entry},
        witness={"inputs": {k: matcore.matrix_to_json(v) for k, v in m.items()}},
        passed=golden_ok and not cmp.holds and cmp.margin < 0.0,
        expect_violation=True,
        elapsed_s=time.perf_counter() - t0,
        extras={
            "lhs": np.round(lhs.mat.real, 6).tolist(),
            "rhs": np.round(rhs.mat.real, 6).tolist(),
            "golden_err": {"lhs": err_lhs, "rhs": err_rhs},
            "loewner_holds": cmp.holds,
        },
    )
    return report


def reproduce_counterexample_minkowski(
    tol_entry: float = 5e-6, tol_eig: float = 1e-5
) -> InequalityReport:
    """Recompute the fixed 3x3 operator Minkowski counterexample."""
    t0 = time.perf_counter()
    m = {k: matcore.hermitian(v) for k, v in MINKOWSKI_INSTANCE.items()}
    diff = (
        msqrt(mpow(m["A1"], 2.0) + mpow(m["A2"], 2.0))
        + msqrt(mpow(m["B1"], 2.0) + mpow(m["B2"], 2.0))
        - msqrt(mpow(m["A1"] + m["B1"], 2.0) + mpow(m["A2"] + m["B2"], 2.0))
    )
    err = float(np.max(np.abs(diff.mat - np.asarray(MINKOWSKI_DIFF))))
    w = eigh(diff).eigenvalues
    err_eig = float(np.max(np.abs(np.sort(w) - np.sort(np.asarray(MINKOWSKI_EIGS_EXACT)))))
    err_eig_printed = float(
        np.max(np.abs(np.sort(w) - np.sort(np.asarray(MINKOWSKI_EIGS_PRINTED))))
    )
    lam_min = float(w[0])
    report = InequalityReport(
        theorem="counterexample-minkowski",
        trials=1,
        violations=int(lam_min < 0.0),
        worst_margin=lam_min,
        seed=0,
        config={"tol_entry": tol_entry, "tol_eig": tol_eig},
        witness={"inputs": {k: matcore.matrix_to_json(v) for k, v in m.items()}},
        passed=err <= tol_entry and err_eig <= tol_eig and lam_min < 0.0,
        expect_violation=True,
        elapsed_s=time.perf_counter() - t0,
        extras={
            "difference": diff.mat.real.tolist(),
            "eigenvalues": [float(x) for x in w],
            "golden_err": {
                "entries": err,
                "eigenvalues": err_eig,
                "eigenvalues_vs_printed_list": err_eig_printed,
            },
        },
    )
    return report


# ---------------------------------------------------------------------------
# violation search


def search_violations(
    F,
    mode: str,
    comparison: str,
    config: ProbeConfig,
    arity: int = 2,
    theorem: str = "violation-search",
    draw=None,
    seed_instances: Sequence[tuple[Pack, Pack]] = (),
    refine: bool = True,
    salt: int = 0,
) -> InequalityReport:
    """Randomized falsification: keep the most negative convexity margin.

    ``seed_instances`` are endpoint packs tried before random sampling
    (known witnesses make the search deterministic where existence is
    already established).  With ``refine`` the worst witness is sharpened
    by coordinate-perturbation hill climbing on the margin.
    """
    drawer = draw if draw is not None else pd_pack_drawer(arity)
    seeds = list(seed_instances)

    def trial(rng, cfg, idx):
        if idx < len(seeds):
            x1, x2 = seeds[idx]
            return records_for_packs(F, x1, x2, mode, comparison, cfg)
        return convexity_records(F, drawer, mode, comparison, rng, cfg)

    report = run_trials(theorem, config, trial, expect_violation=True, salt=salt)
    if refine and report.witness is not None:
        refined = _refine_witness(F, report.witness, mode, comparison, config)
        report.extras["refined_margin"] = refined
    return report


def _unpack_witness(witness: dict) -> tuple[Pack, Pack]:
    xs1, xs2 = [], []
    for key in sorted(witness["inputs"]):
        if key.startswith("X1_"):
            xs1.append(matcore.matrix_from_json(witness["inputs"][key]))
        elif key.startswith("X2_"):
            xs2.append(matcore.matrix_from_json(witness["inputs"][key]))
    return tuple(xs1), tuple(xs2)


def _refine_witness(F, witness: dict, mode, comparison, config) -> float:
    """Greedy local sharpening of a violation margin; returns the best margin."""
    x1, x2 = _unpack_witness(witness)
    if not x1:
        return witness["margin"]

    def margin_of(p1: Pack, p2: Pack) -> float:
        recs = records_for_packs(F, p1, p2, mode, comparison, config)
        return min(r.margin for r in recs if not r.informational)

    best = margin_of(x1, x2)
    rng = np.random.default_rng([config.seed, 987654321])
    for step in (0.2, 0.08, 0.03, 0.01):
        for _ in range(12):
            which = int(rng.integers(0, 2))
            slot = int(rng.integers(0, len(x1)))
            pack = list(x1 if which == 0 else x2)
            dim = pack[slot].dim
            z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            cand = pack[slot] + matcore._wrap(step * 0.5 * (z + z.conj().T))
            if not matcore.is_positive_definite(cand):
                continue
            pack[slot] = cand
            c1 = tuple(pack) if which == 0 else x1
            c2 = tuple(pack) if which == 1 else x2
            try:
                m = margin_of(c1, c2)
            except MatrixError:
                continue
            if m < best:
                best = m
                x1, x2 = c1, c2
    return best
