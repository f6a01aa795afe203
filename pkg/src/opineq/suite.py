"""Named theorem checks: the registry behind ``opineq verify``.

Each entry bundles a theorem-level statement with its sampling defaults and
parameter grid, producing an :class:`InequalityReport`.  Expected-violation
entries (the fixed counterexamples and the searches) invert the pass
criterion: they fail when no violation is found.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import matcore, verify
from .constants import kantorovich, specht
from .functionals import lieb_trace, op_determinant, parse_scalar
from .maps import apply_map, averaging, identity_map, multi_apply, pinching, tensor_map
from .matcore import ScalarFunction, apply_function, mpow, trace as mtrace
from .means import (
    PathParams,
    arithmetic,
    geometric,
    harmonic,
    interpolational_path,
    mean,
    power_path,
    weighted_arithmetic,
    weighted_geometric,
    weighted_harmonic,
)
from .verify import (
    InequalityReport,
    MarginRecord,
    ProbeConfig,
    draw_positive_map,
    draw_unital_map,
    equality_margin,
    loewner_margin,
    merge_reports,
    records_for_packs,
    run_trials,
    sample_pd_dim,
    scalar_margin,
)

__all__ = ["CheckEntry", "REGISTRY", "ALIASES", "get_check", "list_checks", "run_all"]


@dataclass(frozen=True)
class CheckEntry:
    name: str
    summary: str
    fn: Callable[..., InequalityReport]
    params: dict = field(default_factory=dict)
    config_overrides: dict = field(default_factory=dict)
    expect_violation: bool = False
    trace_family: bool = False

    def resolve_config(self, config: ProbeConfig, explicit=()) -> ProbeConfig:
        kw = {k: v for k, v in self.config_overrides.items() if k not in explicit}
        return config.replace(**kw) if kw else config

    def run(self, config: ProbeConfig, explicit=(), **param_overrides) -> InequalityReport:
        cfg = self.resolve_config(config, explicit)
        report = self.fn(cfg, **{**self.params, **param_overrides})
        report.theorem = self.name
        return report


REGISTRY: dict[str, CheckEntry] = {}
ALIASES = {"thm-MO": "minkowski-operator-sandwich"}


def _register(entry: CheckEntry) -> None:
    REGISTRY[entry.name] = entry


def get_check(name: str) -> CheckEntry:
    name = ALIASES.get(name, name)
    if name not in REGISTRY:
        known = ", ".join(sorted(REGISTRY))
        raise KeyError(f"unknown theorem id {name!r}; registered: {known}")
    return REGISTRY[name]


def list_checks() -> list[tuple[str, str]]:
    return [(e.name, e.summary) for e in REGISTRY.values()]


def run_all(config: ProbeConfig, explicit=()) -> list[InequalityReport]:
    """Run every registered check with its own defaults under one seed."""
    return [entry.run(config, explicit=explicit) for entry in REGISTRY.values()]


# ---------------------------------------------------------------------------
# shared builders

_MEAN_FAMILIES = ("arith", "geo", "harm", "path")


def _draw_mean(rng):
    t = float(rng.uniform(0.0, 1.0))
    fam = _MEAN_FAMILIES[int(rng.integers(0, 4))]
    if fam == "arith":
        return arithmetic(t)
    if fam == "geo":
        return geometric(t)
    if fam == "harm":
        return harmonic(t)
    return power_path(float(rng.uniform(-1.0, 1.0)), t)


def _draw_dim(rng, config):
    return int(rng.integers(config.dims[0], config.dims[1] + 1))


def _sum_power(mats, p: float):
    acc = mpow(mats[0], p)
    for m in mats[1:]:
        acc = acc + mpow(m, p)
    return mpow(acc, 1.0 / p)


# ---------------------------------------------------------------------------
# fixed counterexamples


def _run_cex_sqrt_geo(config, **_):
    return verify.reproduce_counterexample_sqrt_geo()


def _run_cex_minkowski(config, **_):
    return verify.reproduce_counterexample_minkowski()


_register(
    CheckEntry(
        "counterexample-sqrt-geo",
        "fixed 2x2 instance: (A,B) -> (A^2 # B^2)^{1/2} is not midpoint convex",
        _run_cex_sqrt_geo,
        expect_violation=True,
    )
)
_register(
    CheckEntry(
        "counterexample-minkowski",
        "fixed 3x3 instance: the operator Minkowski inequality fails at p=2, n=2",
        _run_cex_minkowski,
        expect_violation=True,
    )
)


# ---------------------------------------------------------------------------
# mean axioms and exchange identities


def _run_mean_axioms(config, **_):
    def trial(rng, cfg, idx):
        d = _draw_dim(rng, cfg)
        sigma = _draw_mean(rng)
        a = sample_pd_dim(d, cfg.window, rng)
        b = sample_pd_dim(d, cfg.window, rng)
        p = sample_pd_dim(d, (1e-3, 1.0), rng)
        q = sample_pd_dim(d, (1e-3, 1.0), rng)
        wit = {"A": matcore.matrix_to_json(a), "B": matcore.matrix_to_json(b)}
        recs = [
            loewner_margin(
                mean(sigma, a, b), mean(sigma, a + p, b + q), f"monotone[{sigma.name}]", wit
            )
        ]
        x = verify.sample_invertible(d, rng)
        t1 = matcore._wrap(x.conj().T @ mean(sigma, a, b).mat @ x)
        t2 = mean(
            sigma,
            matcore._wrap(x.conj().T @ a.mat @ x),
            matcore._wrap(x.conj().T @ b.mat @ x),
        )
        err = matcore.operator_norm(t1 - t2)
        recs.append(
            equality_margin(err, matcore.operator_norm(t2), 1e-8, f"transformer[{sigma.name}]", wit)
        )
        return recs

    return run_trials("mean-axioms", config, trial)


def _run_mean_map_monotonicity(config, **_):
    kinds = ("id", "avg:2", "pinch", "schur", "congr-u", "congr")

    def trial(rng, cfg, idx):
        phi, in_dim = draw_positive_map(kinds[int(rng.integers(0, len(kinds)))], rng, cfg)
        sigma = _draw_mean(rng)
        a = sample_pd_dim(in_dim, cfg.window, rng)
        b = sample_pd_dim(in_dim, cfg.window, rng)
        lhs = apply_map(phi, mean(sigma, a, b))
        rhs = mean(sigma, apply_map(phi, a), apply_map(phi, b))
        wit = {"A": matcore.matrix_to_json(a), "B": matcore.matrix_to_json(b)}
        return [loewner_margin(lhs, rhs, f"{phi.name}|{sigma.name}", wit)]

    return run_trials("mean-map-monotonicity", config, trial)


def _run_mean_harmonic_exchange(config, **_):
    def trial(rng, cfg, idx):
        d = _draw_dim(rng, cfg)
        sigma = _draw_mean(rng)
        x, y, z, w = (sample_pd_dim(d, cfg.window, rng) for _ in range(4))
        lhs = mean(sigma, weighted_harmonic(x, y, 0.5), weighted_harmonic(z, w, 0.5))
        rhs = weighted_harmonic(mean(sigma, x, z), mean(sigma, y, w), 0.5)
        return [loewner_margin(lhs, rhs, sigma.name)]

    return run_trials("mean-harmonic-exchange", config, trial)


_PATH_R_GRID = (-1.0, -0.5, -1e-5, 1e-5, 0.5, 1.0)
_PATH_T_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))


def _run_path_sandwich(config, **_):
    def trial(rng, cfg, idx):
        d = _draw_dim(rng, cfg)
        a = sample_pd_dim(d, cfg.window, rng)
        b = sample_pd_dim(d, cfg.window, rng)
        recs = []
        for t in _PATH_T_GRID:
            lo = weighted_harmonic(a, b, t)
            hi = weighted_arithmetic(a, b, t)
            for r in _PATH_R_GRID:
                midp = interpolational_path(a, b, PathParams(r, t))
                recs.append(loewner_margin(lo, midp, f"harm<=path[r={r:g},t={t:g}]"))
                recs.append(loewner_margin(midp, hi, f"path<=arith[r={r:g},t={t:g}]"))
        return recs

    return run_trials("path-sandwich", config, trial)


def _run_path_monotone(config, **_):
    def trial(rng, cfg, idx):
        d = _draw_dim(rng, cfg)
        a = sample_pd_dim(d, cfg.window, rng)
        b = sample_pd_dim(d, cfg.window, rng)
        recs = []
        for t in _PATH_T_GRID:
            points = [interpolational_path(a, b, PathParams(r, t)) for r in _PATH_R_GRID]
            for r1, r2, p1, p2 in zip(_PATH_R_GRID, _PATH_R_GRID[1:], points, points[1:]):
                recs.append(loewner_margin(p1, p2, f"r:{r1:g}<={r2:g}[t={t:g}]"))
        return recs

    return run_trials("path-r-monotone", config, trial)


_register(
    CheckEntry(
        "mean-axioms",
        "joint monotonicity and the transformer equality for invertible X, all built-in means",
        _run_mean_axioms,
    )
)
_register(
    CheckEntry(
        "mean-map-monotonicity",
        "Phi(A s B) <= Phi(A) s Phi(B) for positive linear maps and all built-in means",
        _run_mean_map_monotonicity,
    )
)
_register(
    CheckEntry(
        "mean-harmonic-exchange",
        "[X!Y] s [Z!W] <= [XsZ] ! [YsW] on random positive quadruples",
        _run_mean_harmonic_exchange,
    )
)
_register(
    CheckEntry(
        "path-sandwich",
        "A !_t B <= A m_{r,t} B <= A nabla_t B over the (r, t) grid",
        _run_path_sandwich,
    )
)
_register(
    CheckEntry(
        "path-r-monotone",
        "r -> A m_{r,t} B is nondecreasing along the r grid",
        _run_path_monotone,
    )
)


# ---------------------------------------------------------------------------
# operator log-convexity characterizations


def _run_logconvex_decreasing(config, **_):
    t_grid = (0.25, 0.5, 0.75)
    r_grid = (-1.0, -0.5, 0.0, 0.5)

    def trial(rng, cfg, idx):
        d = _draw_dim(rng, cfg)
        a = sample_pd_dim(d, cfg.window, rng)
        b = sample_pd_dim(d, cfg.window, rng)
        recs = []
        for p in (0.3, 0.7, 1.0):
            f = parse_scalar(f"power:{-p}")
            for t in t_grid:
                fa = apply_function(a, f)
                fb = apply_function(b, f)
                fm = apply_function(weighted_arithmetic(a, b, t), f)
                recs.append(
                    loewner_margin(fm, weighted_geometric(fa, fb, t), f"geo[p={p:g},t={t:g}]")
                )
        f = parse_scalar("power:-0.5")
        fa = apply_function(a, f)
        fb = apply_function(b, f)
        for r in r_grid:
            for t in t_grid:
                fm = apply_function(weighted_arithmetic(a, b, t), f)
                recs.append(
                    loewner_margin(
                        fm,
                        interpolational_path(fa, fb, PathParams(r, t)),
                        f"path[r={r:g},t={t:g}]",
                    )
                )
        return recs

    return run_trials("logconvex-decreasing", config, trial)


def _run_logconcave_increasing(config, **_):
    def trial(rng, cfg, idx):
        d = _draw_dim(rng, cfg)
        a = sample_pd_dim(d, cfg.window, rng)
        b = sample_pd_dim(d, cfg.window, rng)
        recs = []
        for p in (0.3, 0.7, 1.0):
            f = parse_scalar(f"power:{p}")
            fa = apply_function(a, f)
            fb = apply_function(b, f)
            for t in (0.25, 0.5, 0.75):
                fm = apply_function(weighted_arithmetic(a, b, t), f)
                recs.append(
                    loewner_margin(weighted_geometric(fa, fb, t), fm, f"p={p:g},t={t:g}")
                )
        return recs

    return run_trials("logconcave-increasing", config, trial)


_MONOTONE_FNS = (
    parse_scalar("sqrt"),
    ScalarFunction("log1p", np.log1p, lo=0.0),
    ScalarFunction("x/(1+x)", lambda x: x / (1.0 + x), lo=0.0),
)


def _run_harmonic_subadditive(config, **_):
    def trial(rng, cfg, idx):
        d = _draw_dim(rng, cfg)
        a = sample_pd_dim(d, cfg.window, rng)
        b = sample_pd_dim(d, cfg.window, rng)
        recs = []
        for h in _MONOTONE_FNS:
            ha = apply_function(a, h)
            hb = apply_function(b, h)
            for t in (0.25, 0.5, 0.75):
                hm = apply_function(weighted_harmonic(a, b, t), h)
                recs.append(
                    loewner_margin(hm, weighted_harmonic(ha, hb, t), f"{h.name},t={t:g}")
                )
        return recs

    return run_trials("harmonic-subadditive", config, trial)


_register(
    CheckEntry(
        "logconvex-decreasing",
        "f operator monotone decreasing: f(A nabla_t B) <= f(A) m_{r,t} f(B)",
        _run_logconvex_decreasing,
    )
)
_register(
    CheckEntry(
        "logconcave-increasing",
        "f operator monotone: f(A nabla_t B) >= f(A) #_t f(B)",
        _run_logconcave_increasing,
    )
)
_register(
    CheckEntry(
        "harmonic-subadditive",
        "h operator monotone: h(A !_t B) <= h(A) !_t h(B)",
        _run_harmonic_subadditive,
    )
)


# ---------------------------------------------------------------------------
# joint log-convexity of the mean functional (operator level)

_F2_COMBOS = (
    ("avg:2", "avg:2", "geo:0.5", "sqrt"),
    ("pinch", "congr", "harm:0.3", "id"),
    ("schur", "congr-u", "path:0.5:0.5", "x/(1+x)"),
)

_H_FNS = {
    "id": parse_scalar("id"),
    "sqrt": parse_scalar("sqrt"),
    "x/(1+x)": ScalarFunction("x/(1+x)", lambda x: x / (1.0 + x), lo=0.0),
}


def _f2_case(config, mode, power, kphi, kpsi, mean_id, h_name, salt):
    from .means import parse_mean

    sigma = parse_mean(mean_id)
    f = parse_scalar(f"power:{power}")
    h = _H_FNS[h_name]

    def trial(rng, cfg, idx):
        d = _draw_dim(rng, cfg)
        one = cfg.replace(dims=(d, d))
        phi, da = draw_positive_map(kphi, rng, one)
        psi, db = draw_positive_map(kpsi, rng, one)

        def F(a, b):
            x = apply_map(phi, apply_function(a, f))
            y = apply_map(psi, apply_function(b, f))
            return apply_function(mean(sigma, x, y), h)

        x1 = (sample_pd_dim(da, cfg.window, rng), sample_pd_dim(db, cfg.window, rng))
        x2 = (sample_pd_dim(da, cfg.window, rng), sample_pd_dim(db, cfg.window, rng))
        return records_for_packs(F, x1, x2, mode, "loewner", cfg)

    label = f"{kphi}/{kpsi}/{mean_id}/h={h_name}"
    return run_trials(label, config, trial, salt=salt)


def _run_f2_logconvex(config, **_):
    parts = [
        _f2_case(config, "log-convex", -0.5, *combo, salt=i)
        for i, combo in enumerate(_F2_COMBOS)
    ]
    return merge_reports("f2-joint-logconvex", parts, config)


def _run_f2_logconcave(config, **_):
    parts = [
        _f2_case(config, "log-concave", 0.5, *combo, salt=i)
        for i, combo in enumerate(_F2_COMBOS)
    ]
    return merge_reports("f2-joint-logconcave", parts, config)


_register(
    CheckEntry(
        "f2-joint-logconvex",
        "h(Phi(f(A)) s Psi(f(B))) jointly log-convex for operator log-convex f",
        _run_f2_logconvex,
    )
)
_register(
    CheckEntry(
        "f2-joint-logconcave",
        "h(Phi(f(A)) s Psi(f(B))) jointly log-concave for operator log-concave f",
        _run_f2_logconcave,
    )
)


# ---------------------------------------------------------------------------
# trace suite


def _two_slot_drawer(kphi, kpsi):
    def draw(rng, config):
        d = _draw_dim(rng, config)
        da = 2 * d if kphi.startswith("avg") else d
        db = 2 * d if kpsi.startswith("avg") else d
        x1 = (sample_pd_dim(da, config.window, rng), sample_pd_dim(db, config.window, rng))
        x2 = (sample_pd_dim(da, config.window, rng), sample_pd_dim(db, config.window, rng))
        return x1, x2

    return draw


def _unital_by_kind(kind, dim, rng):
    if kind == "avg:2":
        return averaging(2)
    if kind == "pinch":
        if dim < 2:
            return pinching()
        cut = int(rng.integers(1, dim))
        return pinching((tuple(range(cut)), tuple(range(cut, dim))))
    if kind == "id":
        return identity_map()
    if kind == "schur":
        return verify.draw_unital_map("schur", rng, ProbeConfig(dims=(dim, dim)))[0]
    raise ValueError(kind)


def _run_trace_f2(config, **_):
    m_lo = config.window[0]
    c_affine = m_lo**-0.5 + 1.0
    c_mobius = 2.0 / m_lo**0.5
    cases = [
        # (label, f power, h, mode, phi kind, psi kind, mean id)
        ("logconvex/h=sqrt", -0.5, parse_scalar("sqrt"), "log-convex", "avg:2", "avg:2", "geo:0.5"),
        ("convex/h=square", -0.5, parse_scalar("power:2"), "convex", "pinch", "id", "harm:0.5"),
        (
            "concave/h=affine-dec",
            -0.5,
            ScalarFunction("affine-dec", lambda x: c_affine - x, hi=c_affine, hi_open=True),
            "concave",
            "avg:2",
            "pinch",
            "geo:0.5",
        ),
        ("concave/h=sqrt", 0.5, parse_scalar("sqrt"), "concave", "pinch", "avg:2", "arith:0.5"),
        ("convex/h=inv", 0.5, parse_scalar("power:-1"), "convex", "id", "pinch", "geo:0.3"),
        (
            "logconvex/h=mobius",
            0.5,
            ScalarFunction(
                "mobius",
                lambda x: x / (c_mobius * x - 1.0),
                lo=1.0 / c_mobius,
                lo_open=True,
            ),
            "log-convex",
            "avg:2",
            "avg:2",
            "harm:0.5",
        ),
    ]
    from .means import parse_mean

    parts = []
    for salt, (label, pw, h, mode, kphi, kpsi, mean_id) in enumerate(cases):
        sigma = parse_mean(mean_id)
        f = parse_scalar(f"power:{pw}")

        def trial(rng, cfg, idx, kphi=kphi, kpsi=kpsi, sigma=sigma, f=f, h=h, mode=mode):
            d = _draw_dim(rng, cfg)
            da = 2 * d if kphi == "avg:2" else d
            db = 2 * d if kpsi == "avg:2" else d
            phi = _unital_by_kind(kphi, da, rng)
            psi = _unital_by_kind(kpsi, db, rng)

            def F(a, b):
                x = apply_map(phi, apply_function(a, f))
                y = apply_map(psi, apply_function(b, f))
                return mtrace(apply_function(mean(sigma, x, y), h))

            x1 = (sample_pd_dim(da, cfg.window, rng), sample_pd_dim(db, cfg.window, rng))
            x2 = (sample_pd_dim(da, cfg.window, rng), sample_pd_dim(db, cfg.window, rng))
            return records_for_packs(F, x1, x2, mode, "scalar", cfg)

        parts.append(run_trials(label, config, trial, salt=salt))
    return merge_reports("trace-f2-convexity", parts, config)


_register(
    CheckEntry(
        "trace-f2-convexity",
        "Tr h(Phi(f(A)) s Psi(f(B))): all six monotonicity/convexity cases of h",
        _run_trace_f2,
        trace_family=True,
    )
)


def _run_trace_inv_power(config, p_grid=(-1.0, -0.5, 0.5, 1.0), **_):
    def trial(rng, cfg, idx):
        p = float(p_grid[int(rng.integers(0, len(p_grid)))])
        kind = ("avg:2", "pinch")[int(rng.integers(0, 2))]
        phi, din = draw_unital_map(kind, rng, cfg)

        def F(a):
            return mtrace(mpow(apply_map(phi, mpow(a, p)), -1.0 / p))

        x1 = (sample_pd_dim(din, cfg.window, rng),)
        x2 = (sample_pd_dim(din, cfg.window, rng),)
        return records_for_packs(F, x1, x2, "convex", "scalar", cfg, label=f"p={p:g}:")

    return run_trials("trace-inv-power-convex", config, trial)


_register(
    CheckEntry(
        "trace-inv-power-convex",
        "A -> Tr[Phi(A^p)^{-1/p}] is convex for p in [-1,1] minus 0",
        _run_trace_inv_power,
        params={"p_grid": (-1.0, -0.5, 0.5, 1.0)},
        trace_family=True,
    )
)


def _run_trace_deformed_minkowski(config, p_grid=(-1.0, -0.5, 0.5, 1.0), **_):
    def trial(rng, cfg, idx):
        p = float(p_grid[int(rng.integers(0, len(p_grid)))])
        kind = ("avg:2", "pinch", "schur")[int(rng.integers(0, 3))]
        phi, din = draw_unital_map(kind, rng, cfg)
        a = sample_pd_dim(din, cfg.window, rng)
        b = sample_pd_dim(din, cfg.window, rng)

        def g(x):
            return mtrace(mpow(apply_map(phi, mpow(x, p)), -1.0 / p))

        return [scalar_margin(g(a + b), g(a) + g(b), f"p={p:g}")]

    return run_trials("trace-deformed-minkowski", config, trial)


_register(
    CheckEntry(
        "trace-deformed-minkowski",
        "Tr[Phi((A+B)^p)^{-1/p}] <= Tr[Phi(A^p)^{-1/p}] + Tr[Phi(B^p)^{-1/p}]",
        _run_trace_deformed_minkowski,
        params={"p_grid": (-1.0, -0.5, 0.5, 1.0)},
        trace_family=True,
    )
)


def _run_lieb_trace_concave(config, p_grid=(0.3, 0.5, 0.7), **_):
    idm = identity_map()

    def trial(rng, cfg, idx):
        d = _draw_dim(rng, cfg)
        p = float(p_grid[int(rng.integers(0, len(p_grid)))])
        if rng.integers(0, 2):
            k = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        else:
            k = np.eye(d, dtype=np.complex128)

        def F(a, b):
            return lieb_trace(idm, idm, "id", "id", k, p, a, b)

        x1 = (sample_pd_dim(d, cfg.window, rng), sample_pd_dim(d, cfg.window, rng))
        x2 = (sample_pd_dim(d, cfg.window, rng), sample_pd_dim(d, cfg.window, rng))
        return records_for_packs(F, x1, x2, "concave", "scalar", cfg, label=f"p={p:g}:")

    return run_trials("lieb-trace-concave", config, trial)


_register(
    CheckEntry(
        "lieb-trace-concave",
        "(A,B) -> Tr K* A^p K B^{1-p} is jointly concave for 0 <= p <= 1",
        _run_lieb_trace_concave,
        trace_family=True,
    )
)


def _run_lieb_trace_general(config, **_):
    f_fns = ("sqrt", "power:0.8")
    cases = [(0.3, "complement", "concave"), (0.7, "complement", "concave"),
             (-0.3, "shifted", "convex"), (-0.7, "shifted", "convex")]

    parts = []
    for salt, (p, second, mode) in enumerate(cases):
        def trial(rng, cfg, idx, p=p, second=second, mode=mode):
            d = _draw_dim(rng, cfg)
            k = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            phi = averaging(2)
            psi = _unital_by_kind("pinch", d, rng)
            f1 = parse_scalar(f_fns[int(rng.integers(0, 2))])
            f2 = parse_scalar(f_fns[int(rng.integers(0, 2))])

            def F(a, b):
                return lieb_trace(phi, psi, f1, f2, k, p, a, b, second)

            x1 = (sample_pd_dim(2 * d, cfg.window, rng), sample_pd_dim(d, cfg.window, rng))
            x2 = (sample_pd_dim(2 * d, cfg.window, rng), sample_pd_dim(d, cfg.window, rng))
            return records_for_packs(F, x1, x2, mode, "scalar", cfg)

        parts.append(run_trials(f"p={p:g}({mode})", config, trial, salt=salt))
    return merge_reports("lieb-trace-general", parts, config)


_register(
    CheckEntry(
        "lieb-trace-general",
        "Tr{Phi(f1(A))^p K* Psi(f2(B))^q K}: concave (q=1-p) / convex (q=-1-p) regimes",
        _run_lieb_trace_general,
        trace_family=True,
    )
)


def _multilinear_cases(config, mode_set):
    cases = [(2, 3, "id"), (2, 3, "pinch"), (3, 2, "id"), (3, 2, "pinch")]
    powers = (0.4, 0.7, 1.0)
    parts = []
    for salt, (k, dim, post_kind) in enumerate(cases):
        post = identity_map() if post_kind == "id" else pinching()
        tmap = tensor_map(k, post)
        ps = powers[:k]

        def tensor_F(*mats, inv=False):
            vals = [apply_function(m, lambda x, p=p: x ** (-p)) for m, p in zip(mats, ps)]
            out = multi_apply(tmap, vals)
            return matcore.inverse(out) if inv else out

        def trial(rng, cfg, idx, k=k, dim=dim, tensor_F=tensor_F):
            x1 = tuple(sample_pd_dim(dim, cfg.window, rng) for _ in range(k))
            x2 = tuple(sample_pd_dim(dim, cfg.window, rng) for _ in range(k))
            recs = []
            if "direct" in mode_set:
                recs += records_for_packs(
                    tensor_F, x1, x2, "log-convex", "loewner", cfg, label="map:"
                )
            if "inverse" in mode_set:
                recs += records_for_packs(
                    lambda *m: tensor_F(*m, inv=True), x1, x2, "log-concave", "loewner",
                    cfg, label="inverse-map:",
                )
            if "trace" in mode_set:
                recs += records_for_packs(
                    lambda *m: mtrace(matcore.mexp(tensor_F(*m))), x1, x2, "convex",
                    "scalar", cfg, label="trace-exp:",
                )
            return recs

        parts.append(run_trials(f"k={k},post={post_kind}", config, trial, salt=salt))
    return parts


def _run_multilinear_logconvex(config, **_):
    parts = _multilinear_cases(config, {"direct", "inverse", "trace"})
    return merge_reports("multilinear-logconvex", parts, config)


_register(
    CheckEntry(
        "multilinear-logconvex",
        "tensor-backed multilinear maps of f_i(A_i): log-convex, inverse log-concave, "
        "Tr exp convex",
        _run_multilinear_logconvex,
        trace_family=True,
    )
)


def _run_multilinear_geo_subadditive(config, **_):
    cases = [(2, 3, "id"), (2, 3, "pinch"), (3, 2, "id"), (3, 2, "pinch")]
    parts = []
    for salt, (k, dim, post_kind) in enumerate(cases):
        post = identity_map() if post_kind == "id" else pinching()
        tmap = tensor_map(k, post)

        def trial(rng, cfg, idx, k=k, dim=dim, tmap=tmap):
            t = float(rng.uniform(0.1, 0.9))
            a = [sample_pd_dim(dim, cfg.window, rng) for _ in range(k)]
            b = [sample_pd_dim(dim, cfg.window, rng) for _ in range(k)]
            lhs = multi_apply(tmap, [weighted_geometric(x, y, t) for x, y in zip(a, b)])
            rhs = weighted_geometric(multi_apply(tmap, a), multi_apply(tmap, b), t)
            return [loewner_margin(lhs, rhs, f"t={t:.3f}")]

        parts.append(run_trials(f"k={k},post={post_kind}", config, trial, salt=salt))
    return merge_reports("multilinear-geo-subadditive", parts, config)


_register(
    CheckEntry(
        "multilinear-geo-subadditive",
        "Phi(A1 # B1, ..., Ak # Bk) <= Phi(A..) # Phi(B..) for tensor-backed maps",
        _run_multilinear_geo_subadditive,
        config_overrides={"trials": 100},
    )
)


# ---------------------------------------------------------------------------
# Kantorovich/Specht constants and the sandwiches built on them


def _run_constants_identities(config, **_):
    h_grid = (1.5, 2.0, 5.0, 20.0)
    p_grid = (-2.0, -1.0, -0.3, 0.2, 0.5, 0.8, 1.5, 3.0)
    r_grid = (0.3, 0.7, 2.0)

    def trial(rng, cfg, idx):
        recs = [
            equality_margin(kantorovich(4.0, 2.0) - 1.5625, 1.0, 1e-12, "K(4,2)=25/16")
        ]
        for h in h_grid:
            for p in p_grid:
                k = kantorovich(h, p)
                recs.append(
                    equality_margin(k - kantorovich(1.0 / h, p), abs(k), 1e-12, f"sym[h={h},p={p}]")
                )
                recs.append(
                    equality_margin(
                        k - kantorovich(h, 1.0 - p), abs(k), 1e-12, f"compl[h={h},p={p}]"
                    )
                )
                for r in r_grid:
                    lhs = kantorovich(h**r, p / r) ** (1.0 / p)
                    rhs = kantorovich(h**p, r / p) ** (-1.0 / r)
                    recs.append(
                        equality_margin(lhs - rhs, abs(lhs), 1e-10, f"expswap[h={h},p={p},r={r}]")
                    )
        for h in (1.5, 2.0, 5.0):
            for p in (0.5, 1.0, 2.0):
                gap = kantorovich(h**1e-5, p / 1e-5) - specht(h**p)
                recs.append(equality_margin(gap, 0.0, 1e-4, f"limit[h={h},p={p}]"))
        return recs

    return run_trials("kantorovich-specht-identities", config.replace(trials=1), trial)


_register(
    CheckEntry(
        "kantorovich-specht-identities",
        "symmetry, complement, exponent-swap and the Specht-ratio limit of K(h,p)",
        _run_constants_identities,
    )
)


_RJ_P_GRID = (-2.0, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0, 3.0)


def _run_reverse_jensen(config, p_grid=_RJ_P_GRID, maps=("avg:2", "pinch", "schur"), **_):
    parts = []
    salt = 0
    for kind in maps:
        for p in p_grid:
            parts.append(
                run_trials(
                    f"{kind},p={p:g}",
                    config,
                    _reverse_jensen_trial(kind, float(p)),
                    salt=salt,
                )
            )
            salt += 1
    return merge_reports("reverse-jensen", parts, config)


def _reverse_jensen_trial(kind, p):
    def trial(rng, cfg, idx):
        h = cfg.window[1] / cfg.window[0]
        phi, in_dim = draw_unital_map(kind, rng, cfg)
        a = sample_pd_dim(in_dim, cfg.window, rng)
        wit = {"A": matcore.matrix_to_json(a), "map": phi.name}
        return verify.reverse_jensen_records(phi, a, p, h, f"{kind}:p={p:g}", wit)

    return trial


_register(
    CheckEntry(
        "reverse-jensen",
        "K(h,p)-sandwich between Phi(A^p) and Phi(A)^p in all three exponent regimes",
        _run_reverse_jensen,
        params={"p_grid": _RJ_P_GRID, "maps": ("avg:2", "pinch", "schur")},
        config_overrides={"window": (1.0, 4.0)},
    )
)


_MO_P_GRID = (-2.0, -1.0, -0.5, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0)


def _run_minkowski_operator(config, p_grid=_MO_P_GRID, **_):
    kinds = ("avg:2", "pinch", "schur")
    parts = []
    for salt, p in enumerate(p_grid):
        def trial(rng, cfg, idx, p=float(p)):
            h = cfg.window[1] / cfg.window[0]
            phi, in_dim = draw_unital_map(kinds[int(rng.integers(0, 3))], rng, cfg)
            a = sample_pd_dim(in_dim, cfg.window, rng)
            b = sample_pd_dim(in_dim, cfg.window, rng)
            wit = {"A": matcore.matrix_to_json(a), "B": matcore.matrix_to_json(b)}
            return verify.minkowski_sandwich_records(phi, a, b, p, h, f"p={p:g}", wit)

        parts.append(run_trials(f"p={p:g}", config, trial, salt=salt))
    return merge_reports("minkowski-operator-sandwich", parts, config)


_register(
    CheckEntry(
        "minkowski-operator-sandwich",
        "K(h,p)-sandwich for Phi((A+B)^p)^{1/p} vs Phi(A^p)^{1/p} + Phi(B^p)^{1/p}",
        _run_minkowski_operator,
        params={"p_grid": _MO_P_GRID},
        config_overrides={"window": (1.0, 3.0)},
    )
)


def _run_minkowski_operator_sums(config, p_grid=(1.0, 1.5, 2.0, 3.0), **_):
    def trial(rng, cfg, idx):
        h = cfg.window[1] / cfg.window[0]
        d = _draw_dim(rng, cfg)
        n = int(rng.integers(2, 4))
        p = float(p_grid[int(rng.integers(0, len(p_grid)))])
        a = [sample_pd_dim(d, cfg.window, rng) for _ in range(n)]
        b = [sample_pd_dim(d, cfg.window, rng) for _ in range(n)]
        t = _sum_power([x + y for x, y in zip(a, b)], p)
        s = _sum_power(a, p) + _sum_power(b, p)
        kk = kantorovich(h, p) ** (1.0 / p)
        return [
            loewner_margin((1.0 / kk) * s, t, f"n={n},p={p:g}:lower"),
            loewner_margin(t, kk * s, f"n={n},p={p:g}:upper"),
        ]

    return run_trials("minkowski-operator-sums", config, trial)


_register(
    CheckEntry(
        "minkowski-operator-sums",
        "K(h,p)-sandwich for sums of n operator pairs at p >= 1",
        _run_minkowski_operator_sums,
        params={"p_grid": (1.0, 1.5, 2.0, 3.0)},
        config_overrides={"window": (1.0, 3.0)},
    )
)


# ---------------------------------------------------------------------------
# operator-valued determinant


def _run_det_properties(config, **_):
    kinds = ("pinch", "avg:2", "schur", "congr-u")

    def trial(rng, cfg, idx):
        phi, in_dim = draw_unital_map(kinds[int(rng.integers(0, 4))], rng, cfg)
        a = sample_pd_dim(in_dim, cfg.window, rng)
        det = op_determinant(phi, a)
        recs = []
        for t in (-1.0, 0.5, 2.0, math.pi):
            err = matcore.operator_norm(op_determinant(phi, mpow(a, t)) - mpow(det, t))
            recs.append(
                equality_margin(err, matcore.operator_norm(mpow(det, t)), 1e-9, f"power[t={t:g}]")
            )
        for t in (0.1, 3.0):
            err = matcore.operator_norm(op_determinant(phi, t * a) - t * det)
            recs.append(
                equality_margin(err, t * matcore.operator_norm(det), 1e-10, f"homog[t={t:g}]")
            )
        w = matcore.eigh(det).eigenvalues
        lo = 1.0 / matcore.operator_norm(matcore.inverse(a))
        hi = matcore.operator_norm(a)
        recs.append(MarginRecord(float(w[0]) - lo + 1e-9, 0.0, "bound:lower"))
        recs.append(MarginRecord(hi - float(w[-1]) + 1e-9, 0.0, "bound:upper"))
        return recs

    return run_trials("det-properties", config, trial)


_register(
    CheckEntry(
        "det-properties",
        "exp Phi(log A): power equality, homogeneity, and norm bounds",
        _run_det_properties,
        config_overrides={"trials": 100},
    )
)


def _run_det_sum_bounds(config, **_):
    kinds = ("pinch", "avg:2", "schur")

    def trial(rng, cfg, idx):
        h = cfg.window[1] / cfg.window[0]
        phi, in_dim = draw_unital_map(kinds[int(rng.integers(0, 3))], rng, cfg)
        a = sample_pd_dim(in_dim, cfg.window, rng)
        b = sample_pd_dim(in_dim, cfg.window, rng)
        da, db = op_determinant(phi, a), op_determinant(phi, b)
        dsum = op_determinant(phi, a + b)
        s2 = specht(h) ** 2
        wit = {"A": matcore.matrix_to_json(a), "B": matcore.matrix_to_json(b)}
        return [
            loewner_margin((1.0 / s2) * (da + db), dsum, "lower", wit),
            loewner_margin(dsum, s2 * (da + db), "upper", wit),
        ]

    return run_trials("det-sum-bounds", config, trial)


def _run_det_minkowski(config, p_grid=(1.0, 1.5, 2.0, 3.0), **_):
    def trial(rng, cfg, idx):
        h = cfg.window[1] / cfg.window[0]
        p = float(p_grid[int(rng.integers(0, len(p_grid)))])
        phi, in_dim = draw_unital_map(("avg:2", "pinch")[int(rng.integers(0, 2))], rng, cfg)
        a = sample_pd_dim(in_dim, cfg.window, rng)
        b = sample_pd_dim(in_dim, cfg.window, rng)
        da, db = op_determinant(phi, a), op_determinant(phi, b)
        dsum = op_determinant(phi, a + b)
        c = 2.0 ** (1.0 - 1.0 / p)
        s3 = specht(h ** (1.0 / p)) ** 3
        k = kantorovich(h, 1.0 / p)
        lhs = mpow(da, 1.0 / p) + mpow(db, 1.0 / p)
        mid = mpow(dsum, 1.0 / p)
        return [
            loewner_margin(c * (1.0 / s3) * k * mid, lhs, f"p={p:g}:lower"),
            loewner_margin(lhs, c * s3 * mid, f"p={p:g}:upper"),
        ]

    return run_trials("det-minkowski", config, trial)


_register(
    CheckEntry(
        "det-sum-bounds",
        "S(h)^{+-2} bounds for Delta(A+B) against Delta(A) + Delta(B)",
        _run_det_sum_bounds,
        config_overrides={"window": (1.0, 2.0)},
    )
)
_register(
    CheckEntry(
        "det-minkowski",
        "Specht/Kantorovich bounds for Delta(A)^{1/p} + Delta(B)^{1/p} vs Delta(A+B)^{1/p}",
        _run_det_minkowski,
        params={"p_grid": (1.0, 1.5, 2.0, 3.0)},
        config_overrides={"window": (1.0, 2.0)},
    )
)


# ---------------------------------------------------------------------------
# trace Minkowski forms


def _run_trace_minkowski_sandwich(config, p_grid=(-2.0, -0.5, 0.3, 0.7, 1.0, 1.5, 2.0, 3.0), **_):
    kinds = ("avg:2", "pinch", "schur")

    def trial(rng, cfg, idx):
        h = cfg.window[1] / cfg.window[0]
        p = float(p_grid[int(rng.integers(0, len(p_grid)))])
        phi, in_dim = draw_unital_map(kinds[int(rng.integers(0, 3))], rng, cfg)
        a = sample_pd_dim(in_dim, cfg.window, rng)
        b = sample_pd_dim(in_dim, cfg.window, rng)
        t = mtrace(mpow(apply_map(phi, mpow(a + b, p)), 1.0 / p))
        s = mtrace(mpow(apply_map(phi, mpow(a, p)), 1.0 / p)) + mtrace(
            mpow(apply_map(phi, mpow(b, p)), 1.0 / p)
        )
        kk = kantorovich(h, p) ** (1.0 / p)
        if p >= 1.0:
            lo, hi = (1.0 / kk) * s, kk * s
        else:
            lo, hi = kk * s, (1.0 / kk) * s
        return [scalar_margin(lo, t, f"p={p:g}:lower"), scalar_margin(t, hi, f"p={p:g}:upper")]

    return run_trials("trace-minkowski-sandwich", config, trial)


def _run_trace_minkowski_sums(config, p_grid=(-1.0, 0.5, 1.5, 2.0), **_):
    def trial(rng, cfg, idx):
        h = cfg.window[1] / cfg.window[0]
        d = _draw_dim(rng, cfg)
        n = int(rng.integers(2, 4))
        p = float(p_grid[int(rng.integers(0, len(p_grid)))])
        a = [sample_pd_dim(d, cfg.window, rng) for _ in range(n)]
        b = [sample_pd_dim(d, cfg.window, rng) for _ in range(n)]
        t = mtrace(_sum_power([x + y for x, y in zip(a, b)], p))
        s = mtrace(_sum_power(a, p)) + mtrace(_sum_power(b, p))
        kk = kantorovich(h, p) ** (1.0 / p)
        if p >= 1.0:
            lo, hi = (1.0 / kk) * s, kk * s
        else:
            lo, hi = kk * s, (1.0 / kk) * s
        return [
            scalar_margin(lo, t, f"n={n},p={p:g}:lower"),
            scalar_margin(t, hi, f"n={n},p={p:g}:upper"),
        ]

    return run_trials("trace-minkowski-sums", config, trial)


def _run_carlen_lieb_additivity(config, **_):
    grid = ((0.3, "ge"), (0.7, "ge"), (1.0, "ge"), (1.5, "le"), (2.0, "le"))

    def trial(rng, cfg, idx):
        d = _draw_dim(rng, cfg)
        n = int(rng.integers(2, 4))
        a = [sample_pd_dim(d, cfg.window, rng) for _ in range(n)]
        b = [sample_pd_dim(d, cfg.window, rng) for _ in range(n)]
        recs = []
        for p, direction in grid:
            t = mtrace(_sum_power([x + y for x, y in zip(a, b)], p))
            s = mtrace(_sum_power(a, p)) + mtrace(_sum_power(b, p))
            lhs, rhs = (s, t) if direction == "ge" else (t, s)
            recs.append(scalar_margin(lhs, rhs, f"n={n},p={p:g}"))
        return recs

    return run_trials("carlen-lieb-additivity", config, trial)


_register(
    CheckEntry(
        "trace-minkowski-sandwich",
        "K(h,p)^{+-1/p} trace sandwich for Tr[Phi((A+B)^p)^{1/p}]",
        _run_trace_minkowski_sandwich,
        params={"p_grid": (-2.0, -0.5, 0.3, 0.7, 1.0, 1.5, 2.0, 3.0)},
        trace_family=True,
        config_overrides={"window": (1.0, 3.0)},
    )
)
_register(
    CheckEntry(
        "trace-minkowski-sums",
        "K(h,p)^{+-1/p} trace sandwich for sums of n operator pairs",
        _run_trace_minkowski_sums,
        params={"p_grid": (-1.0, 0.5, 1.5, 2.0)},
        trace_family=True,
        config_overrides={"window": (1.0, 3.0)},
    )
)
_register(
    CheckEntry(
        "carlen-lieb-additivity",
        "Minkowski trace inequality: superadditive for 0<p<=1, subadditive for 1<=p<=2",
        _run_carlen_lieb_additivity,
        trace_family=True,
    )
)


def _carlen_lieb_F(p: float, n: int):
    def F(*mats):
        return mtrace(_sum_power(mats, p))

    return F


# Convexity-violating witness for the trace power functional at p = 3,
# found by seeded local search on the margin and rounded to 4 decimals.
CARLEN_LIEB_P3_WITNESS = (
    (
        [[1.2876, -0.2851 + 0.1332j], [-0.2851 - 0.1332j, 0.0941]],
        [[1.5962, -0.3541 + 0.1645j], [-0.3541 - 0.1645j, 0.2958]],
    ),
    (
        [[0.3803, -0.0749 + 0.0298j], [-0.0749 - 0.0298j, 0.0989]],
        [[1.4492, -1.6156 + 0.7059j], [-1.6156 - 0.7059j, 2.8262]],
    ),
)


def _run_carlen_lieb_convexity(config, p=1.5, n_pairs=2, **_):
    """Regime-dispatched joint convexity of Tr[(sum A_i^p)^{1/p}].

    p <= 1: concavity must hold; 1 < p <= 2: convexity must hold; p > 2:
    both directions must be violated within the trial budget.
    """
    p = float(p)
    n = int(n_pairs)
    F = _carlen_lieb_F(p, n)
    if p <= 0.0:
        raise ValueError("p must be positive")
    if p <= 1.0:
        return verify.check_joint_convexity(
            F, "concave", "scalar", config, arity=n, theorem=f"carlen-lieb-convexity[p={p:g}]"
        )
    if p <= 2.0:
        return verify.check_joint_convexity(
            F, "convex", "scalar", config, arity=n, theorem=f"carlen-lieb-convexity[p={p:g}]"
        )
    seeds = []
    if n == 2:
        x1 = tuple(matcore.hermitian(m) for m in CARLEN_LIEB_P3_WITNESS[0])
        x2 = tuple(matcore.hermitian(m) for m in CARLEN_LIEB_P3_WITNESS[1])
        seeds = [(x1, x2)]
    conv = verify.search_violations(
        F, "convex", "scalar", config, arity=n,
        theorem=f"convexity-violated[p={p:g}]", seed_instances=seeds, refine=False, salt=1,
    )
    conc = verify.search_violations(
        F, "concave", "scalar", config, arity=n,
        theorem=f"concavity-violated[p={p:g}]", refine=False, salt=2,
    )
    return merge_reports(f"carlen-lieb-convexity[p={p:g}]", [conv, conc], config)


_register(
    CheckEntry(
        "carlen-lieb-convexity",
        "Tr[(sum A_i^p)^{1/p}]: concave for p<=1, convex for 1<p<=2, neither for p>2",
        _run_carlen_lieb_convexity,
        params={"p": 1.5, "n_pairs": 2},
        trace_family=True,
    )
)
_register(
    CheckEntry(
        "carlen-lieb-p3-violations",
        "at p=3 both a convexity and a concavity violation must be found",
        lambda config, **kw: _run_carlen_lieb_convexity(config, p=3.0, n_pairs=2),
        expect_violation=True,
        trace_family=True,
    )
)


# ---------------------------------------------------------------------------
# violation searches


def _run_search_sqrt_geo(config, **_):
    inst = {k: matcore.hermitian(v) for k, v in verify.SQRT_GEO_INSTANCE.items()}
    seeds = [((inst["A1"], inst["B1"]), (inst["A2"], inst["B2"]))]
    return verify.search_violations(
        verify.sqrt_geo_value,
        "convex",
        "loewner",
        config,
        arity=2,
        theorem="search-sqrt-geo",
        seed_instances=seeds,
    )


def _run_search_minkowski_op(config, n_pairs=2, **_):
    n = int(n_pairs)

    def F(*pack):
        return _sum_power(pack, 2.0)

    inst = {k: matcore.hermitian(v) for k, v in verify.MINKOWSKI_INSTANCE.items()}
    seeds = [((inst["A1"], inst["A2"]), (inst["B1"], inst["B2"]))] if n == 2 else []
    # subadditivity of the positively homogeneous pack map G is exactly its
    # midpoint convexity: G(X+Y) <= G(X)+G(Y)  <=>  G((X+Y)/2) <= (G(X)+G(Y))/2
    return verify.search_violations(
        F,
        "convex",
        "loewner",
        config,
        arity=n,
        theorem="search-minkowski-op",
        seed_instances=seeds,
    )


_register(
    CheckEntry(
        "search-sqrt-geo",
        "find a convexity violation of (A,B) -> (A^2 # B^2)^{1/2} at dim 2",
        _run_search_sqrt_geo,
        expect_violation=True,
        config_overrides={"trials": 1000, "dims": (2, 2)},
    )
)
_register(
    CheckEntry(
        "search-minkowski-op",
        "find an operator Minkowski violation ((sum of squares)^{1/2}, n=2) at dim 3",
        _run_search_minkowski_op,
        params={"n_pairs": 2},
        expect_violation=True,
        config_overrides={"trials": 1000, "dims": (3, 3)},
    )
)
