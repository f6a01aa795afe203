"""Command-line surface: ``opineq verify | eval | scan | constants``.

Machine output (JSON reports, CSV scans) goes to --out or stdout; human
summary lines go to stderr.  Every run writes a manifest recording the
resolved configuration, so a run can be replayed exactly with
``verify --from-manifest``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from datetime import datetime, timezone

from . import __version__, matcore, suite
from .functionals import (
    F1,
    F2,
    F3,
    op_determinant,
    spec_from_json,
    trace_F2,
)
from .verify import FULL_LAMBDA_GRID, ProbeConfig

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trials", type=int, default=None, help="random trials per check")
    p.add_argument("--seed", type=int, default=None, help="base seed (default 0)")
    p.add_argument("--tol", type=float, default=None, help="violation tolerance (default 1e-9)")
    p.add_argument("--dims", default=None, metavar="LO:HI", help="dimension range, e.g. 2:5")
    p.add_argument("--window", default=None, metavar="M:M", help="spectral window, e.g. 0.5:2")
    p.add_argument(
        "--lambda-grid", default=None, metavar="CSV", help="convexity weights, e.g. 0.25,0.5,0.75"
    )
    p.add_argument(
        "--full-lambda-grid",
        action="store_true",
        help="probe weights 0.1..0.9 instead of the midpoint",
    )
    p.add_argument("--out", default=None, help="write machine output to this file")


def _resolve_config(args) -> tuple[ProbeConfig, frozenset]:
    """Build the base config; returns it plus the explicitly set field names."""
    kw = {}
    explicit = set()
    if args.trials is not None:
        kw["trials"] = args.trials
        explicit.add("trials")
    if args.seed is not None:
        kw["seed"] = args.seed
        explicit.add("seed")
    if args.tol is not None:
        kw["tol"] = args.tol
        explicit.add("tol")
    if args.dims is not None:
        lo, hi = args.dims.split(":")
        kw["dims"] = (int(lo), int(hi))
        explicit.add("dims")
    if args.window is not None:
        m, M = args.window.split(":")
        kw["window"] = (float(m), float(M))
        explicit.add("window")
    if args.full_lambda_grid:
        kw["lambdas"] = FULL_LAMBDA_GRID
        explicit.add("lambdas")
    if args.lambda_grid is not None:
        kw["lambdas"] = tuple(float(x) for x in args.lambda_grid.split(","))
        explicit.add("lambdas")
    return ProbeConfig(**kw), frozenset(explicit)


def _param_overrides(args, entry) -> dict:
    over = {}
    if getattr(args, "p", None) is not None:
        if "p" in entry.params:
            over["p"] = args.p
        elif "p_grid" in entry.params:
            over["p_grid"] = (args.p,)
        else:
            raise SystemExit2(f"check {entry.name!r} takes no --p parameter")
    if getattr(args, "n_pairs", None) is not None:
        if "n_pairs" not in entry.params:
            raise SystemExit2(f"check {entry.name!r} takes no --n-pairs parameter")
        over["n_pairs"] = args.n_pairs
    return over


class SystemExit2(Exception):
    """Usage-level error: maps to exit code 2."""


def _emit(payload: str, out_path, manifest: dict) -> None:
    """Write machine output and its manifest."""
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(payload)
        manifest["outputs"] = [out_path]
        with open(out_path + ".manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=1)
            fh.write("\n")
    else:
        print(payload)
        manifest["outputs"] = ["<stdout>"]
        _say("manifest: " + json.dumps(manifest))


def _manifest(args_list, subcommand, config: ProbeConfig, extra: dict) -> dict:
    return {
        "command": ["opineq"] + list(args_list),
        "subcommand": subcommand,
        "config": config.to_json(),
        "artifact_version": __version__,
        "started_at": datetime.now(timezone.utc).isoformat(),
        **extra,
    }


def _load_matrix(path: str) -> matcore.HermitianMatrix:
    with open(path) as fh:
        return matcore.matrix_from_json(json.load(fh))


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(args, argv) -> int:
    if args.from_manifest:
        with open(args.from_manifest) as fh:
            man = json.load(fh)
        config = ProbeConfig.from_json(man["config"])
        explicit = frozenset(man.get("explicit", []))
        theorem = man["theorem"]
        params = man.get("params", {})
        params = {k: tuple(v) if isinstance(v, list) else v for k, v in params.items()}
    else:
        if args.theorem is None:
            _say("a theorem id (or 'all') is required unless --from-manifest is given")
            return EXIT_USAGE
        config, explicit = _resolve_config(args)
        theorem = args.theorem
        params = {}

    t0 = time.perf_counter()
    if theorem == "all":
        reports = suite.run_all(config, explicit=explicit)
        ok = all(r.passed for r in reports)
        for r in reports:
            _say(f"{'PASS' if r.passed else 'FAIL'} {r.theorem}: trials={r.trials} "
                 f"violations={r.violations} worst_margin={r.worst_margin:.3e}")
        payload = json.dumps(
            {"passed": ok, "reports": [r.to_json() for r in reports]}, indent=1
        ) + "\n"
    else:
        try:
            entry = suite.get_check(theorem)
        except KeyError:
            _say(f"unknown theorem id {theorem!r}; registered checks:")
            for name, summary in suite.list_checks():
                _say(f"  {name:34s} {summary}")
            return EXIT_USAGE
        if not args.from_manifest:
            try:
                params = _param_overrides(args, entry)
            except SystemExit2 as exc:
                _say(str(exc))
                return EXIT_USAGE
        report = entry.run(config, explicit=explicit, **params)
        ok = report.passed
        _say(f"{'PASS' if ok else 'FAIL'} {report.theorem}: trials={report.trials} "
             f"violations={report.violations} worst_margin={report.worst_margin:.3e}")
        payload = json.dumps(report.to_json(), indent=1) + "\n"

    manifest = _manifest(
        argv, "verify", config,
        {"theorem": theorem, "explicit": sorted(explicit), "params": params,
         "wall_clock_s": time.perf_counter() - t0},
    )
    _emit(payload, args.out, manifest)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_eval(args, argv) -> int:
    with open(args.spec) as fh:
        doc = json.load(fh)
    fspec = spec_from_json(doc, base_dir=args.base_dir)
    a = _load_matrix(args.a)
    b = _load_matrix(args.b) if args.b else None
    which = args.which

    def as_json(value):
        if isinstance(value, matcore.HermitianMatrix):
            return matcore.matrix_to_json(value)
        return value

    t0 = time.perf_counter()
    try:
        if which == "f1":
            value = F1(fspec, a, b)
        elif which == "f2":
            value = F2(fspec, a, b)
        elif which == "f3":
            value = F3(fspec, a)
        elif which == "trace-f2":
            value = trace_F2(fspec, a, b)
        elif which == "det":
            value = op_determinant(fspec.phi, a)
        else:
            raise SystemExit2(f"unknown --which {which!r}")
    except matcore.MatrixError as exc:
        _say(f"evaluation failed: {exc}")
        return EXIT_FAIL
    if which in ("f1", "f2", "trace-f2") and b is None:
        _say("--b is required for two-slot functionals")
        return EXIT_USAGE

    payload = json.dumps({"which": which, "value": as_json(value)}, indent=1) + "\n"
    manifest = _manifest(
        argv, "eval", ProbeConfig(),
        {"spec": args.spec, "a": args.a, "b": args.b, "which": which,
         "wall_clock_s": time.perf_counter() - t0},
    )
    _emit(payload, args.out, manifest)
    return EXIT_PASS


def cmd_scan(args, argv) -> int:
    try:
        entry = suite.get_check(args.theorem)
    except KeyError:
        _say(f"unknown theorem id {args.theorem!r}")
        return EXIT_USAGE
    grid = [float(x) for x in args.grid.split(",") if x != ""]
    if not grid:
        _say("empty grid")
        return EXIT_USAGE
    config, explicit = _resolve_config(args)

    t0 = time.perf_counter()
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["param", "value", "trials", "violations", "worst_margin", "passed"])
    for value in grid:
        if args.param == "p":
            if "p" in entry.params:
                over = {"p": value}
            elif "p_grid" in entry.params:
                over = {"p_grid": (value,)}
            else:
                _say(f"check {entry.name!r} has no parameter 'p'")
                return EXIT_USAGE
        else:
            if args.param not in entry.params:
                _say(f"check {entry.name!r} has no parameter {args.param!r}")
                return EXIT_USAGE
            over = {args.param: value}
        report = entry.run(config, explicit=explicit, **over)
        writer.writerow(
            [args.param, f"{value:g}", report.trials, report.violations,
             f"{report.worst_margin:.6e}", report.passed]
        )
        _say(f"{args.param}={value:g}: violations={report.violations} "
             f"worst={report.worst_margin:.3e} passed={report.passed}")

    manifest = _manifest(
        argv, "scan", config,
        {"theorem": entry.name, "param": args.param, "grid": grid,
         "explicit": sorted(explicit), "wall_clock_s": time.perf_counter() - t0},
    )
    _emit(buf.getvalue(), args.out, manifest)
    return EXIT_PASS


def cmd_constants(args, argv) -> int:
    from .constants import kantorovich, specht

    h, p = args.h, args.p
    payload = json.dumps(
        {"h": h, "p": p, "K": kantorovich(h, p), "S_h": specht(h), "S_h_p": specht(h**p)},
        indent=1,
    ) + "\n"
    manifest = _manifest(argv, "constants", ProbeConfig(), {"h": h, "p": p})
    _emit(payload, args.out, manifest)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opineq",
        description="verify operator-mean and trace inequalities on random Hermitian matrices",
    )
    parser.add_argument("--version", action="version", version=f"opineq {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    pv = sub.add_parser("verify", help="run a registered theorem check (or 'all')")
    pv.add_argument("theorem", nargs="?", default=None, help="theorem id, or 'all'")
    _add_config_flags(pv)
    pv.add_argument("--p", type=float, default=None, help="override the exponent parameter")
    pv.add_argument("--n-pairs", type=int, default=None, help="override the tuple length")
    pv.add_argument("--from-manifest", default=None, help="replay a recorded manifest")

    pe = sub.add_parser("eval", help="evaluate a functional spec on matrix files")
    pe.add_argument("--spec", required=True, help="functional spec JSON file")
    pe.add_argument("--a", required=True, help="matrix JSON file for the first slot")
    pe.add_argument("--b", default=None, help="matrix JSON file for the second slot")
    pe.add_argument(
        "--which", default="f2", choices=["f1", "f2", "f3", "trace-f2", "det"],
        help="which functional to evaluate",
    )
    pe.add_argument("--base-dir", default=".", help="directory for file refs inside the spec")
    pe.add_argument("--out", default=None, help="write machine output to this file")

    ps = sub.add_parser("scan", help="sweep one parameter of a check, CSV per grid point")
    ps.add_argument("theorem", help="theorem id")
    ps.add_argument("--param", default="p", help="parameter name to sweep (default p)")
    ps.add_argument("--grid", required=True, help="comma-separated values")
    _add_config_flags(ps)

    pc = sub.add_parser("constants", help="print K(h,p), S(h), S(h^p)")
    pc.add_argument("--h", type=float, required=True)
    pc.add_argument("--p", type=float, required=True)
    pc.add_argument("--out", default=None)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, matching the CLI contract
        return int(exc.code or 0)
    dispatch = {
        "verify": cmd_verify,
        "eval": cmd_eval,
        "scan": cmd_scan,
        "constants": cmd_constants,
    }
    try:
        return dispatch[args.cmd](args, argv)
    except FileNotFoundError as exc:
        _say(f"file not found: {exc.filename}")
        return EXIT_USAGE
    except (ValueError, SystemExit2) as exc:
        _say(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
