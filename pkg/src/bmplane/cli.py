"""Command-line front end: solve bodies, run the oracle, verify reports, render SVG.

Exit codes: 0 success (or verification pass), 1 verification failure,
2 malformed input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
import traceback

from . import jsonio
from .errors import BmplaneError, InputError
from .gauge import gauge_from_descriptor
from .oracle import OracleGrid, oracle_uniform
from .report import build_report, render_svg, report_from_dict, report_to_dict, verify_theorem1
from .solver import SolverOptions, solve_uniform, verify_certificate

_EXIT_OK = 0
_EXIT_VERIFY_FAIL = 1
_EXIT_INPUT = 2
_EXIT_NUMERIC = 3


def _read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return jsonio.loads(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _write_text(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def _load_gauge(path: str):
    descriptor = _read_json(path)
    try:
        return gauge_from_descriptor(descriptor)
    except InputError:
        raise
    except BmplaneError as exc:
        raise InputError(f"invalid body: {type(exc).__name__}: {exc}") from exc


def _solver_options(args) -> SolverOptions:
    try:
        return SolverOptions(
            grid_size=args.grid,
            bisect_tol=args.tol,
            refine=not args.no_refine,
            polish=not args.no_polish,
            cert_tol=args.cert_tol,
            seed=args.seed,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _cmd_solve(args) -> int:
    gauge = _load_gauge(args.input)
    sol = solve_uniform(gauge, _solver_options(args))
    report = build_report(gauge, sol)
    _write_text(args.out, jsonio.dumps(report_to_dict(report)))
    if args.svg:
        _write_text(args.svg, render_svg(report, view=args.view))
    print(f"d2 = {report.d2:.12g}  defect = {report.defect:.12g}  -> {args.out}")
    return _EXIT_OK


def _cmd_oracle(args) -> int:
    gauge = _load_gauge(args.input)
    a_range = None
    if (args.a_min is None) != (args.a_max is None):
        raise InputError("--a-min and --a-max must be given together")
    if args.a_min is not None:
        a_range = (args.a_min, args.a_max)
    grid = OracleGrid(
        n_a=args.na,
        n_b=args.nb,
        n_theta=args.ntheta,
        n_phi=args.nphi,
        a_range=a_range,
        stages=args.stages,
        value_margin=args.value_margin,
    )
    result = oracle_uniform(gauge, grid, threads=args.threads)
    runner = result.runner_up_distance
    payload = {
        "std": {"a": result.std.a, "bprime": result.std.bprime, "theta": result.std.theta},
        "params": list(result.params.triple()),
        "value": result.value,
        "d2": math.exp(2.0 * result.value),
        "runner_up_distance": runner if math.isfinite(runner) else None,
        "cluster_radius": result.cluster_radius,
        "evaluations": result.evaluations,
    }
    _write_text(args.out, jsonio.dumps(payload))
    print(f"oracle value = {result.value:.12g}  -> {args.out}")
    return _EXIT_OK


def _cmd_verify(args) -> int:
    gauge = _load_gauge(args.input)
    report = report_from_dict(_read_json(args.report))
    tol = args.tol

    cert_verdict = verify_certificate(gauge, report.params_uniform, report.certificate, tol)
    d_hat = cert_verdict.d_hat
    d2_ok = abs(report.d2 - math.exp(2.0 * d_hat)) <= max(10.0 * tol, 1e-9)
    defect_ok = abs(report.defect - d_hat) <= max(10.0 * tol, 1e-9)
    factor = math.exp(2.0 * report.defect)
    shift_ok = all(
        abs(i - factor * u) <= 1e-6 * max(1.0, abs(i))
        for i, u in zip(report.params_inscribed.triple(), report.params_uniform.triple())
    )
    theorem = verify_theorem1(report, tol=max(tol, 1e-9))

    checks = [
        ("certificate", cert_verdict.passed),
        ("d2-consistency", d2_ok),
        ("defect-consistency", defect_ok),
        ("one-sided-shift", shift_ok),
        ("operator-relations", theorem.passed),
    ]
    for name, ok in checks:
        print(f"{name}: {'pass' if ok else 'FAIL'}")
    if all(ok for _, ok in checks):
        print("verdict: pass")
        return _EXIT_OK
    print("verdict: FAIL")
    return _EXIT_VERIFY_FAIL


def _cmd_render(args) -> int:
    report = report_from_dict(_read_json(args.report))
    _write_text(args.out, render_svg(report, view=args.view))
    print(f"{args.view} view -> {args.out}")
    return _EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bmplane",
        description=(
            "Banach-Mazur distance of a planar symmetric body to the Euclidean "
            "plane, with the optimal ellipse and its alternance certificate."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve a body and write the report JSON")
    solve.add_argument("--input", required=True, help="body descriptor JSON")
    solve.add_argument("--out", required=True, help="output report JSON")
    solve.add_argument("--svg", help="also render an SVG to this path")
    solve.add_argument("--view", choices=["body", "image"], default="body")
    solve.add_argument("--grid", type=int, default=4096, help="angles per period")
    solve.add_argument("--tol", type=float, default=1e-12, help="bisection tolerance")
    solve.add_argument("--cert-tol", type=float, default=1e-8, help="certificate tolerance")
    solve.add_argument("--no-polish", action="store_true", help="skip the Remez polish")
    solve.add_argument("--no-refine", action="store_true", help="skip extremum refinement")
    solve.add_argument("--seed", type=int, default=0, help="seed for constraint shuffling")

    oracle = sub.add_parser("oracle", help="brute-force search over the ellipse grid")
    oracle.add_argument("--input", required=True)
    oracle.add_argument("--out", required=True)
    oracle.add_argument("--na", type=int, default=128)
    oracle.add_argument("--nb", type=int, default=128)
    oracle.add_argument("--ntheta", type=int, default=128)
    oracle.add_argument("--nphi", type=int, default=1024)
    oracle.add_argument("--a-min", type=float, default=None)
    oracle.add_argument("--a-max", type=float, default=None)
    oracle.add_argument("--stages", type=int, default=4)
    oracle.add_argument("--value-margin", type=float, default=1e-3,
                        help="value neighborhood for the uniqueness diagnostics")
    oracle.add_argument("--threads", type=int, default=1)

    verify = sub.add_parser("verify", help="re-check a report against its body")
    verify.add_argument("--input", required=True, help="body descriptor JSON")
    verify.add_argument("--report", required=True, help="report JSON to verify")
    verify.add_argument("--tol", type=float, default=1e-6)

    render = sub.add_parser("render", help="render a report to SVG")
    render.add_argument("--report", required=True)
    render.add_argument("--out", required=True)
    render.add_argument("--view", choices=["body", "image"], default="body")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "solve": _cmd_solve,
        "oracle": _cmd_oracle,
        "verify": _cmd_verify,
        "render": _cmd_render,
    }[args.command]
    try:
        return handler(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return _EXIT_INPUT
    except BmplaneError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _EXIT_NUMERIC
    except Exception:  # keep exit code 1 reserved for verification failures
        traceback.print_exc()
        return _EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
