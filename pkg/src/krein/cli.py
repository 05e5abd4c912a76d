"""Command-line front end: ``krein {solve,diagnose,family,gen}``.

Exit codes: 0 success, 1 I/O, parse or usage error, 2 validation failure
(not J-dissipative without ``--force``, or residuals above ``--tol``),
3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from . import __version__
from .core import BlockOperator, check_dissipativity, factorization_residual, norm2
from .errors import Alpha0InSpectrumError, GNormTooLargeError, KreinError
from .family import KINDS, OperatorFamily, galerkin_convergence, generate
from .io import FormatError, read_problem, sibling, write_csv, write_problem, write_report
from .riccati import restriction, riccati_residuals, solve_angle, spectral_location_check
from .semigroup import DEFAULT_BETAS, check_thm31_hypotheses, check_thm32_hypotheses, classify, expm_curve
from .transfer import eval_transfer

log = logging.getLogger("krein")

EXIT_OK, EXIT_IO, EXIT_VALIDATION, EXIT_SOLVER = 0, 1, 2, 3
DEFAULT_TOL = 1e-8
TARGETS = ("X", "A11", "A22neg", "S")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def _complex_or_auto(text: str):
    if text == "auto":
        return "auto"
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or a complex number, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected finite reals, got {text!r}")
    return vals


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError(f"expected positive integers, got {text!r}")
    return vals


def _t_grid(text: str) -> np.ndarray:
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:STOP:COUNT, got {text!r}") from None
    if not (0 < a < b and n >= 8):
        raise argparse.ArgumentTypeError("need 0 < START < STOP and COUNT >= 8")
    return np.geomspace(a, b, n)


def _json_object(text: str) -> dict:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc}") from None
    if not isinstance(d, dict):
        raise argparse.ArgumentTypeError("params must be a JSON object")
    return d


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="krein", description="Invariant subspaces of J-dissipative block operators.")
    parser.add_argument("--version", action="version", version=f"krein {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="problem JSON file")
        p.add_argument("--output", required=True, help="output JSON file")
        p.add_argument("--seed", type=int, default=None)

    def solving(p):
        p.add_argument("--solver", choices=("spectral", "fixed-point", "continuation"), default="spectral")
        p.add_argument("--mu", type=_complex_or_auto, default="auto", help="'auto' or a complex number")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="residual tolerance")
        p.add_argument("--force", action="store_true", help="proceed without J-dissipativity")

    p = sub.add_parser("solve", help="solve for the angle operator and report diagnostics")
    common(p)
    solving(p)

    p = sub.add_parser("diagnose", help="semigroup diagnostics for one matrix")
    common(p)
    solving(p)
    p.add_argument("--target", choices=TARGETS, required=True)
    p.add_argument("--betas", type=_float_list, default=list(DEFAULT_BETAS), help="comma-separated line abscissae")
    p.add_argument("--t-grid", type=_t_grid, default=None, help="START:STOP:COUNT (geometric)")

    p = sub.add_parser("family", help="Galerkin trends over a generated family")
    common(p, needs_input=False)
    p.add_argument("--kind", choices=("structured_family", "growing_coupling", "decoupled_family"), default="structured_family")
    p.add_argument("--sizes", type=_int_list, default=[8, 16, 32])
    p.add_argument("--params", type=_json_object, default={})
    p.add_argument("--solver", choices=("spectral", "fixed-point", "continuation"), default="spectral")

    p = sub.add_parser("gen", help="write a generated problem file")
    common(p, needs_input=False)
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--params", type=_json_object, default={})
    return parser


def _tool_info(tol) -> dict:
    from .core import DISSIPATIVITY_TOL, RESOLVENT_TOL
    from .riccati import CONTRACTION_TOL, GRAM_TOL
    from .semigroup import FINITE_FACTOR

    return {
        "tool": {"name": "krein", "version": __version__},
        "tolerances": {
            "residual": tol,
            "dissipativity": DISSIPATIVITY_TOL,
            "resolvent": RESOLVENT_TOL,
            "contraction": CONTRACTION_TOL,
            "gram": GRAM_TOL,
            "finite_factor": FINITE_FACTOR,
        },
    }


def _pick_mu(A: BlockOperator, mu):
    from .riccati import choose_mu

    if mu != "auto":
        return complex(mu)
    try:
        return choose_mu(A)[0]
    except GNormTooLargeError:
        return complex(-(1.0 + A.norm))


class _Failure(Exception):
    def __init__(self, code, report):
        self.code = code
        self.report = report


def _solve_pipeline(A: BlockOperator, args, full: bool = True) -> dict:
    """Dissipativity, solve, validate, restrict.  Raises ``_Failure`` with a partial report."""
    report = _tool_info(args.tol)
    verdict = check_dissipativity(A)
    report["dissipativity"] = verdict
    if not verdict.j_dissipative and not args.force:
        report["status"] = "not_dissipative"
        raise _Failure(EXIT_VALIDATION, report)
    mu = _pick_mu(A, args.mu)
    ev = eval_transfer(A, mu)
    report["mu"] = mu
    report["g_norm"] = norm2(ev.G)
    try:
        outcome = solve_angle(A, solver=args.solver, mu=mu if args.solver == "fixed-point" else "auto", check=not args.force)
    except KreinError as exc:
        report["status"] = "solver_failure"
        report["error"] = {"code": exc.code, "message": str(exc)}
        raise _Failure(EXIT_SOLVER, report) from None
    K = outcome.angle.K
    report["solver"] = outcome.solver
    report["K"] = K
    report["K_norm"] = outcome.angle.norm
    res = riccati_residuals(A, K, mu, basis=outcome.subspace.basis)
    report["residuals"] = res
    report["factorization_residual"] = factorization_residual(A, mu)
    report["subspace_basis"] = outcome.subspace.basis
    if res.max() > args.tol:
        report["status"] = "residual_above_tolerance"
        raise _Failure(EXIT_VALIDATION, report)
    rep = restriction(A, K, mu, residual_tol=max(args.tol, 1e-6))
    report["restriction"] = {
        "X": rep.X,
        "spectrum": np.sort_complex(rep.spectrum),
        "spectral_abscissa": rep.spectral_abscissa,
        "spectral_location_ok": spectral_location_check(rep),
        "formula_gap": rep.formula_gap,
        "q_inv_norm": rep.q_inv_norm,
    }
    report["_X"] = rep.X
    report["_S"] = ev.S
    return report


def _target_matrix(A: BlockOperator, target: str, report: dict) -> np.ndarray:
    if target == "A11":
        return np.array(A.A11)
    if target == "A22neg":
        return -np.array(A.A22)
    if target == "S":
        return eval_transfer(A, report["mu"]).S
    return report["_X"]


def _strip_private(report: dict) -> dict:
    return {k: v for k, v in report.items() if not k.startswith("_")}


def cmd_solve(args) -> int:
    A, meta = read_problem(args.input)
    try:
        report = _solve_pipeline(A, args)
    except _Failure as fail:
        write_report(args.output, _strip_private(fail.report))
        return fail.code
    report["semigroup"] = {
        "X": classify(report["_X"]),
        "A11": classify(A.A11),
        "A22neg": classify(-np.array(A.A22)),
        "S": classify(report["_S"]),
    }
    hyp = {"thm31": check_thm31_hypotheses(A)}
    try:
        hyp["thm32"] = check_thm32_hypotheses(A, report["mu"], 1.0, cross_check=False)
    except Alpha0InSpectrumError as exc:
        hyp["thm32"] = {"error": exc.code}
    report["hypotheses"] = hyp
    report["metadata"] = meta
    report["status"] = "ok"
    write_report(args.output, _strip_private(report))
    return EXIT_OK


def cmd_diagnose(args) -> int:
    A, meta = read_problem(args.input)
    if args.target == "X" or args.target == "S":
        try:
            report = _solve_pipeline(A, args) if args.target == "X" else {**_tool_info(args.tol), "mu": _pick_mu(A, args.mu)}
        except _Failure as fail:
            write_report(args.output, _strip_private(fail.report))
            return fail.code
    else:
        report = _tool_info(args.tol)
    T = _target_matrix(A, args.target, report)
    betas = sorted(set(args.betas))
    sg = classify(T, betas=betas, t_grid=args.t_grid)
    out = {
        **_tool_info(args.tol),
        "target": args.target,
        "matrix": T,
        "semigroup": sg,
        "metadata": meta,
        "status": "ok",
    }
    if "mu" in report:
        out["mu"] = report["mu"]
    write_report(args.output, out)
    write_csv(sibling(args.output, "gearhart"), ["beta", "sup_resolvent"], sg.gearhart)
    ts, logs = expm_curve(T, args.t_grid)
    write_csv(sibling(args.output, "expm"), ["t", "log_norm"], zip(ts, logs))
    return EXIT_OK


def cmd_family(args) -> int:
    params = dict(args.params)
    params["sizes"] = args.sizes
    fam = generate(args.kind, params, args.seed)
    assert isinstance(fam, OperatorFamily)
    rep = galerkin_convergence(fam, solver=args.solver)
    rows = rep.rows()
    header = ["size", "k_difference", "surrogate", "g_norm", "pair_left", "pair_right", "r_sup"]
    write_csv(sibling(args.output, "rows"), header, ([r[h] for h in header] for r in rows))
    out = {
        **_tool_info(DEFAULT_TOL),
        "family": fam.description,
        "reference_size": rep.reference_size,
        "mu": rep.mu,
        "verdicts": rep.verdicts,
        "rows": rows,
        "g_ray": rep.g_ray,
        "errors": rep.errors,
        "status": "ok",
    }
    write_report(args.output, out)
    return EXIT_OK


def cmd_gen(args) -> int:
    obj = generate(args.kind, args.params, args.seed)
    A = obj.members[-1] if isinstance(obj, OperatorFamily) else obj
    write_problem(args.output, A, {"kind": args.kind, "params": args.params, "seed": args.seed})
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "diagnose": cmd_diagnose, "family": cmd_family, "gen": cmd_gen}


def _configure_logging():
    level = os.environ.get("KREIN_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (OSError, FormatError) as exc:
        print(f"krein: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KreinError as exc:
        # structural problems in the input (bad sizes, non-finite entries, bad params)
        if isinstance(exc, ValueError):
            print(f"krein: error: {exc.code}: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"krein: solver failure: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
