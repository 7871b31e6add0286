"""Command-line front end.

Exit codes: 0 success, 1 numerical failure (non-convergence, divergence,
failed verification), 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace

from monopole import __version__
from monopole import io as mio
from monopole.diagnostics import CHECKS
from monopole.integrator import IntegratorConfig
from monopole.model import FixedPointId, ModelError, Params, classify_stability
from monopole.reference import TABLE1_EPSILONS, TABLE1_LAMBDAS
from monopole.series import SeedCoeffs
from monopole.shooting import (
    CellFailure,
    ShootingConfig,
    ShootingError,
    continuation_sweep,
    newton_solve,
)

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("monopole")


class UsageError(Exception):
    pass


def _guess(text: str) -> SeedCoeffs:
    try:
        a1, b2 = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a1,b2', got {text!r}") from None
    return SeedCoeffs(a1, b2)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver configuration")
    g.add_argument("--r-match", type=float, default=None, help="series/ODE handoff radius (default 0.01)")
    g.add_argument("--series-order", type=int, default=None, help="even truncation order (default 10)")
    g.add_argument("--steps", type=int, default=None, help="RK4 steps on [r_match, 1] (default 10000)")
    g.add_argument("--tol", type=float, default=None, help="Newton tolerance on the boundary residual")
    g.add_argument("--max-iters", type=int, default=None)
    g.add_argument("--target-radius", type=float, default=None,
                   help="radius where the boundary values are imposed (default 1)")
    g.add_argument("--published-lattice", action="store_true",
                   help="1e-4 lattice with boundary values read at r = 0.9999")


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("-e", "--epsilon", type=float, required=True)
    p.add_argument("-l", "--lambda", dest="lam", type=float, required=True)


def _config(args) -> ShootingConfig:
    base = ShootingConfig.published_lattice() if args.published_lattice else ShootingConfig()
    kw = {}
    if args.r_match is not None:
        kw["r_match"] = args.r_match
    if args.series_order is not None:
        kw["series_order"] = args.series_order
    if args.tol is not None:
        kw["newton_tol"] = args.tol
    if args.max_iters is not None:
        kw["max_iters"] = args.max_iters
    if args.target_radius is not None:
        kw["target_radius"] = args.target_radius
    if args.steps is not None:
        kw["integrator"] = IntegratorConfig(n_steps=args.steps)
    return replace(base, **kw)


def _emit(text: str, out) -> None:
    if out:
        mio.atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _threads() -> int:
    raw = os.environ.get("MONOPOLE_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"MONOPOLE_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise UsageError("MONOPOLE_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


# ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    config = _config(args)
    params = Params(args.epsilon, args.lam)
    res = newton_solve(params, args.guess, config)
    if args.format == "json":
        print(mio.result_to_json(res, include_profile=False))
    else:
        print(f"epsilon = {params.epsilon!r}")
        print(f"lambda = {params.lam!r}")
        print(f"a1 = {res.seed.a1!r}")
        print(f"b2 = {res.seed.b2!r}")
        print(f"residual = {res.residual[0]!r}, {res.residual[1]!r}")
        print(f"iterations = {res.iterations}")
        print(f"action = {res.action_value!r}")
    if args.out:
        text = mio.result_to_json(res) if args.format == "json" else mio.profile_csv(res.profile, args.sample)
        outcome = [{"epsilon": params.epsilon, "lambda": params.lam, "status": "converged"}]
        manifest = mio.build_manifest("solve", config, [(params.epsilon, params.lam)], outcome, [])
        mio.write_with_manifest(args.out, text, manifest)
    return EXIT_OK


def cmd_profile(args) -> int:
    config = _config(args)
    params = Params(args.epsilon, args.lam)
    res = newton_solve(params, args.guess, config)
    text = mio.profile_csv(res.profile, args.sample)
    if args.out:
        outcome = [{"epsilon": params.epsilon, "lambda": params.lam, "status": "converged",
                    "a1": res.seed.a1, "b2": res.seed.b2}]
        manifest = mio.build_manifest("profile", config, [(params.epsilon, params.lam)], outcome, [])
        mio.write_with_manifest(args.out, text, manifest)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_table(args) -> int:
    config = _config(args)
    eps = args.eps or list(TABLE1_EPSILONS)
    lam = args.lam or list(TABLE1_LAMBDAS)
    for e in eps:
        Params(e, 0.0)
    for x in lam:
        Params(1.0, x)
    results = continuation_sweep(eps, lam, config, independent_rows=True, threads=_threads())
    if args.format == "json":
        text = json.dumps(mio.table_rows(results), indent=2) + "\n"
    else:
        text = mio.table_csv(results)
    if args.out:
        outcomes = [{"epsilon": r.params.epsilon, "lambda": r.params.lam,
                     "status": r.code if isinstance(r, CellFailure) else "converged"} for r in results]
        grid = [(r.params.epsilon, r.params.lam) for r in results]
        mio.write_with_manifest(args.out, text, mio.build_manifest("table", config, grid, outcomes, []))
    else:
        sys.stdout.write(text)
    if args.check:
        report = mio.compare_table(results, mio.load_reference(args.check))
        print(json.dumps({k: report[k] for k in ("max_abs_da1", "max_abs_db2", "unmatched")}),
              file=sys.stderr if not args.out else sys.stdout)
    failed = sum(isinstance(r, CellFailure) for r in results)
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_stability(args) -> int:
    params = Params(args.epsilon, args.lam)
    reports = [classify_stability(fp, args.r, params).to_dict() for fp in FixedPointId]
    print(json.dumps(reports, indent=2))
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _config(args)
    selected = [name for name in CHECKS if getattr(args, name.replace("-", "_"))]
    if args.all or not selected:
        selected = list(CHECKS)
    shared = {}
    if {"overlap", "symmetry", "residual"} & set(selected):
        shared["result"] = newton_solve(Params(1.0, 0.0), None, config)
    checks = []
    for name in selected:
        fn = CHECKS[name]
        if name in ("overlap", "symmetry", "residual"):
            checks.append(fn(config, shared["result"]))
        elif name == "table":
            checks.append(fn(config))
        else:
            checks.append(fn())
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status:4s}  {c.name:12s} value={c.value!r} threshold={c.threshold!r}  {c.detail}")
    if args.format == "json":
        print(json.dumps([c.to_dict() for c in checks], indent=2))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERIC


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monopole", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one (epsilon, lambda) case")
    _add_params(p)
    p.add_argument("--guess", type=_guess, default=None, help="initial seed 'a1,b2'")
    p.add_argument("--out", help="write the profile CSV (or full JSON with --format json)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--sample", type=int, default=None, help="rows in the profile CSV")
    _add_config_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("profile", help="solve and emit r,gamma,phi,dgamma,dphi")
    _add_params(p)
    p.add_argument("--guess", type=_guess, default=None)
    p.add_argument("--out")
    p.add_argument("--sample", type=int, default=None, help="number of rows (default: every grid point)")
    _add_config_flags(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("table", help="continuation sweep over an (epsilon, lambda) grid")
    p.add_argument("--eps", "--epsilon", "-e", dest="eps", type=float, nargs="+")
    p.add_argument("--lam", "--lambda", "-l", dest="lam", type=float, nargs="+")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--check", metavar="PATH", help="reference CSV with epsilon,lambda,a1,b2")
    _add_config_flags(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("stability", help="classify the five fixed points at radius r")
    _add_params(p)
    p.add_argument("-r", "--r", type=float, required=True)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("verify", help="run numerical self-checks")
    for name in CHECKS:
        p.add_argument(f"--{name}", action="store_true")
    p.add_argument("--all", action="store_true")
    p.add_argument("--format", choices=("text", "json"), default="text")
    _add_config_flags(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ModelError, UsageError, ValueError) as exc:
        print(mio.error_payload("validation", str(exc)), file=sys.stderr)
        return EXIT_USAGE
    except ShootingError as exc:
        print(mio.error_payload(exc.code, str(exc), exc.context()), file=sys.stderr)
        return EXIT_NUMERIC
    except ArithmeticError as exc:
        print(mio.error_payload("numerical", str(exc)), file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
