"""Batch command-line interface: solve, sweep, constants.

Exit codes: 0 success, 2 configuration problems, 3 solver or eigenvalue
nonconvergence, 4 smallness violation without --force, 5 aborted sweep with
partial results.  All logging goes to standard error; result files go to
the configured output directory.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import parse_config
from .errors import ConfigError, PenfemError, SmallnessViolation, SolverError, SweepIncomplete
from .lab import (
    boundedness_audit,
    mesh_family,
    plan_cells,
    problem_constants,
    run_sweep,
    write_constants_report,
    write_report_csv,
)
from .solver import residual_check, solve_penalized, save_solution

log = logging.getLogger("penfem")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_SMALLNESS = 4
EXIT_PARTIAL = 5


def _out_dir(cfg, override: str | None) -> Path:
    out = Path(override) if override else Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_solve(args) -> int:
    cfg = parse_config(args.config)
    if args.eps is not None and args.eps <= 0.0:
        raise ConfigError("field '--eps' must be positive")
    if args.level is not None and args.level < 0:
        raise ConfigError("field '--level' must be nonnegative")
    level = args.level if args.level is not None else 0
    eps = args.eps if args.eps is not None else 1e-2
    spec = cfg.problem()
    mesh = mesh_family(spec.mesh, level)[level]
    sol = solve_penalized(
        spec, mesh, eps, cfg.solver, allow_smallness_violation=args.force
    )
    out = _out_dir(cfg, args.out)
    sol_path = out / f"solution_L{level}_eps{eps:g}.txt"
    save_solution(sol, sol_path)
    breakdown = residual_check(spec, mesh, eps, sol.coefficients)
    res_path = out / f"residual_L{level}_eps{eps:g}.txt"
    with open(res_path, "w", encoding="utf-8") as fh:
        fh.write(f"total={breakdown.total!r}\n")
        fh.write(f"normalized={breakdown.normalized!r}\n")
        for name, val in breakdown.terms.items():
            fh.write(f"{name}={val!r}\n")
    log.info(
        "solved %s level=%d eps=%g: newton=%d residual=%.3e active=%d",
        spec.label, level, eps,
        sol.diagnostics.newton_iterations, sol.diagnostics.final_residual,
        sol.diagnostics.active_count,
    )
    log.info("wrote %s and %s", sol_path, res_path)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = parse_config(args.config)
    if args.workers is not None:
        cfg.workers = args.workers
    if args.seed is not None:
        cfg.seed = args.seed
    spec = cfg.problem()
    plan = cfg.plan()
    out = _out_dir(cfg, args.out)
    if args.dry_run:
        meshes = mesh_family(spec.mesh, max(plan.refinement_levels))
        print(f"sweep plan for {spec.label} ({plan.coupling}, ref={plan.reference}):")
        for lvl, eps in plan_cells(plan, meshes):
            print(f"  level={lvl} h={meshes[lvl].h:.6g} eps={eps:.6g}")
        return EXIT_OK

    top = max(plan.refinement_levels)
    constants = problem_constants(spec, mesh_family(spec.mesh, top)[top])
    write_constants_report(constants, out / "constants.txt")
    if constants.verdict != "satisfied" and not args.force:
        log.error(
            "smallness condition violated: margin %.6g "
            "(alpha_phi*c_phi^2 + alpha_j*c_j^2 >= m_A); use --force to proceed",
            constants.smallness_margin,
        )
        return EXIT_SMALLNESS

    try:
        report = run_sweep(
            spec, plan, cfg.solver,
            workers=cfg.workers, force=args.force, constants=constants,
        )
    except SweepIncomplete as exc:
        if exc.partial_report is not None:
            write_report_csv(exc.partial_report, out / "convergence.csv")
        log.error("sweep incomplete: %s", exc)
        return EXIT_PARTIAL

    write_report_csv(report, out / "convergence.csv")
    audit = boundedness_audit(report)
    print(
        f"{spec.label}: {len(report.rows)} cells, rate_h={report.rate_h:.3f} "
        f"rate_eps={report.rate_eps:.3f} max_norm={audit.max_norm:.6g} "
        f"bounded={'yes' if audit.monotone_flag else 'NO'} "
        f"smallness={constants.verdict}"
    )
    log.info("wrote %s and %s", out / "convergence.csv", out / "constants.txt")
    return EXIT_OK


def cmd_constants(args) -> int:
    cfg = parse_config(args.config)
    spec = cfg.problem()
    top = max(cfg.levels)
    mesh = mesh_family(spec.mesh, top)[top]
    report = problem_constants(spec, mesh)
    out = _out_dir(cfg, args.out)
    write_constants_report(report, out / "constants.txt")
    print(
        f"{spec.label}: lambda_1V={report.lambda_1V:.6g} "
        f"lambda_1nuV={report.lambda_1nuV:.6g} margin={report.smallness_margin:.6g} "
        f"verdict={report.verdict}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="penfem",
        description="Penalty finite element experiments for constrained inequality problems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="one penalized solve")
    p_solve.add_argument("config")
    p_solve.add_argument("--level", type=int, default=None)
    p_solve.add_argument("--eps", type=float, default=None)
    p_solve.add_argument("--out", default=None)
    p_solve.add_argument("--force", action="store_true")
    p_solve.set_defaults(fn=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="run the configured (h, eps) sweep")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--force", action="store_true")
    p_sweep.add_argument("--dry-run", action="store_true")
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(fn=cmd_sweep)

    p_const = sub.add_parser("constants", help="estimate trace constants and the margin")
    p_const.add_argument("config")
    p_const.add_argument("--out", default=None)
    p_const.set_defaults(fn=cmd_constants)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except SmallnessViolation as exc:
        log.error("%s", exc)
        return EXIT_SMALLNESS
    except SolverError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_SOLVER
    except PenfemError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
