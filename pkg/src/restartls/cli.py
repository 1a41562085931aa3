"""Command-line entry point: ``restartls {solve,bench,profiles,tables,verify}``."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace

from . import __version__
from .bench import (
    DEFAULT_KAPPA_GRID,
    DEFAULT_P_GRID,
    ExperimentPlan,
    parse_method,
    parse_methods,
    read_cost_matrix_csv,
    read_runs_csv,
    run_bench,
    run_plan,
)
from .bench.output import ensure_writable, noise_tag, profile_csv, profile_svg
from .bench.profiles import aggregate_costs, data_profile_from_costs, performance_profile_from_costs
from .bench.tables import restart_table
from .noise import NoiseConfig
from .solver import RunResult, run
from .testbed import get_problem, problem_names, scale
from .theory import gated_noise_setup, params_for_run, verify_trace


def _floats(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _names(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _write_or_print(text, path):
    if path and path != "-":
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# solve
# --------------------------------------------------------------------------


def cmd_solve(args):
    base = get_problem(args.problem)
    problem = base if args.no_scale else scale(base)
    method = parse_method(args.method, p=args.p, kappa=args.kappa)
    cfg = method.config(max_iter=args.max_iter)
    eps_f = args.noise
    if args.sigma_phi is not None:
        eps_1st = math.sqrt(eps_f) if args.eps_1st is None else args.eps_1st
        cfg, noise, _ = gated_noise_setup(problem, cfg, args.sigma_phi, eps_1st, seed=args.seed)
    else:
        eps_g = math.sqrt(eps_f)
        cfg = replace(cfg, eps_f=eps_f, eps_g=eps_g)
        noise = NoiseConfig(eps_f=eps_f, eps_g=eps_g, seed=args.seed)
    res = run(problem, cfg, noise=noise)
    print(res.summary_line())
    if args.trace:
        print(f"{'k':>5} {'alpha':>10} {'j':>3} {'R':>1} {'|g|_inf':>10} {'|grad|_inf':>10} {'f':>12}")
        for r in res.trace:
            print(f"{r.k:5d} {r.alpha:10.3e} {r.j:3d} {'*' if r.restarted else ' '} "
                  f"{r.g_norm_inf:10.3e} {r.true_grad_norm_inf:10.3e} {r.f_true:12.5e}")
    if args.json:
        _write_or_print(res.to_json(indent=1) + "\n", args.json)
    return 0


# --------------------------------------------------------------------------
# bench / tables
# --------------------------------------------------------------------------


def _plan_from_args(args):
    if args.config:
        plan = ExperimentPlan.from_json_file(args.config)
    else:
        plan = ExperimentPlan()
    if args.problems:
        plan.problems = _names(args.problems)
    if args.methods:
        plan.methods = parse_methods(args.methods)
    if args.noise:
        plan.noise_levels = _floats(args.noise)
    if args.reps is not None:
        plan.replicates = args.reps
    if args.seed is not None:
        plan.master_seed = args.seed
    if args.out:
        plan.output_dir = args.out
    if args.max_iter is not None:
        plan.max_iter = args.max_iter
    if args.no_grid:
        plan.p_grid, plan.kappa_grid = [], []
    else:
        if args.p_grid:
            plan.p_grid = _floats(args.p_grid)
        elif not plan.p_grid:
            plan.p_grid = list(DEFAULT_P_GRID)
        if args.kappa_grid:
            plan.kappa_grid = _floats(args.kappa_grid)
        elif not plan.kappa_grid:
            plan.kappa_grid = list(DEFAULT_KAPPA_GRID)
    return plan


def _progress(done, total):
    if done == total or done % 200 == 0:
        print(f"  {done}/{total} runs", file=sys.stderr)


def cmd_bench(args):
    plan = _plan_from_args(args)
    if not plan.output_dir:
        plan.output_dir = "bench_out"
    plan.validate()
    art = run_bench(plan, workers=args.workers, progress=None if args.quiet else _progress)
    for e, d in art.discards.items():
        print(f"eps_f={e:g}: {d['discarded']}/{d['runs']} runs discarded ({d['percent']:.2f}%)")
    for t in art.tables:
        if t.minimum is not None:
            p, k = t.minimum
            print(f"{t.family} eps_f={t.eps_f:g}: fewest restarts at p={p:g}, kappa_d={k:g} "
                  f"({t.cells[t.minimum]:.2f}%)")
    print(f"artifacts written to {plan.output_dir}")
    return 0


def cmd_tables(args):
    if args.runs:
        with open(args.runs) as fh:
            summaries = read_runs_csv(fh.read())
        noise = _floats(args.noise) if args.noise else sorted({s.eps_f for s in summaries})
        p_grid = _floats(args.p_grid) if args.p_grid else None
        k_grid = _floats(args.kappa_grid) if args.kappa_grid else None
    else:
        args.no_grid = False
        plan = _plan_from_args(args)
        if not args.methods:
            plan.methods = []
        if not args.noise:
            plan.noise_levels = [0.0]
        if plan.output_dir:
            ensure_writable(plan.output_dir)
        summaries, _ = run_plan(plan, workers=args.workers)
        noise, p_grid, k_grid = plan.noise_levels, plan.p_grid, plan.kappa_grid
    for e in noise:
        for fam in ("nlcgr", "lbfgsr"):
            t = restart_table(summaries, fam, float(e), p_grid, k_grid)
            if not t.cells:
                continue
            print(t.to_markdown())
            if args.out:
                stem = os.path.join(args.out, f"restarts_{fam}_{noise_tag(e)}")
                _write_or_print(t.to_csv(), stem + ".csv")
                _write_or_print(t.to_markdown(), stem + ".md")
    return 0


# --------------------------------------------------------------------------
# profiles
# --------------------------------------------------------------------------


def cmd_profiles(args):
    with open(args.matrix) as fh:
        matrix = read_cost_matrix_csv(fh.read())
    methods = _names(args.methods) if args.methods else matrix.methods()
    unknown = [m for m in methods if m not in matrix.methods()]
    if unknown:
        print(f"error: methods not in the cost matrix: {', '.join(unknown)}", file=sys.stderr)
        return 2
    levels = _floats(args.noise) if args.noise else matrix.noise_levels()
    for e in levels:
        problems, costs = aggregate_costs(matrix, methods, e)
        dims = [matrix.dims[pb] for pb in problems]
        kinds = [("data", data_profile_from_costs(costs, dims), "budget in units of (n+1) gradients", False)]
        if len(methods) >= 2:
            kinds.insert(0, ("perf", performance_profile_from_costs(costs), "log2(tau)", True))
        print(f"eps_f={e:g}: {len(problems)} problems")
        for kind, curves, xlabel, log2_x in kinds:
            for m, c in curves.items():
                print(f"  {kind:4s} {m:28s} terminal={c.terminal:.3f}")
            if args.out:
                stem = os.path.join(args.out, f"{kind}_{noise_tag(e)}_{args.name}")
                _write_or_print(profile_csv(curves), stem + ".csv")
                title = ("Performance" if kind == "perf" else "Data") + f" profile, eps_f={e:g}"
                _write_or_print(profile_svg(curves, title, xlabel, log2_x=log2_x), stem + ".svg")
    return 0


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------


def cmd_verify(args):
    with open(args.result) as fh:
        res = RunResult.from_json(fh.read())
    if res.config is None:
        print("error: the run result carries no solver configuration", file=sys.stderr)
        return 2
    base = get_problem(res.problem)
    problem = base if args.no_scale else scale(base)
    noise = res.noise
    if args.sigma_phi is not None:
        sigma_phi = args.sigma_phi
    elif noise is not None and noise.enforce_assumption4:
        sigma_phi = noise.sigma_phi
    else:
        sigma_phi = 0.0
    try:
        params = params_for_run(problem, res.config, sigma_phi, eps_1st=args.eps_1st)
    except ValueError:
        params = None
    rep = verify_trace(res, params, tol=res.config.grad_tol)
    _write_or_print(json.dumps(rep.to_dict(), indent=2, sort_keys=True, default=str) + "\n",
                    args.report)
    stream = sys.stderr if not args.report else sys.stdout
    for line in rep.lines():
        print(line, file=stream)
    return 0 if rep.passed else 1


# --------------------------------------------------------------------------


def _add_plan_flags(sp):
    sp.add_argument("--config", help="ExperimentPlan JSON file; flags override its fields")
    sp.add_argument("--methods", help="comma list, e.g. gd,nlcg,lbfgs,nlcgr:0.75:1e6")
    sp.add_argument("--problems", help=f"comma list of registered problems ({len(problem_names())} available)")
    sp.add_argument("--noise", help="comma list of eps_f levels (eps_g = sqrt(eps_f))")
    sp.add_argument("--reps", type=int, help="replicates per configuration")
    sp.add_argument("--seed", type=int, help="master seed")
    sp.add_argument("--out", help="output directory")
    sp.add_argument("--p-grid", help="comma list of p values for the restart grid")
    sp.add_argument("--kappa-grid", help="comma list of kappa_d values for the restart grid")
    sp.add_argument("--max-iter", type=int)
    sp.add_argument("--workers", type=int, default=1)


def build_parser():
    ap = argparse.ArgumentParser(prog="restartls", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run one solver on one problem")
    s.add_argument("--problem", required=True, choices=problem_names())
    s.add_argument("--method", default="gd", help="gd|nlcg|lbfgs|nlcgr|lbfgsr[:p[:kappa]]")
    s.add_argument("--p", type=float, default=0.75)
    s.add_argument("--kappa", type=float, default=1e6)
    s.add_argument("--noise", type=float, default=0.0, help="eps_f; eps_g = sqrt(eps_f)")
    s.add_argument("--sigma-phi", type=float,
                   help="tie gradient errors to the true gradient and set eps_f at the budget gate")
    s.add_argument("--eps-1st", type=float, help="gradient error floor with --sigma-phi")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-iter", type=int, default=1000)
    s.add_argument("--no-scale", action="store_true", help="skip the initial-gradient scaling")
    s.add_argument("--json", nargs="?", const="-", help="write the RunResult JSON (to a file or stdout)")
    s.add_argument("--trace", action="store_true", help="print the per-iteration trace")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run an experiment plan and write tables and profiles")
    _add_plan_flags(b)
    b.add_argument("--no-grid", action="store_true", help="skip the (p, kappa_d) restart grid")
    b.add_argument("--quiet", action="store_true")
    b.set_defaults(func=cmd_bench)

    p = sub.add_parser("profiles", help="recompute profiles from a cost-matrix CSV")
    p.add_argument("matrix")
    p.add_argument("--methods", help="comma list of method labels (default: all)")
    p.add_argument("--noise", help="comma list of eps_f levels (default: all)")
    p.add_argument("--out", help="directory for CSV and SVG output")
    p.add_argument("--name", default="custom", help="method-set tag used in file names")
    p.set_defaults(func=cmd_profiles)

    t = sub.add_parser("tables", help="restart statistics over the (p, kappa_d) grid")
    _add_plan_flags(t)
    t.add_argument("--runs", help="read run summaries from runs.csv instead of running")
    t.set_defaults(func=cmd_tables)

    v = sub.add_parser("verify", help="check a RunResult JSON against the complexity guarantees")
    v.add_argument("result")
    v.add_argument("--sigma-phi", type=float, help="relative gradient accuracy (default: from the run)")
    v.add_argument("--eps-1st", type=float, help="gradient error floor (default: the run's eps_g)")
    v.add_argument("--no-scale", action="store_true", help="the run used the unscaled problem")
    v.add_argument("--report", help="write the JSON report here (default: stdout)")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
