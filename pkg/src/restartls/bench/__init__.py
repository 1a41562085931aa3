"""Benchmark harness: method specs, sweeps, restart tables, profiles and file output."""
from .methods import DEFAULT_METHODS, MethodSpec, grid_methods, parse_method, parse_methods
from .output import BenchArtifacts, build_artifacts, emit, read_cost_matrix_csv, read_runs_csv
from .profiles import (
    ProfileCurve,
    aggregate_costs,
    data_profile,
    performance_profile,
    uniquely_fastest_counts,
)
from .runner import (
    DEFAULT_KAPPA_GRID,
    DEFAULT_NOISE_LEVELS,
    DEFAULT_P_GRID,
    CostMatrix,
    ExperimentPlan,
    RunSummary,
    discard_stats,
    run_one,
    run_plan,
)
from .tables import RestartTable, best_cells, restart_table


def run_bench(plan: ExperimentPlan, workers=1, progress=None):
    """Run ``plan`` and write its artifacts when ``plan.output_dir`` is set.

    The output directory is probed before any run starts, so an unwritable
    location fails fast.  The artifacts are returned in memory either way.
    """
    from .output import ensure_writable

    if plan.output_dir:
        ensure_writable(plan.output_dir)
    summaries, matrix = run_plan(plan, workers=workers, progress=progress)
    art = build_artifacts(plan, summaries, matrix)
    if plan.output_dir:
        emit(art, plan.output_dir)
    return art


__all__ = [
    "DEFAULT_METHODS",
    "DEFAULT_NOISE_LEVELS",
    "DEFAULT_P_GRID",
    "DEFAULT_KAPPA_GRID",
    "MethodSpec",
    "grid_methods",
    "parse_method",
    "parse_methods",
    "ExperimentPlan",
    "RunSummary",
    "CostMatrix",
    "run_one",
    "run_plan",
    "run_bench",
    "discard_stats",
    "RestartTable",
    "restart_table",
    "best_cells",
    "ProfileCurve",
    "aggregate_costs",
    "performance_profile",
    "data_profile",
    "uniquely_fastest_counts",
    "BenchArtifacts",
    "build_artifacts",
    "emit",
    "read_cost_matrix_csv",
    "read_runs_csv",
]
