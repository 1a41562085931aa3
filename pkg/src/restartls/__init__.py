"""Line-search methods with restarts for noisy unconstrained minimization.

The solver pairs a noise-tolerant backtracking Armijo search with a restart
test that falls back to steepest descent whenever a proposed direction is not
a sufficient descent direction or is too long.  Gradient descent, PRP+
nonlinear conjugate gradients and L-BFGS supply the directions.
"""
from .directions import GD, LBFGS, NLCG_PRP_PLUS, DirectionEngine, make_engine, two_loop
from .linesearch import LineSearchParams, LineSearchResult, backtrack, backtrack_bound
from .noise import NoiseConfig, NoisyOracle, derive_seed, sanity_bounds
from .solver import (
    CONVERGED,
    MAX_ITER,
    SPURIOUS_INITIAL_STOP,
    IterationRecord,
    RunResult,
    SolverConfig,
    restart_check,
    run,
    success_test,
)
from .testbed import Problem, ScaledProblem, get_problem, problem_names, registry, scale
from .theory import (
    TheoryConstants,
    TheoryParams,
    VerificationReport,
    alpha_bar,
    compute_constants,
    decrease_constants,
    gated_noise_setup,
    iteration_budget,
    params_for_run,
    verify_trace,
)

__version__ = "0.1.0"

__all__ = [
    "GD",
    "LBFGS",
    "NLCG_PRP_PLUS",
    "DirectionEngine",
    "make_engine",
    "two_loop",
    "LineSearchParams",
    "LineSearchResult",
    "backtrack",
    "backtrack_bound",
    "NoiseConfig",
    "NoisyOracle",
    "derive_seed",
    "sanity_bounds",
    "CONVERGED",
    "MAX_ITER",
    "SPURIOUS_INITIAL_STOP",
    "IterationRecord",
    "RunResult",
    "SolverConfig",
    "restart_check",
    "run",
    "success_test",
    "Problem",
    "ScaledProblem",
    "get_problem",
    "problem_names",
    "registry",
    "scale",
    "TheoryConstants",
    "TheoryParams",
    "VerificationReport",
    "alpha_bar",
    "compute_constants",
    "decrease_constants",
    "gated_noise_setup",
    "iteration_budget",
    "params_for_run",
    "verify_trace",
]
