"""Line-search driver with restart conditions and noisy estimates."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from .directions import GD, KINDS, DirectionEngine
from .linesearch import LineSearchParams, backtrack
from .noise import NoiseConfig, NoisyOracle

__all__ = [
    "SolverConfig",
    "IterationRecord",
    "RunResult",
    "CONVERGED",
    "MAX_ITER",
    "SPURIOUS_INITIAL_STOP",
    "restart_check",
    "success_test",
    "run",
]

CONVERGED = "Converged"
MAX_ITER = "MaxIter"
SPURIOUS_INITIAL_STOP = "SpuriousInitialStop"


@dataclass(frozen=True)
class SolverConfig:
    """All parameters of one solver run.

    ``sigma_d = 0`` together with ``kappa_d = inf`` restarts only on
    non-descent directions.  ``eps_g`` is the gradient noise level used both
    to build the default oracle and in the stopping and success tests.
    """

    eta: float = 0.5
    theta: float = 0.5
    sigma_d: float = 1.0
    kappa_d: float = 1.0
    p: float = 1.0
    eps_f: float = 0.0
    eps_g: float = 0.0
    max_iter: int = 1000
    j_max: int = 50
    method: str = GD
    grad_tol_floor: float = 1e-8
    memory: int = 10
    eps_sy: float = 1e-4
    lbfgs_keep_memory: bool = True
    beta_override: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.eta <= 0.5:
            raise ValueError("eta must lie in (0, 1/2]")
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie in (0, 1)")
        if not 0.0 <= self.sigma_d <= 1.0:
            raise ValueError("sigma_d must lie in [0, 1]")
        if not self.kappa_d >= 1.0:
            raise ValueError("kappa_d must be >= 1 (or inf)")
        if self.p < 0:
            raise ValueError("p must be nonnegative")
        if self.eps_f < 0 or self.eps_g < 0:
            raise ValueError("noise levels must be nonnegative")
        if self.method not in KINDS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.max_iter < 0 or self.j_max < 1:
            raise ValueError("max_iter must be >= 0 and j_max >= 1")

    @property
    def grad_tol(self) -> float:
        return max(2.0 * self.eps_g, self.grad_tol_floor)

    def to_dict(self):
        d = asdict(self)
        d["kappa_d"] = _enc_float(self.kappa_d)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["kappa_d"] = _dec_float(d["kappa_d"])
        return cls(**d)


@dataclass
class IterationRecord:
    """What happened during iteration ``k`` (from ``x_k`` to ``x_{k+1}``).

    ``restarted`` means the restart test fired after the step, so the next
    direction is ``-g_{k+1}``.  ``neg_grad_dir`` means ``d_k == -g_k``.
    Counters are cumulative after the iteration.
    """

    k: int
    alpha: float
    j: int
    restarted: bool
    capped_ls: bool
    neg_grad_dir: bool
    g_norm: float
    g_norm_inf: float
    true_grad_norm: float
    true_grad_norm_inf: float
    f_true: float
    f_true_next: float
    g_dot_d: float
    d_norm: float
    f_evals_so_far: int
    g_evals_so_far: int

    @property
    def f_decrease(self) -> float:
        return self.f_true - self.f_true_next


@dataclass
class RunResult:
    status: str
    iterations: int
    trace: list
    restart_fraction: float
    final_x: np.ndarray
    solved: bool
    first_success_index: Optional[int]
    n_f_evals: int
    n_g_evals: int
    final_true_grad_norm: float
    final_true_grad_norm_inf: float
    final_f_true: float
    problem: str = ""
    config: Optional[SolverConfig] = None
    noise: Optional[NoiseConfig] = None
    message: str = ""

    @property
    def cost(self) -> Optional[int]:
        """Gradient evaluations needed to reach the first successful iterate."""
        if self.first_success_index is None:
            return None
        return self.first_success_index + 1

    @property
    def n_restarts(self) -> int:
        return sum(1 for r in self.trace if r.restarted)

    def to_dict(self):
        return {
            "problem": self.problem,
            "status": self.status,
            "message": self.message,
            "iterations": self.iterations,
            "restart_fraction": self.restart_fraction,
            "solved": self.solved,
            "first_success_index": self.first_success_index,
            "n_f_evals": self.n_f_evals,
            "n_g_evals": self.n_g_evals,
            "final_true_grad_norm": self.final_true_grad_norm,
            "final_true_grad_norm_inf": self.final_true_grad_norm_inf,
            "final_f_true": self.final_f_true,
            "final_x": [float(v) for v in self.final_x],
            "config": None if self.config is None else self.config.to_dict(),
            "noise": None if self.noise is None else self.noise.to_dict(),
            "trace": [asdict(r) for r in self.trace],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, allow_nan=True, **kwargs)

    @classmethod
    def from_dict(cls, d):
        cfg = None if d.get("config") is None else SolverConfig.from_dict(d["config"])
        noise = None if d.get("noise") is None else NoiseConfig(**d["noise"])
        return cls(
            status=d["status"],
            iterations=d["iterations"],
            trace=[IterationRecord(**r) for r in d["trace"]],
            restart_fraction=d["restart_fraction"],
            final_x=np.asarray(d["final_x"], dtype=float),
            solved=d["solved"],
            first_success_index=d["first_success_index"],
            n_f_evals=d["n_f_evals"],
            n_g_evals=d["n_g_evals"],
            final_true_grad_norm=d["final_true_grad_norm"],
            final_true_grad_norm_inf=d["final_true_grad_norm_inf"],
            final_f_true=d["final_f_true"],
            problem=d.get("problem", ""),
            config=cfg,
            noise=noise,
            message=d.get("message", ""),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def summary_line(self) -> str:
        return (
            f"{self.problem}: {self.status} after {self.iterations} iterations, "
            f"solved={self.solved} cost={self.cost} restarts={self.restart_fraction:.2%} "
            f"nf={self.n_f_evals} ng={self.n_g_evals} "
            f"|grad|_inf={self.final_true_grad_norm_inf:.3e}"
        )


def _enc_float(v):
    return "inf" if v == math.inf else v


def _dec_float(v):
    return math.inf if v == "inf" else float(v)


def restart_check(g, d, sigma_d, kappa_d, p) -> bool:
    """True when ``d`` lacks sufficient descent or is too long relative to ``g``.

    Fires on ``g^T d >= -sigma_d ||g||^(1+p)`` or
    ``||d|| >= kappa_d ||g||^((1+p)/2)``; ``kappa_d = inf`` disables the
    second test.
    """
    gn = float(np.linalg.norm(g))
    if float(np.dot(g, d)) >= -sigma_d * gn ** (1.0 + p):
        return True
    if kappa_d == math.inf:
        return False
    return float(np.linalg.norm(d)) >= kappa_d * gn ** ((1.0 + p) / 2.0)


def success_test(true_grad_inf_norm, eps_g, floor=1e-8) -> bool:
    return true_grad_inf_norm <= eps_g + max(2.0 * eps_g, floor)


def run(problem, cfg: SolverConfig, seed=0, noise: Optional[NoiseConfig] = None) -> RunResult:
    """Minimize ``problem`` from its ``x0``.

    Parameters
    ----------
    problem : Problem or ScaledProblem
    cfg : SolverConfig
    seed : int
        Seed of the default oracle (ignored when ``noise`` is given).
    noise : NoiseConfig, optional
        Explicit oracle configuration, e.g. with gradient errors tied to the
        true gradient norm.  Defaults to ball noise of radius ``cfg.eps_g``
        and uniform function noise of half-width ``cfg.eps_f``.

    Returns
    -------
    RunResult
        Terminal status, per-iteration trace, and the true-gradient success
        test evaluated on every iterate.
    """
    if noise is None:
        noise = NoiseConfig(eps_f=cfg.eps_f, eps_g=cfg.eps_g, seed=seed)
    oracle = NoisyOracle(problem, noise)
    engine = DirectionEngine(
        cfg.method,
        memory=cfg.memory,
        eps_sy=cfg.eps_sy,
        keep_memory=cfg.lbfgs_keep_memory,
        beta_override=cfg.beta_override,
    )
    ls_params = LineSearchParams(eta=cfg.eta, theta=cfg.theta, eps_f=cfg.eps_f, j_max=cfg.j_max)
    x0 = np.array(problem.x0, dtype=float)
    if x0.shape != (problem.dim,):
        raise ValueError("x0 does not match the problem dimension")

    tol = cfg.grad_tol
    succ_thr = cfg.eps_g + tol

    x = x0
    g = oracle.grad(x)
    gt = oracle.last_true_grad
    f_true = oracle.true_f(x)
    d = -g
    neg_grad = True

    trace = []
    first_success = None
    status = MAX_ITER
    message = ""
    k = 0
    while True:
        gt_inf = float(np.max(np.abs(gt)))
        if first_success is None and gt_inf <= succ_thr:
            first_success = k
        if float(np.max(np.abs(g))) <= tol:
            if k == 0 and first_success is None:
                status = SPURIOUS_INITIAL_STOP
            else:
                status = CONVERGED
            break
        if k >= cfg.max_iter:
            break

        ls = backtrack(oracle, x, d, g, ls_params)
        x_new = ls.x_trial
        if not np.all(np.isfinite(x_new)):
            message = f"non-finite iterate at iteration {k}"
            break
        f_true_new = oracle.last_true_f
        g_new = oracle.grad(x_new)
        gt_new = oracle.last_true_grad

        engine.update_state(x, x_new, g, g_new, d_taken=d, restarted=neg_grad)
        d_new = engine.propose(g_new)
        restarted = restart_check(g_new, d_new, cfg.sigma_d, cfg.kappa_d, cfg.p)
        if restarted:
            d_new = -g_new
            engine.reset_on_restart()

        trace.append(IterationRecord(
            k=k,
            alpha=ls.alpha,
            j=ls.j,
            restarted=restarted,
            capped_ls=ls.capped,
            neg_grad_dir=neg_grad,
            g_norm=float(np.linalg.norm(g)),
            g_norm_inf=float(np.max(np.abs(g))),
            true_grad_norm=float(np.linalg.norm(gt)),
            true_grad_norm_inf=gt_inf,
            f_true=f_true,
            f_true_next=f_true_new,
            g_dot_d=float(np.dot(g, d)),
            d_norm=float(np.linalg.norm(d)),
            f_evals_so_far=oracle.n_f_evals,
            g_evals_so_far=oracle.n_g_evals,
        ))

        neg_grad = restarted or bool(np.array_equal(d_new, -g_new))
        x, g, gt, f_true, d = x_new, g_new, gt_new, f_true_new, d_new
        k += 1

    iterations = len(trace)
    n_restarts = sum(1 for r in trace if r.restarted)
    return RunResult(
        status=status,
        iterations=iterations,
        trace=trace,
        restart_fraction=n_restarts / iterations if iterations else 0.0,
        final_x=x,
        solved=first_success is not None,
        first_success_index=first_success,
        n_f_evals=oracle.n_f_evals,
        n_g_evals=oracle.n_g_evals,
        final_true_grad_norm=float(np.linalg.norm(gt)),
        final_true_grad_norm_inf=float(np.max(np.abs(gt))),
        final_f_true=f_true,
        problem=problem.name,
        config=cfg,
        noise=noise,
        message=message,
    )


def with_noise_level(cfg: SolverConfig, eps_f: float) -> SolverConfig:
    """Copy of ``cfg`` at noise level ``eps_f`` with ``eps_g = sqrt(eps_f)``."""
    return replace(cfg, eps_f=eps_f, eps_g=float(np.sqrt(eps_f)))
