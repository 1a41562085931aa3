"""Complexity constants of the restarted line-search framework and a trace verifier.

All quantities refer to the Euclidean norm.  ``alpha_bar`` is the step-size
floor that bounds backtracking; ``c_N``/``c_R`` are the guaranteed per-iteration
decrease constants for non-restarted and restarted iterations; ``K_eps`` is the
iteration budget to reach an ``eps``-stationary point.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

from .linesearch import backtrack_bound

__all__ = [
    "TheoryParams",
    "TheoryConstants",
    "Violation",
    "VerificationReport",
    "alpha_bar",
    "alpha_bar_restarted",
    "decrease_constants",
    "iteration_budget",
    "log_theta_plus",
    "compute_constants",
    "params_for_run",
    "gated_noise_setup",
    "verify_trace",
]

# ceil() guard against representation error in values that are exact integers in exact arithmetic
_CEIL_RTOL = 1e-12


@dataclass(frozen=True)
class TheoryParams:
    eta: float
    theta: float
    sigma_d: float
    kappa_d: float
    p: float
    sigma_phi: float
    L: float
    eps_1st: float
    eps_f: float
    f0: float
    f_low: float

    def __post_init__(self):
        if not 0.0 <= self.sigma_phi < 1.0:
            raise ValueError("sigma_phi must lie in [0, 1)")
        if not self.L > 0:
            raise ValueError("L must be positive")
        if self.f0 < self.f_low:
            raise ValueError("f0 must be >= f_low")
        if not self.kappa_d >= 1.0:
            raise ValueError("kappa_d must be >= 1")


@dataclass(frozen=True)
class TheoryConstants:
    alpha_bar_p: float
    alpha_bar_1: float
    c_N: Optional[float]
    c_R: float
    j_bar_N: float
    j_bar_R: float
    K_eps: float
    eval_bound: float
    eps: float
    noise_gate_ok: bool


def alpha_bar(params: TheoryParams, use_p=None) -> float:
    """Step-size floor for directions satisfying the sufficient-descent/length test.

    ``2(1-eta) sigma_d (1-s)^(1+p) / (2 kappa_d (1+s)^((1+p)/2) + L kappa_d^2 (1+s)^(1+p))``
    with ``s = sigma_phi``.  Zero when ``sigma_d = 0`` or ``kappa_d = inf``.
    """
    p = params.p if use_p is None else use_p
    s = params.sigma_phi
    kd = params.kappa_d
    if kd == math.inf or params.sigma_d == 0.0:
        return 0.0
    num = 2.0 * (1.0 - params.eta) * params.sigma_d * (1.0 - s) ** (1.0 + p)
    den = 2.0 * kd * (1.0 + s) ** ((1.0 + p) / 2.0) + params.L * kd * kd * (1.0 + s) ** (1.0 + p)
    return num / den


def alpha_bar_restarted(params: TheoryParams) -> float:
    """The floor for steepest-descent directions (``sigma_d = kappa_d = p = 1``)."""
    return alpha_bar(replace(params, sigma_d=1.0, kappa_d=1.0, p=1.0), use_p=1.0)


def log_theta_plus(a, theta) -> float:
    """``[log_theta(a)]_+``; infinite for ``a == 0``."""
    if a <= 0:
        return math.inf
    return max(0.0, math.log(a) / math.log(theta))


def decrease_constants(params: TheoryParams, ab_p=None, ab_1=None):
    """Return ``(c_N, c_R)``.

    ``c_N`` is ``None`` (undefined) when ``sigma_phi = 0`` and ``p > 0``.
    """
    ab_p = alpha_bar(params) if ab_p is None else ab_p
    ab_1 = alpha_bar_restarted(params) if ab_1 is None else ab_1
    eta, theta, p, s = params.eta, params.theta, params.p, params.sigma_phi
    c_R = eta * min(1.0, theta * ab_1)
    if s == 0.0 and p > 0:
        c_N = None
    else:
        c_N = eta * params.sigma_d * (1.0 - s) ** (1.0 + p) / s ** p * min(1.0, theta * ab_p)
    return c_N, c_R


def _ceil(v):
    if v == math.inf:
        return math.inf
    r = round(v)
    if abs(v - r) <= _CEIL_RTOL * max(1.0, abs(v)):
        return int(r)
    return int(math.ceil(v))


def iteration_budget(params: TheoryParams, c_N, c_R, ab_p=None, ab_1=None):
    """Return ``(K_eps, eval_bound, eps, noise_gate_ok)``.

    Budgets are ``math.inf`` when ``eps_1st = 0`` (with a positive gap) or
    when ``c_N`` is undefined or zero.
    """
    ab_p = alpha_bar(params) if ab_p is None else ab_p
    ab_1 = alpha_bar_restarted(params) if ab_1 is None else ab_1
    gap = params.f0 - params.f_low
    e1, p, s = params.eps_1st, params.p, params.sigma_phi

    if gap == 0.0:
        K = 0
    elif e1 == 0.0 or not c_N or not c_R:
        K = math.inf
    else:
        K = _ceil(2.0 * gap / (c_R * e1 ** 2) + 2.0 * gap / (c_N * e1 ** (1.0 + p)))

    per_iter = log_theta_plus(min(ab_p, ab_1), params.theta) + 1.0
    if K == 0:
        ev = 0
    elif K == math.inf or per_iter == math.inf:
        ev = math.inf
    else:
        ev = _ceil(per_iter * K)

    if s == 0.0 or ab_p == 0.0:
        eps = 0.0 if e1 == 0.0 else math.inf
    else:
        r = e1 / (s * ab_p)
        eps = max(r, r ** (2.0 / (1.0 + p)), e1 / (s * ab_1))

    if c_N is None:
        gate = params.eps_f == 0.0
    else:
        gate = params.eps_f <= min(c_N / 8.0 * e1 ** (1.0 + p), c_R / 8.0 * e1 ** 2)
    return K, ev, eps, gate


def compute_constants(params: TheoryParams) -> TheoryConstants:
    ab_p = alpha_bar(params)
    ab_1 = alpha_bar_restarted(params)
    c_N, c_R = decrease_constants(params, ab_p, ab_1)
    K, ev, eps, gate = iteration_budget(params, c_N, c_R, ab_p, ab_1)
    return TheoryConstants(
        alpha_bar_p=ab_p,
        alpha_bar_1=ab_1,
        c_N=c_N,
        c_R=c_R,
        j_bar_N=log_theta_plus(ab_p, params.theta),
        j_bar_R=log_theta_plus(ab_1, params.theta),
        K_eps=K,
        eval_bound=ev,
        eps=eps,
        noise_gate_ok=gate,
    )


def params_for_run(problem, cfg, sigma_phi, eps_1st=None, eps_f=None) -> TheoryParams:
    """Theory parameters for a solver configuration on a problem with known ``L`` and ``f_low``."""
    if problem.lipschitz_L is None or problem.f_low is None:
        raise ValueError(f"{problem.name}: Lipschitz constant and lower bound are required")
    return TheoryParams(
        eta=cfg.eta,
        theta=cfg.theta,
        sigma_d=cfg.sigma_d,
        kappa_d=cfg.kappa_d,
        p=cfg.p,
        sigma_phi=sigma_phi,
        L=problem.lipschitz_L,
        eps_1st=cfg.eps_g if eps_1st is None else eps_1st,
        eps_f=cfg.eps_f if eps_f is None else eps_f,
        f0=float(problem.eval_f(problem.x0)),
        f_low=problem.f_low,
    )


def gated_noise_setup(problem, cfg, sigma_phi, eps_1st, seed=0):
    """Configure a run whose noise satisfies every hypothesis of the verifier.

    The function noise is set to the largest level admitted by the budget
    gate and the gradient error radius is tied to the true gradient norm.

    Returns
    -------
    (SolverConfig, NoiseConfig, TheoryParams)
    """
    from .noise import NoiseConfig

    base = params_for_run(problem, cfg, sigma_phi, eps_1st=eps_1st, eps_f=0.0)
    ab_p, ab_1 = alpha_bar(base), alpha_bar_restarted(base)
    if ab_p <= 0.0:
        raise ValueError("the configuration has no step-size floor (sigma_d = 0 or kappa_d = inf)")
    c_N, c_R = decrease_constants(base, ab_p, ab_1)
    if c_N is None:
        eps_f = 0.0
    else:
        eps_f = min(c_N / 8.0 * eps_1st ** (1.0 + base.p), c_R / 8.0 * eps_1st ** 2)
    params = replace(base, eps_f=eps_f)
    run_cfg = replace(cfg, eps_f=eps_f, eps_g=eps_1st)
    noise = NoiseConfig(eps_f=eps_f, eps_g=eps_1st, seed=seed, enforce_assumption4=True,
                        sigma_phi=sigma_phi, alpha_bar_p=min(ab_p, 1.0), p=base.p)
    return run_cfg, noise, params


# --------------------------------------------------------------------------
# trace verification
# --------------------------------------------------------------------------


@dataclass
class Violation:
    check: str
    k: int
    detail: str


@dataclass
class VerificationReport:
    verifiable: bool
    constants: Optional[TheoryConstants] = None
    checked_backtrack: int = 0
    checked_decrease: int = 0
    skipped_ungated: int = 0
    violations: list = field(default_factory=list)
    first_eps_index: Optional[int] = None
    budget_checked: bool = False
    budget_ok: Optional[bool] = None
    f_evals_to_eps: Optional[int] = None
    evals_ok: Optional[bool] = None
    first_tol_index: Optional[int] = None
    note: str = ""

    @property
    def passed(self) -> bool:
        if not self.verifiable:
            return False
        return not self.violations and self.budget_ok is not False and self.evals_ok is not False

    def violations_of(self, check):
        return [v for v in self.violations if v.check == check]

    def to_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def lines(self):
        if not self.verifiable:
            return [f"not verifiable: {self.note}"]
        c = self.constants
        out = [
            f"alpha_bar_p={c.alpha_bar_p:.6g} alpha_bar_1={c.alpha_bar_1:.6g} "
            f"c_N={c.c_N} c_R={c.c_R:.6g} eps={c.eps:.6g} K_eps={c.K_eps} "
            f"eval_bound={c.eval_bound} noise_gate_ok={c.noise_gate_ok}",
            f"backtrack checks: {self.checked_backtrack}, decrease checks: {self.checked_decrease}, "
            f"ungated iterations skipped: {self.skipped_ungated}",
        ]
        for check in ("backtrack", "decrease", "budget", "evals"):
            bad = self.violations_of(check)
            ks = ", ".join(str(v.k) for v in bad[:20])
            out.append(f"{check}: {'FAIL at k=' + ks if bad else 'ok'}")
        out.append(
            f"first eps-stationary iterate: {self.first_eps_index}; "
            f"first iterate at requested tolerance: {self.first_tol_index}"
        )
        out.append("PASS" if self.passed else "FAIL")
        return out


def _gate(gn, e1, s, ab, expo):
    """True-gradient gate ``min(gn, gn^expo) >= e1 / (s * ab)`` (strict positivity when e1 = 0)."""
    if gn <= 0.0:
        return False
    if e1 == 0.0:
        return True
    if s == 0.0 or ab == 0.0:
        return False
    return min(gn, gn ** expo) >= e1 / (s * ab)


def verify_trace(result, params: Optional[TheoryParams], tol=None) -> VerificationReport:
    """Check a run against the per-iteration and global guarantees.

    For each iteration whose true gradient passes the matching gate, checks
    that the backtrack count respects the step-size floor and that the true
    decrease exceeds the guaranteed amount.  Iterations with ``d_k = -g_k``
    use the steepest-descent constants, the others the general ones.  If the
    noise level satisfies the budget gate, also checks that an
    ``eps``-stationary iterate appears within ``K_eps`` iterations and that
    the function evaluations spent up to it stay below the evaluation bound.

    ``tol`` optionally reports the first iterate with ``||grad|| <= tol``.
    """
    if params is None:
        return VerificationReport(verifiable=False, note="Lipschitz constant or lower bound unknown")
    c = compute_constants(params)
    rep = VerificationReport(verifiable=True, constants=c)
    e1, s, p, ef = params.eps_1st, params.sigma_phi, params.p, params.eps_f

    thr_R = c.c_R * e1 ** 2 - 4.0 * ef
    if c.c_N is None:
        thr_N = -4.0 * ef if e1 == 0.0 else None
    else:
        thr_N = c.c_N * e1 ** (1.0 + p) - 4.0 * ef
    bound_R = backtrack_bound(c.alpha_bar_1, params.theta)
    bound_N = backtrack_bound(c.alpha_bar_p, params.theta) if c.alpha_bar_p > 0 else math.inf

    grad_norms = [r.true_grad_norm for r in result.trace] + [result.final_true_grad_norm]

    for r in result.trace:
        restarted_iter = r.neg_grad_dir
        if restarted_iter:
            gated = _gate(r.true_grad_norm, e1, s, c.alpha_bar_1, 1.0)
            bound, thr, label = bound_R, thr_R, "R"
        else:
            gated = _gate(r.true_grad_norm, e1, s, c.alpha_bar_p, (1.0 + p) / 2.0)
            bound, thr, label = bound_N, thr_N, "N"
        if not gated:
            rep.skipped_ungated += 1
            continue
        if bound != math.inf:
            rep.checked_backtrack += 1
            if r.j > bound:
                rep.violations.append(Violation("backtrack", r.k, f"{label}: j={r.j} > {bound}"))
        if thr is not None:
            rep.checked_decrease += 1
            dec = r.f_true - r.f_true_next
            if not dec > thr:
                rep.violations.append(Violation("decrease", r.k, f"{label}: {dec!r} <= {thr!r}"))

    rep.first_eps_index = next((k for k, gn in enumerate(grad_norms) if gn <= c.eps), None)
    if tol is not None:
        rep.first_tol_index = next((k for k, gn in enumerate(grad_norms) if gn <= tol), None)

    if c.noise_gate_ok and c.K_eps != math.inf:
        rep.budget_checked = True
        if rep.first_eps_index is None:
            # never reached: only a violation if the run outlived the budget
            rep.budget_ok = len(grad_norms) - 1 <= c.K_eps
        else:
            rep.budget_ok = rep.first_eps_index <= c.K_eps
            k_hat = rep.first_eps_index
            rep.f_evals_to_eps = 0 if k_hat == 0 else result.trace[k_hat - 1].f_evals_so_far
            rep.evals_ok = rep.f_evals_to_eps <= c.eval_bound
            if not rep.evals_ok:
                rep.violations.append(Violation(
                    "evals", k_hat, f"{rep.f_evals_to_eps} > {c.eval_bound}"))
        if not rep.budget_ok:
            rep.violations.append(Violation(
                "budget", rep.first_eps_index if rep.first_eps_index is not None else -1,
                f"eps-stationary iterate index exceeds K_eps={c.K_eps}"))
    return rep
