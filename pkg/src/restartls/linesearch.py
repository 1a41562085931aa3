"""Noise-relaxed backtracking Armijo search."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["LineSearchParams", "LineSearchResult", "backtrack", "backtrack_bound"]


@dataclass(frozen=True)
class LineSearchParams:
    eta: float = 0.5
    theta: float = 0.5
    eps_f: float = 0.0
    j_max: int = 50

    def __post_init__(self):
        if not 0.0 < self.eta <= 0.5:
            raise ValueError("eta must lie in (0, 1/2]")
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie in (0, 1)")
        if self.eps_f < 0:
            raise ValueError("eps_f must be nonnegative")
        if self.j_max < 1:
            raise ValueError("j_max must be at least 1")


@dataclass(frozen=True)
class LineSearchResult:
    alpha: float
    j: int
    f_at_x: float
    f_at_trial: float
    n_trials: int
    capped: bool
    x_trial: np.ndarray


def backtrack(oracle, x, d, g, params: LineSearchParams) -> LineSearchResult:
    """Find the smallest ``j`` with

        f(x + theta^j d) < f(x) + eta theta^j g^T d + 2 eps_f

    ``f(x)`` is sampled once and reused for every trial; each trial point gets
    its own sample.  Non-finite trial values count as rejections.  If no
    ``j <= j_max`` is accepted the last trial is returned with ``capped=True``.
    """
    f_x = oracle.f(x)
    gtd = float(np.dot(g, d))
    slack = 2.0 * params.eps_f
    theta = params.theta
    f_trial = math.nan
    x_trial = x
    for j in range(params.j_max + 1):
        alpha = theta ** j
        x_trial = x + alpha * d
        f_trial = oracle.f(x_trial)
        if math.isfinite(f_trial) and f_trial < f_x + params.eta * alpha * gtd + slack:
            return LineSearchResult(alpha, j, f_x, f_trial, j + 1, False, x_trial)
    j = params.j_max
    return LineSearchResult(theta ** j, j, f_x, f_trial, j + 1, True, x_trial)


def backtrack_bound(alpha_bar, theta) -> int:
    """Largest backtrack count admissible when every rejected step is >= ``alpha_bar``.

    Equals ``floor([log_theta(alpha_bar)]_+ + 1)``; the floor is computed
    against ``theta**j`` directly so exact powers of ``theta`` are not
    misrounded.
    """
    if not alpha_bar > 0 or not 0.0 < theta < 1.0:
        raise ValueError("need alpha_bar > 0 and theta in (0, 1)")
    if alpha_bar >= 1.0:
        return 1
    j = int(math.floor(math.log(alpha_bar) / math.log(theta)))
    while theta ** (j + 1) >= alpha_bar:
        j += 1
    while j > 0 and theta ** j < alpha_bar:
        j -= 1
    return j + 1
