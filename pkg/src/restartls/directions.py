"""Search-direction engines: steepest descent, PRP+ conjugate gradient, L-BFGS."""
from __future__ import annotations

from collections import deque

import numpy as np

__all__ = [
    "GD",
    "NLCG_PRP_PLUS",
    "LBFGS",
    "KINDS",
    "DirectionEngine",
    "make_engine",
    "prp_plus_beta",
    "two_loop",
    "dense_inverse_hessian",
]

GD = "GD"
NLCG_PRP_PLUS = "NLCG_PRP_PLUS"
LBFGS = "LBFGS"
KINDS = (GD, NLCG_PRP_PLUS, LBFGS)


def prp_plus_beta(g_new, g_old) -> float:
    """Polak-Ribiere-Polyak coefficient truncated at zero."""
    den = float(np.dot(g_old, g_old))
    if den == 0.0:
        return 0.0
    return max(0.0, float(np.dot(g_new, g_new - g_old)) / den)


def two_loop(g, pairs, gamma=None):
    """Return ``H g`` for the L-BFGS matrix built from ``pairs`` (oldest first).

    ``gamma`` scales the initial matrix ``gamma * I``; by default it is
    ``s^T y / y^T y`` of the newest pair, or 1 with no pairs.
    """
    q = np.array(g, dtype=float)
    if not pairs:
        return q if gamma is None else gamma * q
    if gamma is None:
        s, y = pairs[-1]
        gamma = float(np.dot(s, y)) / float(np.dot(y, y))
    rhos = [1.0 / float(np.dot(s, y)) for s, y in pairs]
    alphas = [0.0] * len(pairs)
    for i in range(len(pairs) - 1, -1, -1):
        s, y = pairs[i]
        alphas[i] = rhos[i] * float(np.dot(s, q))
        q -= alphas[i] * y
    r = gamma * q
    for i, (s, y) in enumerate(pairs):
        b = rhos[i] * float(np.dot(y, r))
        r += (alphas[i] - b) * s
    return r


def dense_inverse_hessian(n, pairs, gamma=None):
    """Explicit BFGS inverse-Hessian product recursion, for checking :func:`two_loop`."""
    if gamma is None:
        if pairs:
            s, y = pairs[-1]
            gamma = float(s @ y) / float(y @ y)
        else:
            gamma = 1.0
    H = gamma * np.eye(n)
    eye = np.eye(n)
    for s, y in pairs:
        rho = 1.0 / float(s @ y)
        V = eye - rho * np.outer(y, s)
        H = V.T @ H @ V + rho * np.outer(s, s)
    return H


class DirectionEngine:
    """Stateful producer of search directions from gradient estimates.

    Parameters
    ----------
    kind : {"GD", "NLCG_PRP_PLUS", "LBFGS"}
    memory : int
        Number of curvature pairs kept by L-BFGS.
    eps_sy : float
        Cautious-storage threshold: a pair is stored only if
        ``s^T y >= eps_sy ||s|| ||y||``.
    keep_memory : bool
        Whether L-BFGS keeps its pairs across a framework restart.
    beta_override : float, optional
        Replace the PRP+ coefficient by a constant (0 reduces NLCG to GD).
    """

    def __init__(self, kind=GD, memory=10, eps_sy=1e-4, keep_memory=True, beta_override=None):
        if kind not in KINDS:
            raise ValueError(f"unknown direction kind {kind!r}")
        if memory < 1:
            raise ValueError("memory must be positive")
        self.kind = kind
        self.memory = memory
        self.eps_sy = eps_sy
        self.keep_memory = keep_memory
        self.beta_override = beta_override
        self.d_prev = None
        self.g_prev = None
        self.pairs = deque(maxlen=memory)
        self.n_skipped = 0

    def propose(self, g_new):
        if self.kind == GD:
            return -g_new
        if self.kind == NLCG_PRP_PLUS:
            if self.d_prev is None:
                return -g_new
            if self.beta_override is not None:
                beta = self.beta_override
            else:
                beta = prp_plus_beta(g_new, self.g_prev)
            if beta == 0.0:
                return -g_new
            return -g_new + beta * self.d_prev
        return -two_loop(g_new, list(self.pairs))

    def update_state(self, x_old, x_new, g_old, g_new, d_taken=None, restarted=False):
        """Absorb the step just taken (called before proposing the next direction).

        NLCG keeps the direction used for the step and the gradient at its
        origin.  L-BFGS stores ``(s, y)`` when the cautious test passes.
        ``restarted`` tells whether ``d_taken`` came from a framework restart;
        it does not change the update.
        """
        if self.kind == NLCG_PRP_PLUS:
            self.d_prev = None if d_taken is None else np.array(d_taken, dtype=float)
            self.g_prev = np.array(g_old, dtype=float)
        elif self.kind == LBFGS:
            s = np.asarray(x_new, dtype=float) - x_old
            y = np.asarray(g_new, dtype=float) - g_old
            sn = float(np.linalg.norm(s))
            yn = float(np.linalg.norm(y))
            sy = float(np.dot(s, y))
            if sn > 0.0 and yn > 0.0 and sy >= self.eps_sy * sn * yn:
                self.pairs.append((s, y))
            else:
                self.n_skipped += 1

    def reset_on_restart(self):
        if self.kind == NLCG_PRP_PLUS:
            self.d_prev = None
            self.g_prev = None
        elif self.kind == LBFGS and not self.keep_memory:
            self.pairs.clear()


def make_engine(kind, **kwargs) -> DirectionEngine:
    return DirectionEngine(kind, **kwargs)
