"""Seeded bounded-noise oracles for function values and gradients."""
from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass

import numpy as np

__all__ = ["NoiseConfig", "NoisyOracle", "sanity_bounds", "derive_seed", "ball_sample"]


@dataclass(frozen=True)
class NoiseConfig:
    """Noise levels and seeding for a :class:`NoisyOracle`.

    ``sigma_phi``, ``alpha_bar_p`` and ``p`` are only read when
    ``enforce_assumption4`` is set; the gradient error radius then shrinks
    with the true gradient norm instead of staying at ``eps_g``.
    """

    eps_f: float = 0.0
    eps_g: float = 0.0
    seed: int = 0
    enforce_assumption4: bool = False
    sigma_phi: float = 0.0
    alpha_bar_p: float = 1.0
    p: float = 1.0

    def __post_init__(self):
        if self.eps_f < 0 or self.eps_g < 0:
            raise ValueError("noise levels must be nonnegative")
        if not 0.0 <= self.sigma_phi < 1.0:
            raise ValueError("sigma_phi must lie in [0, 1)")
        if not 0.0 < self.alpha_bar_p <= 1.0:
            raise ValueError("alpha_bar_p must lie in (0, 1]")
        if self.p < 0:
            raise ValueError("p must be nonnegative")

    @classmethod
    def from_level(cls, eps_f, seed=0):
        """Benchmark convention: gradient noise level is sqrt(eps_f)."""
        return cls(eps_f=eps_f, eps_g=float(np.sqrt(eps_f)), seed=seed)

    def to_dict(self):
        return asdict(self)


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary printable key parts."""
    key = "\x1f".join(repr(p) for p in parts).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def ball_sample(rng, n, radius):
    """Uniform draw from the closed Euclidean ball of the given radius in R^n."""
    if radius == 0.0:
        return np.zeros(n)
    u = rng.standard_normal(n)
    nrm = np.linalg.norm(u)
    while nrm == 0.0:
        u = rng.standard_normal(n)
        nrm = np.linalg.norm(u)
    e = u * (radius * rng.random() ** (1.0 / n) / nrm)
    # rounding in the product can push the norm one ulp past the radius
    while np.linalg.norm(e) > radius:
        e *= 1.0 - 2.0 ** -50
    return e


class NoisyOracle:
    """Function and gradient estimates of a (scaled) problem.

    Each call draws fresh noise, including repeated calls at the same point.
    The true values are available through :meth:`true_f` and
    :meth:`true_grad` (or ``last_true_f``/``last_true_grad`` for the most
    recent estimate); those are measurement only and are not counted.
    """

    def __init__(self, problem, cfg: NoiseConfig):
        self.problem = problem
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.n_f_evals = 0
        self.n_g_evals = 0
        self.last_true_f = None
        self.last_true_grad = None

    def true_f(self, x) -> float:
        return float(self.problem.eval_f(x))

    def true_grad(self, x) -> np.ndarray:
        return np.asarray(self.problem.eval_grad(x), dtype=float)

    def f(self, x) -> float:
        self.n_f_evals += 1
        val = self.true_f(x)
        self.last_true_f = val
        eps = self.cfg.eps_f
        if eps == 0.0:
            return val
        return val + eps * (2.0 * self.rng.random() - 1.0)

    def grad_radius(self, true_grad) -> float:
        cfg = self.cfg
        if not cfg.enforce_assumption4:
            return cfg.eps_g
        gn = float(np.linalg.norm(true_grad))
        shrink = cfg.sigma_phi * cfg.alpha_bar_p * min(gn, gn ** ((1.0 + cfg.p) / 2.0))
        return max(cfg.eps_g, shrink)

    def grad(self, x) -> np.ndarray:
        self.n_g_evals += 1
        gt = self.true_grad(x)
        self.last_true_grad = gt
        r = self.grad_radius(gt)
        if r == 0.0:
            return gt
        return gt + ball_sample(self.rng, gt.size, r)

    # functional aliases
    def noisy_f(self, x):
        return self.f(x)

    def noisy_grad(self, x):
        return self.grad(x)


def sanity_bounds(g, true_grad, sigma_phi) -> bool:
    """Check (1 - sigma_phi) ||grad|| <= ||g|| <= (1 + sigma_phi) ||grad||."""
    gn = float(np.linalg.norm(g))
    tn = float(np.linalg.norm(true_grad))
    return (1.0 - sigma_phi) * tn <= gn <= (1.0 + sigma_phi) * tn
