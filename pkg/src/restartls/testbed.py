"""Desk-scale unconstrained test problems with analytic gradients.

Every problem exposes ``eval_f``/``eval_grad`` on 1-D float arrays, a default
starting point, and (when known in closed form) a global Lipschitz constant of
the gradient and a lower bound on the objective.  Problems are immutable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Problem",
    "ScaledProblem",
    "registry",
    "get_problem",
    "problem_names",
    "scale",
    "fd_gradient",
    "gradient_check",
]


@dataclass(frozen=True)
class Problem:
    name: str
    dim: int
    eval_f: Callable[[np.ndarray], float] = field(repr=False)
    eval_grad: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    x0: np.ndarray = field(repr=False)
    lipschitz_L: Optional[float] = None
    f_low: Optional[float] = None

    def __post_init__(self):
        x0 = np.array(self.x0, dtype=float)
        if x0.shape != (self.dim,):
            raise ValueError(f"{self.name}: x0 has shape {x0.shape}, expected ({self.dim},)")
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)


@dataclass(frozen=True)
class ScaledProblem:
    """A problem whose objective and gradient are divided by ``factor``.

    ``factor = max(1, ||grad(x0)||_inf)`` so that the scaled gradient at the
    starting point has unit infinity norm at most.
    """

    base: Problem
    factor: float

    @property
    def name(self) -> str:
        return self.base.name

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def x0(self) -> np.ndarray:
        return self.base.x0

    @property
    def lipschitz_L(self) -> Optional[float]:
        if self.base.lipschitz_L is None:
            return None
        return self.base.lipschitz_L / self.factor

    @property
    def f_low(self) -> Optional[float]:
        if self.base.f_low is None:
            return None
        return self.base.f_low / self.factor

    def eval_f(self, x):
        return self.base.eval_f(x) / self.factor

    def eval_grad(self, x):
        return self.base.eval_grad(x) / self.factor

    def as_problem(self) -> Problem:
        """Flatten into a plain :class:`Problem` (so it can be scaled again)."""
        return Problem(
            name=self.name,
            dim=self.dim,
            eval_f=self.eval_f,
            eval_grad=self.eval_grad,
            x0=self.x0,
            lipschitz_L=self.lipschitz_L,
            f_low=self.f_low,
        )


def scale(problem: Problem) -> ScaledProblem:
    g0 = np.asarray(problem.eval_grad(problem.x0), dtype=float)
    if not np.all(np.isfinite(g0)):
        raise ValueError(f"{problem.name}: gradient at x0 is not finite")
    factor = max(1.0, float(np.max(np.abs(g0))) if g0.size else 0.0)
    return ScaledProblem(base=problem, factor=factor)


# --------------------------------------------------------------------------
# Problem definitions.  Objectives whose minimum value is zero are written as
# sums of squares (or equivalent stable forms) so that they keep full relative
# accuracy near the minimizer.
# --------------------------------------------------------------------------


def _diag_quadratic(name, weights, x0, center=None):
    w = np.asarray(weights, dtype=float)
    c = np.zeros_like(w) if center is None else np.asarray(center, dtype=float)

    def f(x):
        r = x - c
        return 0.5 * float(np.dot(w * r, r))

    def g(x):
        return w * (x - c)

    return Problem(name, w.size, f, g, x0, lipschitz_L=float(w.max()), f_low=0.0)


def _tridiag_quadratic(n):
    # 0.5 (x - c)^T A (x - c) with A = tridiag(-1, 2, -1); spectrum lies in (0, 4)
    c = np.linspace(-1.0, 1.0, n)

    def f(x):
        r = x - c
        return 0.5 * (r[0] ** 2 + r[-1] ** 2 + float(np.sum(np.diff(r) ** 2)))

    def g(x):
        r = x - c
        out = 2.0 * r
        out[1:] -= r[:-1]
        out[:-1] -= r[1:]
        return out

    return Problem(f"tridiag{n}", n, f, g, np.zeros(n), lipschitz_L=4.0, f_low=0.0)


def _cosine(n):
    # sum 1 - cos(x_i), written as 2 sin^2(x_i / 2); nonconvex, Hessian bounded by 1
    def f(x):
        return 2.0 * float(np.sum(np.sin(0.5 * x) ** 2))

    def g(x):
        return np.sin(x)

    x0 = np.linspace(0.5, 3.0, n)
    return Problem(f"cosine{n}", n, f, g, x0, lipschitz_L=1.0, f_low=0.0)


def _pseudo_huber(n):
    c = np.linspace(-2.0, 2.0, n)

    def f(x):
        r = x - c
        # sqrt(1 + r^2) - 1 without cancellation
        return float(np.sum(r * r / (np.sqrt(1.0 + r * r) + 1.0)))

    def g(x):
        r = x - c
        return r / np.sqrt(1.0 + r * r)

    return Problem(f"huber{n}", n, f, g, np.full(n, 10.0), lipschitz_L=1.0, f_low=0.0)


def _logistic(n, m=100, lam=1e-2):
    rng = np.random.default_rng(20240611)
    A = rng.standard_normal((m, n))
    b = np.where(rng.standard_normal(m) + A @ np.linspace(1.0, -1.0, n) > 0, 1.0, -1.0)
    BA = b[:, None] * A
    lip = float(np.linalg.norm(A, 2) ** 2 / (4.0 * m) + lam)

    def f(x):
        z = -(BA @ x)
        return float(np.mean(np.logaddexp(0.0, z))) + 0.5 * lam * float(x @ x)

    def g(x):
        z = -(BA @ x)
        s = 0.5 * (1.0 + np.tanh(0.5 * z))  # sigmoid(z), overflow-free
        return -(BA.T @ s) / m + lam * x

    return Problem(f"logistic{n}", n, f, g, np.ones(n), lipschitz_L=lip, f_low=0.0)


def _rosenbrock(n):
    def f(x):
        return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))

    def g(x):
        out = np.zeros_like(x)
        t = x[1:] - x[:-1] ** 2
        out[:-1] = -400.0 * x[:-1] * t - 2.0 * (1.0 - x[:-1])
        out[1:] += 200.0 * t
        return out

    x0 = np.ones(n)
    x0[::2] = -1.2
    name = "rosenbrock2" if n == 2 else f"chainrosen{n}"
    return Problem(name, n, f, g, x0, f_low=0.0)


def _ext_rosenbrock(n):
    # decoupled pairs (x_{2i-1}, x_{2i})
    def f(x):
        a, b = x[0::2], x[1::2]
        return float(np.sum(100.0 * (b - a * a) ** 2 + (1.0 - a) ** 2))

    def g(x):
        a, b = x[0::2], x[1::2]
        t = b - a * a
        out = np.empty_like(x)
        out[0::2] = -400.0 * a * t - 2.0 * (1.0 - a)
        out[1::2] = 200.0 * t
        return out

    x0 = np.tile([-1.2, 1.0], n // 2)
    return Problem(f"extrosen{n}", n, f, g, x0, f_low=0.0)


_BEALE_Y = np.array([1.5, 2.25, 2.625])


def _beale():
    def f(x):
        i = np.arange(1, 4)
        r = _BEALE_Y - x[0] * (1.0 - x[1] ** i)
        return float(np.sum(r * r))

    def g(x):
        i = np.arange(1, 4)
        r = _BEALE_Y - x[0] * (1.0 - x[1] ** i)
        d0 = -(1.0 - x[1] ** i)
        d1 = x[0] * i * x[1] ** (i - 1)
        return np.array([2.0 * np.dot(r, d0), 2.0 * np.dot(r, d1)])

    return Problem("beale", 2, f, g, [1.0, 1.0], f_low=0.0)


def _ext_powell(n):
    def f(x):
        a, b, c, d = x[0::4], x[1::4], x[2::4], x[3::4]
        return float(np.sum((a + 10 * b) ** 2 + 5 * (c - d) ** 2 + (b - 2 * c) ** 4 + 10 * (a - d) ** 4))

    def g(x):
        a, b, c, d = x[0::4], x[1::4], x[2::4], x[3::4]
        t1, t2, t3, t4 = a + 10 * b, c - d, b - 2 * c, a - d
        out = np.empty_like(x)
        out[0::4] = 2 * t1 + 40 * t4 ** 3
        out[1::4] = 20 * t1 + 4 * t3 ** 3
        out[2::4] = 10 * t2 - 8 * t3 ** 3
        out[3::4] = -10 * t2 - 40 * t4 ** 3
        return out

    x0 = np.tile([3.0, -1.0, 0.0, 1.0], n // 4)
    name = "powell4" if n == 4 else f"extpowell{n}"
    return Problem(name, n, f, g, x0, f_low=0.0)


def _dixon_price(n):
    i = np.arange(2, n + 1)

    def f(x):
        return float((x[0] - 1.0) ** 2 + np.sum(i * (2.0 * x[1:] ** 2 - x[:-1]) ** 2))

    def g(x):
        t = 2.0 * x[1:] ** 2 - x[:-1]
        out = np.zeros_like(x)
        out[0] = 2.0 * (x[0] - 1.0)
        out[1:] += 8.0 * i * t * x[1:]
        out[:-1] -= 2.0 * i * t
        return out

    return Problem(f"dixonprice{n}", n, f, g, np.ones(n), f_low=0.0)


def _trigonometric(n):
    # More, Garbow & Hillstrom problem 26
    i = np.arange(1, n + 1)

    def residual(x):
        return n - np.sum(np.cos(x)) + i * (1.0 - np.cos(x)) - np.sin(x)

    def f(x):
        r = residual(x)
        return float(r @ r)

    def g(x):
        r = residual(x)
        # dr_i/dx_j = sin x_j + delta_ij (i sin x_i - cos x_i)
        return 2.0 * (np.sum(r) * np.sin(x) + r * (i * np.sin(x) - np.cos(x)))

    return Problem(f"trig{n}", n, f, g, np.full(n, 1.0 / n), f_low=0.0)


def _wood():
    def f(x):
        a, b, c, d = x
        return float(
            100 * (b - a * a) ** 2 + (1 - a) ** 2 + 90 * (d - c * c) ** 2 + (1 - c) ** 2
            + 10.1 * ((b - 1) ** 2 + (d - 1) ** 2) + 19.8 * (b - 1) * (d - 1)
        )

    def g(x):
        a, b, c, d = x
        return np.array([
            -400 * a * (b - a * a) - 2 * (1 - a),
            200 * (b - a * a) + 20.2 * (b - 1) + 19.8 * (d - 1),
            -360 * c * (d - c * c) - 2 * (1 - c),
            180 * (d - c * c) + 20.2 * (d - 1) + 19.8 * (b - 1),
        ])

    return Problem("wood", 4, f, g, [-3.0, -1.0, -3.0, -1.0], f_low=0.0)


def _freudenstein_roth():
    def r(x):
        a, b = x
        return np.array([-13 + a + ((5 - b) * b - 2) * b, -29 + a + ((b + 1) * b - 14) * b])

    def f(x):
        v = r(x)
        return float(v @ v)

    def g(x):
        b = x[1]
        v = r(x)
        J = np.array([[1.0, 10 * b - 3 * b * b - 2], [1.0, 3 * b * b + 2 * b - 14]])
        return 2.0 * (J.T @ v)

    return Problem("freudroth", 2, f, g, [0.5, -2.0], f_low=0.0)


def _penalty1(n, a=1e-5):
    def f(x):
        return float(a * np.sum((x - 1.0) ** 2) + (x @ x - 0.25) ** 2)

    def g(x):
        return 2 * a * (x - 1.0) + 4.0 * (x @ x - 0.25) * x

    return Problem(f"penalty{n}", n, f, g, np.arange(1, n + 1, dtype=float), f_low=0.0)


def _arwhead(n):
    # CUTEst ARWHEAD; minimum value 0 at (1, ..., 1, 0)
    def f(x):
        h = x[:-1]
        return float(np.sum(-4.0 * h + 3.0 + (h * h + x[-1] ** 2) ** 2))

    def g(x):
        h = x[:-1]
        t = h * h + x[-1] ** 2
        out = np.empty_like(x)
        out[:-1] = -4.0 + 4.0 * t * h
        out[-1] = 4.0 * x[-1] * np.sum(t)
        return out

    return Problem(f"arwhead{n}", n, f, g, np.ones(n), f_low=0.0)


def _himmelblau():
    def f(x):
        a, b = x
        return float((a * a + b - 11) ** 2 + (a + b * b - 7) ** 2)

    def g(x):
        a, b = x
        u, v = a * a + b - 11, a + b * b - 7
        return np.array([4 * a * u + 2 * v, 2 * u + 4 * b * v])

    return Problem("himmelblau", 2, f, g, [0.0, 0.0], f_low=0.0)


def _zakharov(n):
    i = np.arange(1, n + 1)

    def f(x):
        s = 0.5 * float(i @ x)
        return float(x @ x) + s ** 2 + s ** 4

    def g(x):
        s = 0.5 * float(i @ x)
        return 2.0 * x + (s + 2.0 * s ** 3) * i

    return Problem(f"zakharov{n}", n, f, g, np.full(n, 0.5), f_low=0.0)


def _build_registry():
    return [
        _diag_quadratic("quad1", [4.0], [3.0]),
        _diag_quadratic("quad10", np.ones(10), np.ones(10)),
        _diag_quadratic("quad100", np.arange(1, 101), np.zeros(100), center=np.ones(100)),
        _diag_quadratic("quad1000", np.linspace(1.0, 1e3, 1000), np.zeros(1000), center=np.ones(1000)),
        _tridiag_quadratic(50),
        _cosine(10),
        _pseudo_huber(20),
        _logistic(20),
        _rosenbrock(2),
        _rosenbrock(10),
        _ext_rosenbrock(1000),
        _beale(),
        _ext_powell(4),
        _ext_powell(100),
        _dixon_price(10),
        _trigonometric(10),
        _wood(),
        _freudenstein_roth(),
        _penalty1(10),
        _arwhead(100),
        _himmelblau(),
        _zakharov(5),
    ]


_REGISTRY = None


def registry() -> list:
    """All registered problems, in a fixed order."""
    global _REGISTRY
    if _REGISTRY is None:
        _REGISTRY = _build_registry()
    return list(_REGISTRY)


def problem_names() -> list:
    return [p.name for p in registry()]


def get_problem(name: str) -> Problem:
    for p in registry():
        if p.name == name:
            return p
    raise KeyError(f"unknown problem {name!r}; known: {', '.join(problem_names())}")


def fd_gradient(f, x, rel_step=1e-6):
    """Central-difference gradient with per-coordinate step ``rel_step * max(1, |x_i|)``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for k in range(x.size):
        h = rel_step * max(1.0, abs(x[k]))
        xp = x.copy()
        xm = x.copy()
        xp[k] += h
        xm[k] -= h
        out[k] = (f(xp) - f(xm)) / (xp[k] - xm[k])
    return out


def gradient_check(problem, x) -> float:
    """Relative error ``||g_fd - g||_inf / max(1, ||g||_inf)`` at ``x``."""
    g = np.asarray(problem.eval_grad(x), dtype=float)
    g_fd = fd_gradient(problem.eval_f, x)
    return float(np.max(np.abs(g_fd - g)) / max(1.0, float(np.max(np.abs(g)))))
