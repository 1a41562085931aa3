"""Performance profiles (cost ratios) and data profiles (cost per simplex-gradient budget)."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ProfileCurve",
    "aggregate_costs",
    "performance_profile",
    "data_profile",
    "performance_profile_from_costs",
    "data_profile_from_costs",
    "uniquely_fastest_counts",
]


@dataclass(frozen=True)
class ProfileCurve:
    """Right-continuous step function ``t -> fraction of problems with value <= t``.

    ``values`` holds one entry per problem (``inf`` when unsolved); the
    abscissae are its sorted distinct finite values.
    """

    abscissae: tuple
    ordinates: tuple
    values: tuple

    @classmethod
    def from_values(cls, values):
        vals = tuple(float(v) for v in values)
        n = len(vals)
        finite = sorted(v for v in vals if math.isfinite(v))
        xs, ys = [], []
        for i, v in enumerate(finite):
            if i + 1 < len(finite) and finite[i + 1] == v:
                continue
            xs.append(v)
            ys.append((i + 1) / n)
        return cls(tuple(xs), tuple(ys), vals)

    @property
    def n_problems(self) -> int:
        return len(self.values)

    def __call__(self, t) -> float:
        i = bisect.bisect_right(self.abscissae, t)
        return 0.0 if i == 0 else self.ordinates[i - 1]

    @property
    def terminal(self) -> float:
        return self.ordinates[-1] if self.ordinates else 0.0


def aggregate_costs(matrix, methods, eps_f):
    """Median kept-replicate cost per problem and method.

    Returns ``(problems, costs)`` with ``costs[method]`` aligned to
    ``problems``.  A problem is dropped when any method has no kept replicate
    on it.
    """
    groups = {}
    for (pb, m, e, _rep), c in matrix.entries.items():
        if e == eps_f and m in methods:
            groups.setdefault((pb, m), []).append(math.inf if c is None else float(c))
    problems = [pb for pb in matrix.problems() if all((pb, m) in groups for m in methods)]
    costs = {m: [float(np.median(groups[(pb, m)])) for pb in problems] for m in methods}
    return problems, costs


def performance_profile_from_costs(costs):
    """``costs``: method -> per-problem costs (``inf`` unsolved)."""
    methods = list(costs)
    n = len(next(iter(costs.values()))) if costs else 0
    best = [min(costs[m][i] for m in methods) for i in range(n)]
    out = {}
    for m in methods:
        ratios = []
        for i in range(n):
            c = costs[m][i]
            ratios.append(math.inf if not math.isfinite(c) or not math.isfinite(best[i]) else c / best[i])
        out[m] = ProfileCurve.from_values(ratios)
    return out


def data_profile_from_costs(costs, dims):
    return {
        m: ProfileCurve.from_values([c / (n + 1) for c, n in zip(cs, dims)])
        for m, cs in costs.items()
    }


def performance_profile(matrix, methods, eps_f):
    if len(methods) < 2:
        raise ValueError("a performance profile needs at least two methods")
    _, costs = aggregate_costs(matrix, methods, eps_f)
    return performance_profile_from_costs(costs)


def data_profile(matrix, methods, eps_f):
    problems, costs = aggregate_costs(matrix, methods, eps_f)
    return data_profile_from_costs(costs, [matrix.dims[pb] for pb in problems])


def uniquely_fastest_counts(costs):
    """Number of problems each method solves strictly faster than all others."""
    methods = list(costs)
    n = len(next(iter(costs.values()))) if costs else 0
    out = {m: 0 for m in methods}
    for i in range(n):
        col = [(costs[m][i], m) for m in methods if math.isfinite(costs[m][i])]
        if not col:
            continue
        col.sort()
        if len(col) == 1 or col[0][0] < col[1][0]:
            out[col[0][1]] += 1
    return out
