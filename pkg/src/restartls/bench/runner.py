"""Sweep methods x problems x noise levels x replicates."""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

from ..noise import NoiseConfig, derive_seed
from ..solver import SPURIOUS_INITIAL_STOP, run
from ..testbed import get_problem, problem_names, scale
from .methods import DEFAULT_METHODS, MethodSpec, grid_methods, parse_method

__all__ = [
    "DEFAULT_NOISE_LEVELS",
    "DEFAULT_P_GRID",
    "DEFAULT_KAPPA_GRID",
    "ExperimentPlan",
    "RunSummary",
    "CostMatrix",
    "run_one",
    "run_plan",
    "discard_stats",
]

DEFAULT_NOISE_LEVELS = (0.0, 1e-8, 1e-4, 1e-2, 1e-1)
DEFAULT_P_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
DEFAULT_KAPPA_GRID = (1e2, 1e3, 1e4, 1e5, 1e6)


@dataclass
class ExperimentPlan:
    problems: list = field(default_factory=problem_names)
    methods: list = field(default_factory=lambda: list(DEFAULT_METHODS))
    noise_levels: list = field(default_factory=lambda: list(DEFAULT_NOISE_LEVELS))
    replicates: int = 3
    master_seed: int = 0
    output_dir: Optional[str] = None
    p_grid: list = field(default_factory=list)
    kappa_grid: list = field(default_factory=list)
    max_iter: int = 1000

    def validate(self):
        known = set(problem_names())
        unknown = [p for p in self.problems if p not in known]
        if unknown:
            raise ValueError(f"unknown problems: {', '.join(unknown)}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if any(not e >= 0 for e in self.noise_levels):
            raise ValueError("noise levels must be nonnegative")
        for m in self.methods:
            if not isinstance(m, MethodSpec):
                raise ValueError(f"not a method spec: {m!r}")

    def all_methods(self):
        """Comparison methods followed by the restart grid, without duplicates."""
        out, seen = [], set()
        for m in list(self.methods) + grid_methods(self.p_grid, self.kappa_grid):
            if m.label not in seen:
                seen.add(m.label)
                out.append(m)
        return out

    def to_dict(self):
        return {
            "problems": list(self.problems),
            "methods": [_method_to_text(m) for m in self.methods],
            "noise_levels": [float(e) for e in self.noise_levels],
            "replicates": self.replicates,
            "master_seed": self.master_seed,
            "output_dir": self.output_dir,
            "p_grid": [float(v) for v in self.p_grid],
            "kappa_grid": [float(v) for v in self.kappa_grid],
            "max_iter": self.max_iter,
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "methods" in d:
            d["methods"] = [parse_method(m) if isinstance(m, str) else m for m in d["methods"]]
        return cls(**d)

    @classmethod
    def from_json_file(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _method_to_text(m: MethodSpec) -> str:
    if m.restarted:
        return f"{m.family}:{m.p!r}:{m.kappa_d!r}"
    return m.family


@dataclass(frozen=True)
class RunSummary:
    problem: str
    dim: int
    method: str
    family: str
    p: float
    kappa_d: float
    sigma_d: float
    eps_f: float
    replicate: int
    seed: int
    status: str
    iterations: int
    cost: Optional[int]
    restart_fraction: float
    n_f_evals: int
    n_g_evals: int
    final_grad_inf: float

    @property
    def key(self):
        return (self.problem, self.method, self.eps_f, self.replicate)

    @property
    def discarded(self) -> bool:
        return self.status == SPURIOUS_INITIAL_STOP


@dataclass
class CostMatrix:
    """Gradient-evaluation cost per run key; ``None`` marks an unsolved run."""

    entries: dict = field(default_factory=dict)
    dims: dict = field(default_factory=dict)
    discards: set = field(default_factory=set)

    def methods(self):
        return sorted({k[1] for k in self.entries} | {k[1] for k in self.discards})

    def noise_levels(self):
        return sorted({k[2] for k in self.entries} | {k[2] for k in self.discards})

    def problems(self):
        return sorted(self.dims)

    def costs(self, problem, method, eps_f):
        """Costs of the kept replicates, ``math.inf`` for unsolved."""
        out = []
        for (pb, m, e, _rep), c in sorted(self.entries.items(), key=lambda kv: kv[0][3]):
            if pb == problem and m == method and e == eps_f:
                out.append(math.inf if c is None else float(c))
        return out

    @classmethod
    def from_summaries(cls, summaries):
        cm = cls()
        for s in summaries:
            cm.dims[s.problem] = s.dim
            if s.discarded:
                cm.discards.add(s.key)
            else:
                if s.key in cm.entries:
                    raise ValueError(f"duplicate run key {s.key}")
                cm.entries[s.key] = s.cost
        return cm


def run_one(problem_name, method: MethodSpec, eps_f, replicate, master_seed, max_iter=1000) -> RunSummary:
    seed = derive_seed(problem_name, method.label, float(eps_f), int(replicate), int(master_seed))
    sp = scale(get_problem(problem_name))
    eps_g = math.sqrt(eps_f)
    cfg = method.config(eps_f=float(eps_f), eps_g=eps_g, max_iter=max_iter)
    res = run(sp, cfg, noise=NoiseConfig(eps_f=float(eps_f), eps_g=eps_g, seed=seed))
    return RunSummary(
        problem=problem_name,
        dim=sp.dim,
        method=method.label,
        family=method.family,
        p=method.p,
        kappa_d=method.kappa_d,
        sigma_d=method.sigma_d,
        eps_f=float(eps_f),
        replicate=int(replicate),
        seed=seed,
        status=res.status,
        iterations=res.iterations,
        cost=res.cost,
        restart_fraction=res.restart_fraction,
        n_f_evals=res.n_f_evals,
        n_g_evals=res.n_g_evals,
        final_grad_inf=res.final_true_grad_norm_inf,
    )


def _run_task(task):
    return run_one(*task)


def run_plan(plan: ExperimentPlan, workers=1, progress=None):
    """Execute every run of ``plan``.

    Returns ``(summaries, cost_matrix)``; summaries are sorted by run key, so
    the outcome does not depend on ``workers``.
    """
    plan.validate()
    tasks = [
        (pb, m, float(e), r, plan.master_seed, plan.max_iter)
        for e in plan.noise_levels
        for m in plan.all_methods()
        for pb in plan.problems
        for r in range(plan.replicates)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_task, tasks, chunksize=8))
    else:
        results = []
        for i, t in enumerate(tasks):
            results.append(_run_task(t))
            if progress is not None:
                progress(i + 1, len(tasks))
    results.sort(key=lambda s: (s.eps_f, s.method, s.problem, s.replicate))
    return results, CostMatrix.from_summaries(results)


def discard_stats(summaries):
    """Per noise level: total runs, discarded runs and their percentage."""
    out = {}
    for s in summaries:
        d = out.setdefault(s.eps_f, {"runs": 0, "discarded": 0})
        d["runs"] += 1
        d["discarded"] += int(s.discarded)
    for d in out.values():
        d["percent"] = 100.0 * d["discarded"] / d["runs"] if d["runs"] else 0.0
    return dict(sorted(out.items()))


def summary_to_row(s: RunSummary):
    d = asdict(s)
    d["discarded"] = int(s.discarded)
    return d
