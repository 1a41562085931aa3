"""Named method configurations used by the experiments."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from ..directions import GD, LBFGS, NLCG_PRP_PLUS
from ..solver import SolverConfig

__all__ = ["MethodSpec", "parse_method", "parse_methods", "DEFAULT_METHODS", "grid_methods"]

_KINDS = {"gd": GD, "nlcg": NLCG_PRP_PLUS, "lbfgs": LBFGS, "nlcgr": NLCG_PRP_PLUS, "lbfgsr": LBFGS}
_DISPLAY = {"gd": "GD", "nlcg": "NLCG", "lbfgs": "LBFGS", "nlcgr": "NLCGr", "lbfgsr": "LBFGSr"}


def _fmt_num(v):
    if v == math.inf:
        return "inf"
    if v >= 100 and math.log10(v).is_integer():
        return f"1e{int(math.log10(v))}"
    return f"{v:g}"


@dataclass(frozen=True)
class MethodSpec:
    """One of GD, NLCG, LBFGS, NLCGr, LBFGSr with its restart parameters.

    Restarted variants use ``sigma_d = 1 / kappa_d``.
    """

    family: str
    sigma_d: float
    kappa_d: float
    p: float

    @property
    def kind(self) -> str:
        return _KINDS[self.family]

    @property
    def restarted(self) -> bool:
        return self.family in ("nlcgr", "lbfgsr")

    @property
    def label(self) -> str:
        name = _DISPLAY[self.family]
        if self.restarted:
            return f"{name}(p={_fmt_num(self.p)},k={_fmt_num(self.kappa_d)})"
        return name

    def config(self, **overrides) -> SolverConfig:
        cfg = SolverConfig(method=self.kind, sigma_d=self.sigma_d, kappa_d=self.kappa_d, p=self.p)
        return replace(cfg, **overrides) if overrides else cfg

    @classmethod
    def make(cls, family, p=0.75, kappa=1e6):
        family = family.lower()
        if family == "gd":
            return cls("gd", 1.0, 1.0, 1.0)
        if family in ("nlcg", "lbfgs"):
            return cls(family, 0.0, math.inf, 1.0)
        if family in ("nlcgr", "lbfgsr"):
            kappa = float(kappa)
            if not kappa >= 1.0 or kappa == math.inf:
                raise ValueError("restarted variants need a finite kappa >= 1")
            return cls(family, 1.0 / kappa, kappa, float(p))
        raise ValueError(f"unknown method {family!r}; use gd, nlcg, lbfgs, nlcgr or lbfgsr")


def parse_method(text, p=0.75, kappa=1e6) -> MethodSpec:
    """Parse ``gd``, ``nlcg``, ``lbfgs``, ``nlcgr`` or ``lbfgsr[:p[:kappa]]``."""
    parts = text.strip().split(":")
    if len(parts) > 1:
        p = float(parts[1])
    if len(parts) > 2:
        kappa = float(parts[2])
    return MethodSpec.make(parts[0], p=p, kappa=kappa)


def parse_methods(text, p=0.75, kappa=1e6):
    return [parse_method(t, p, kappa) for t in text.split(",") if t.strip()]


DEFAULT_METHODS = tuple(parse_methods("gd,nlcg,lbfgs,nlcgr,lbfgsr"))


def grid_methods(p_grid, kappa_grid, families=("nlcgr", "lbfgsr")):
    return [MethodSpec.make(f, p=p, kappa=k) for f in families for p in p_grid for k in kappa_grid]
