"""Mean percentage of restarted iterations over a (p, kappa_d) grid."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .methods import _DISPLAY, _fmt_num

__all__ = ["RestartTable", "restart_table", "best_cells"]


@dataclass(frozen=True)
class RestartTable:
    family: str
    eps_f: float
    p_grid: tuple
    kappa_grid: tuple
    cells: dict  # (p, kappa) -> mean percent, or None when no kept run exists

    @property
    def minimum(self):
        filled = [(v, k) for k, v in self.cells.items() if v is not None]
        if not filled:
            return None
        return min(filled, key=lambda t: (t[0], t[1]))[1]

    @property
    def missing(self):
        return [k for k, v in self.cells.items() if v is None]

    def get(self, p, kappa):
        return self.cells.get((p, kappa))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p"] + [_fmt_num(k) for k in self.kappa_grid])
        for p in self.p_grid:
            w.writerow([f"{p:g}"] + ["" if self.cells[(p, k)] is None else f"{self.cells[(p, k)]:.6f}"
                                      for k in self.kappa_grid])
        return buf.getvalue()

    def to_markdown(self) -> str:
        best = self.minimum
        title = f"{_DISPLAY.get(self.family, self.family)}: % restarted iterations, eps_f={self.eps_f:g}"
        head = "| p \\ kappa_d | " + " | ".join(_fmt_num(k) for k in self.kappa_grid) + " |"
        lines = [title, "", head, "|---" * (len(self.kappa_grid) + 1) + "|"]
        for p in self.p_grid:
            row = []
            for k in self.kappa_grid:
                v = self.cells[(p, k)]
                if v is None:
                    row.append("n/a")
                elif (p, k) == best:
                    row.append(f"**{v:.2f}**")
                else:
                    row.append(f"{v:.2f}")
            lines.append(f"| {p:g} | " + " | ".join(row) + " |")
        if self.missing:
            lines.append("")
            lines.append("missing cells: " + ", ".join(f"(p={p:g}, k={_fmt_num(k)})" for p, k in self.missing))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text, family="", eps_f=math.nan):
        rows = list(csv.reader(io.StringIO(text)))
        kappas = tuple(float(k) for k in rows[0][1:])
        ps, cells = [], {}
        for row in rows[1:]:
            p = float(row[0])
            ps.append(p)
            for k, v in zip(kappas, row[1:]):
                cells[(p, k)] = None if v == "" else float(v)
        return cls(family, eps_f, tuple(ps), kappas, cells)


def restart_table(summaries, family, eps_f, p_grid=None, kappa_grid=None) -> RestartTable:
    """Average the per-run restart percentage of ``family`` at noise level ``eps_f``.

    Discarded runs are excluded.  Without explicit grids the table spans the
    (p, kappa_d) pairs present in ``summaries``.
    """
    groups = {}
    for s in summaries:
        if s.family != family or s.eps_f != eps_f or s.discarded:
            continue
        groups.setdefault((s.p, s.kappa_d), []).append(100.0 * s.restart_fraction)
    if p_grid is None:
        p_grid = sorted({k[0] for k in groups})
    if kappa_grid is None:
        kappa_grid = sorted({k[1] for k in groups})
    cells = {}
    for p in p_grid:
        for k in kappa_grid:
            vals = groups.get((float(p), float(k)))
            cells[(float(p), float(k))] = float(np.mean(vals)) if vals else None
    return RestartTable(family, float(eps_f), tuple(float(p) for p in p_grid),
                        tuple(float(k) for k in kappa_grid), cells)


def best_cells(tables):
    """Minimum-restart ``(p, kappa_d)`` per table, keyed by (family, eps_f)."""
    return {(t.family, t.eps_f): t.minimum for t in tables}
