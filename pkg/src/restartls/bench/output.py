"""Artifact assembly and deterministic file output (CSV, JSON, Markdown, SVG)."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field, fields
from xml.sax.saxutils import escape

from .methods import MethodSpec, _fmt_num
from .profiles import aggregate_costs, performance_profile_from_costs, data_profile_from_costs, uniquely_fastest_counts
from .runner import CostMatrix, RunSummary, discard_stats, summary_to_row
from .tables import restart_table

__all__ = [
    "BenchArtifacts",
    "build_artifacts",
    "emit",
    "ensure_writable",
    "write_cost_matrix_csv",
    "read_cost_matrix_csv",
    "write_runs_csv",
    "read_runs_csv",
    "profile_csv",
    "profile_svg",
    "noise_tag",
]

REPLICATE_AGGREGATION = "median over kept replicates; unsolved counts as +inf"


def noise_tag(eps_f) -> str:
    return f"ef{eps_f:g}"


@dataclass
class BenchArtifacts:
    plan: dict
    summaries: list
    matrix: CostMatrix
    discards: dict
    tables: list = field(default_factory=list)
    # (name, eps_f) -> {"performance": curves or None, "data": curves, "methods": [...], "fastest": {...}}
    profiles: dict = field(default_factory=dict)


def _profile_sets(plan):
    """Method subsets to profile: the comparison set plus grid sensitivity sweeps."""
    methods = [m if isinstance(m, MethodSpec) else None for m in plan.methods]
    sets = {"compare": [m.label for m in methods if m is not None]}
    p_grid, k_grid = list(plan.p_grid), list(plan.kappa_grid)
    if p_grid and k_grid:
        p_fix = 0.75 if 0.75 in p_grid else p_grid[-1]
        k_fix = max(k_grid)
        for fam, base in (("nlcgr", "nlcg"), ("lbfgsr", "lbfgs")):
            base_label = MethodSpec.make(base).label
            sets[f"{fam}-p{_fmt_num(p_fix)}"] = [base_label] + [
                MethodSpec.make(fam, p=p_fix, kappa=k).label for k in k_grid]
            sets[f"{fam}-k{_fmt_num(k_fix)}"] = [base_label] + [
                MethodSpec.make(fam, p=p, kappa=k_fix).label for p in p_grid]
    return sets


def build_artifacts(plan, summaries, matrix) -> BenchArtifacts:
    art = BenchArtifacts(plan=plan.to_dict(), summaries=summaries, matrix=matrix,
                         discards=discard_stats(summaries))
    families = sorted({s.family for s in summaries if s.family in ("nlcgr", "lbfgsr")})
    for e in plan.noise_levels:
        for fam in families:
            art.tables.append(restart_table(
                summaries, fam, float(e),
                p_grid=plan.p_grid or None, kappa_grid=plan.kappa_grid or None))
    sets = _profile_sets(plan)
    ran = set(matrix.methods())
    for name, labels in sets.items():
        labels = [m for m in labels if m in ran]
        if not labels:
            continue
        for e in plan.noise_levels:
            problems, costs = aggregate_costs(matrix, labels, float(e))
            dims = [matrix.dims[pb] for pb in problems]
            art.profiles[(name, float(e))] = {
                "methods": labels,
                "problems": problems,
                "performance": performance_profile_from_costs(costs) if len(labels) >= 2 else None,
                "data": data_profile_from_costs(costs, dims),
                "fastest": uniquely_fastest_counts(costs),
            }
    return art


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------

_RUN_FIELDS = [f.name for f in fields(RunSummary)] + ["discarded"]


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def write_runs_csv(summaries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_RUN_FIELDS)
    for s in summaries:
        row = summary_to_row(s)
        w.writerow([_fmt(row[k]) for k in _RUN_FIELDS])
    return buf.getvalue()


def read_runs_csv(text):
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(RunSummary(
            problem=row["problem"], dim=int(row["dim"]), method=row["method"], family=row["family"],
            p=float(row["p"]), kappa_d=float(row["kappa_d"]), sigma_d=float(row["sigma_d"]),
            eps_f=float(row["eps_f"]), replicate=int(row["replicate"]), seed=int(row["seed"]),
            status=row["status"], iterations=int(row["iterations"]),
            cost=None if row["cost"] == "" else int(row["cost"]),
            restart_fraction=float(row["restart_fraction"]), n_f_evals=int(row["n_f_evals"]),
            n_g_evals=int(row["n_g_evals"]), final_grad_inf=float(row["final_grad_inf"]),
        ))
    return out


def write_cost_matrix_csv(matrix: CostMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["problem", "dim", "method", "eps_f", "replicate", "cost", "kept"])
    keys = sorted(set(matrix.entries) | matrix.discards, key=lambda k: (k[2], k[1], k[0], k[3]))
    for key in keys:
        pb, m, e, r = key
        if key in matrix.discards:
            w.writerow([pb, matrix.dims[pb], m, repr(e), r, "", 0])
        else:
            c = matrix.entries[key]
            w.writerow([pb, matrix.dims[pb], m, repr(e), r, "UNSOLVED" if c is None else c, 1])
    return buf.getvalue()


def read_cost_matrix_csv(text) -> CostMatrix:
    cm = CostMatrix()
    for row in csv.DictReader(io.StringIO(text)):
        key = (row["problem"], row["method"], float(row["eps_f"]), int(row["replicate"]))
        cm.dims[row["problem"]] = int(row["dim"])
        if row["kept"] == "0":
            cm.discards.add(key)
        else:
            cm.entries[key] = None if row["cost"] == "UNSOLVED" else int(row["cost"])
    return cm


def profile_csv(curves) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "x", "fraction"])
    for m, c in curves.items():
        for x, y in zip(c.abscissae, c.ordinates):
            w.writerow([m, repr(x), repr(y)])
    return buf.getvalue()


# --------------------------------------------------------------------------
# SVG
# --------------------------------------------------------------------------

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#000000"]


def profile_svg(curves, title, xlabel, log2_x=False, width=640, height=420) -> str:
    """Plain SVG 1.1 step plot with one polyline per method."""
    left, right, top, bottom = 60, 190, 40, 50
    pw, ph = width - left - right, height - top - bottom

    def tx(v):
        return math.log2(v) if log2_x else v

    finite = [tx(x) for c in curves.values() for x in c.abscissae]
    x_lo = 0.0
    x_hi = max(finite) if finite else 1.0
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    x_hi *= 1.05

    def px(v):
        return left + (v - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return top + (1.0 - y) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + pw / 2:.2f}" y="22" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for i in range(6):
        y = i / 5
        out.append(f'<text x="{left - 6}" y="{py(y) + 4:.2f}" text-anchor="end" font-family="sans-serif" '
                   f'font-size="10">{y:.1f}</text>')
    for i in range(6):
        v = x_lo + (x_hi - x_lo) * i / 5
        out.append(f'<text x="{px(v):.2f}" y="{top + ph + 14}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="10">{v:.2f}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{height - 12}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">{escape(xlabel)}</text>')
    for i, (m, c) in enumerate(curves.items()):
        color = _COLORS[i % len(_COLORS)]
        pts = [(px(x_lo), py(0.0))]
        prev = 0.0
        for x, y in zip(c.abscissae, c.ordinates):
            pts.append((px(tx(x)), py(prev)))
            pts.append((px(tx(x)), py(y)))
            prev = y
        pts.append((px(x_hi), py(prev)))
        coords = " ".join(f"{a:.2f},{b:.2f}" for a, b in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}">'
                   f'<title>{escape(m)}</title></polyline>')
        ly = top + 14 + 16 * i
        out.append(f'<line x1="{left + pw + 10}" y1="{ly - 4}" x2="{left + pw + 30}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 34}" y="{ly}" font-family="sans-serif" font-size="10">'
                   f'{escape(m)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# emit
# --------------------------------------------------------------------------


def ensure_writable(output_dir):
    os.makedirs(output_dir, exist_ok=True)
    probe = os.path.join(output_dir, ".write-probe")
    with open(probe, "w") as fh:
        fh.write("")
    os.remove(probe)


def _write(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit(art: BenchArtifacts, output_dir):
    """Write every artifact under ``output_dir``; returns the relative file list."""
    ensure_writable(output_dir)
    files = {}
    files["runs.csv"] = write_runs_csv(art.summaries)
    files["cost_matrix.csv"] = write_cost_matrix_csv(art.matrix)
    files["discards.json"] = _json({noise_tag(e): d for e, d in art.discards.items()})

    best = {}
    for t in art.tables:
        stem = f"tables/restarts_{t.family}_{noise_tag(t.eps_f)}"
        files[stem + ".csv"] = t.to_csv()
        files[stem + ".md"] = t.to_markdown()
        m = t.minimum
        best[f"{t.family}_{noise_tag(t.eps_f)}"] = None if m is None else {"p": m[0], "kappa_d": m[1]}

    fastest = {}
    for (name, e), prof in sorted(art.profiles.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        tag = f"{noise_tag(e)}_{name}"
        if prof["performance"] is not None:
            files[f"profiles/perf_{tag}.csv"] = profile_csv(prof["performance"])
            files[f"profiles/perf_{tag}.svg"] = profile_svg(
                prof["performance"], f"Performance profile, {name}, eps_f={e:g}", "log2(tau)", log2_x=True)
        files[f"profiles/data_{tag}.csv"] = profile_csv(prof["data"])
        files[f"profiles/data_{tag}.svg"] = profile_svg(
            prof["data"], f"Data profile, {name}, eps_f={e:g}", "budget in units of (n+1) gradients")
        fastest[tag] = {"problems": len(prof["problems"]), "uniquely_fastest": prof["fastest"]}

    files["summary.json"] = _json({
        "plan": art.plan,
        "replicate_aggregation": REPLICATE_AGGREGATION,
        "discards": {noise_tag(e): d for e, d in art.discards.items()},
        "restart_table_minimum": best,
        "profiles": fastest,
        "files": sorted(files) + ["summary.json"],
    })
    for rel, text in files.items():
        _write(os.path.join(output_dir, rel), text)
    return sorted(files)
