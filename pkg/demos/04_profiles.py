"""Performance and data profiles for the five methods at two noise levels.

Writes CSV, Markdown and SVG files to ``demo_output/`` and prints the terminal
value of each profile (the fraction of problems solved at all).
"""
import os

from restartls.bench import ExperimentPlan, run_bench

out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "demo_output")
plan = ExperimentPlan(noise_levels=[0.0, 1e-2], replicates=2, output_dir=out)
art = run_bench(plan)

for (name, eps_f), prof in sorted(art.profiles.items(), key=lambda kv: kv[0][::-1]):
    if name != "compare":
        continue
    print(f"eps_f={eps_f:g} over {len(prof['problems'])} problems")
    for label, curve in prof["performance"].items():
        print(f"  {label:22s} best on {curve(1.0):5.1%}  solved {curve.terminal:5.1%}")
print(f"\nfiles written under {out}")
