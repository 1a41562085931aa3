"""How often do the restarted variants actually restart?

For each (p, kappa_d) cell the table reports the mean percentage of iterations
that ended in a restart, over a handful of test problems without noise.  Small
p and small kappa_d make both restart tests easy to trigger; p near 1 with a
large kappa_d almost never restarts.
"""
from restartls.bench import ExperimentPlan, grid_methods, restart_table, run_plan

problems = ["rosenbrock2", "chainrosen10", "beale", "wood", "trig10", "dixonprice10", "extpowell100"]
p_grid = [0.0, 0.5, 1.0]
kappa_grid = [1e2, 1e4, 1e6]
plan = ExperimentPlan(problems=problems, methods=grid_methods(p_grid, kappa_grid),
                      noise_levels=[0.0, 1e-2], replicates=1)
summaries, _ = run_plan(plan)

for eps_f in plan.noise_levels:
    for family in ("nlcgr", "lbfgsr"):
        print(restart_table(summaries, family, eps_f).to_markdown())
