"""Run a method under noise that satisfies the analysis hypotheses, then audit the trace.

``gated_noise_setup`` picks the largest function-noise level the iteration
budget admits and ties the gradient error to the true gradient norm.  The
verifier then re-checks, iteration by iteration, the backtracking cap and the
guaranteed decrease, and finally the global iteration and evaluation budgets.
"""
from restartls import compute_constants, gated_noise_setup, get_problem, run, scale, verify_trace
from restartls.bench import MethodSpec

problem = scale(get_problem("logistic20"))
method = MethodSpec.make("lbfgsr", p=1.0, kappa=2.0)

for eps_1st in (1e-2, 1e-3):
    cfg, noise, params = gated_noise_setup(problem, method.config(), sigma_phi=0.5, eps_1st=eps_1st, seed=0)
    c = compute_constants(params)
    print(f"eps_1st={eps_1st:g}: eps_f set to {cfg.eps_f:.3e}")
    print(f"  alpha_bar_p={c.alpha_bar_p:.4g}  alpha_bar_1={c.alpha_bar_1:.4g}  "
          f"c_N={c.c_N:.3g}  c_R={c.c_R:.3g}")
    print(f"  stationarity target eps={c.eps:.3g}; budget K_eps={c.K_eps:,}; evaluation bound {c.eval_bound:,}")
    res = run(problem, cfg, noise=noise)
    report = verify_trace(res, params, tol=cfg.grad_tol)
    print(f"  run: {res.summary_line()}")
    for line in report.lines():
        print("   ", line)
    print()

# The budgets are worst-case and very loose: a handful of iterations against tens of
# millions allowed.  The per-iteration checks are the sharper part of the audit.
