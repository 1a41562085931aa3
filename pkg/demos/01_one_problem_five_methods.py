"""Five methods on the scaled Rosenbrock function, with and without noise.

The plain conjugate-gradient and L-BFGS variants only fall back to steepest
descent when their direction is not a descent direction.  The restarted
variants also fall back when the direction is too long or not steep enough,
measured against powers of the gradient norm.  Watch the restart column.
"""
import math

from restartls import NoiseConfig, run, scale, get_problem
from restartls.bench import DEFAULT_METHODS

problem = scale(get_problem("rosenbrock2"))
print(f"{problem.name}: n={problem.dim}, scale factor {problem.factor:g}\n")

for eps_f in (0.0, 1e-4, 1e-2):
    eps_g = math.sqrt(eps_f)
    print(f"eps_f = {eps_f:g}, eps_g = {eps_g:g}")
    for method in DEFAULT_METHODS:
        cfg = method.config(eps_f=eps_f, eps_g=eps_g)
        res = run(problem, cfg, noise=NoiseConfig(eps_f=eps_f, eps_g=eps_g, seed=1))
        print(f"  {method.label:22s} {res.status:12s} iters={res.iterations:4d} "
              f"cost={str(res.cost):>5s} restarts={100 * res.restart_fraction:6.2f}% "
              f"|grad|_inf={res.final_true_grad_norm_inf:.2e}")
    print()

# Every gradient-descent iteration counts as a restart: with sigma_d = kappa_d = p = 1
# the descent test holds with equality for d = -g, and the test is non-strict.
