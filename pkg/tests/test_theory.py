import dataclasses
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from restartls.bench.methods import MethodSpec
from restartls.linesearch import backtrack_bound
from restartls.solver import RunResult, SolverConfig, run
from restartls.testbed import get_problem, scale
from restartls.theory import (
    TheoryParams,
    alpha_bar,
    alpha_bar_restarted,
    compute_constants,
    decrease_constants,
    gated_noise_setup,
    iteration_budget,
    params_for_run,
    verify_trace,
)


def P(**kw):
    base = dict(eta=0.5, theta=0.5, sigma_d=1.0, kappa_d=1.0, p=1.0, sigma_phi=0.0, L=1.0,
                eps_1st=0.0, eps_f=0.0, f0=1.0, f_low=0.0)
    base.update(kw)
    return TheoryParams(**base)


def alpha_bar_exact(eta, sigma_d, kappa_d, sigma_phi, L):
    """Rational evaluation of the step-size floor for p = 1 (no fractional powers)."""
    eta, sigma_d, kappa_d, s, L = map(Fraction, (eta, sigma_d, kappa_d, sigma_phi, L))
    return 2 * (1 - eta) * sigma_d * (1 - s) ** 2 / (2 * kappa_d * (1 + s) + L * kappa_d ** 2 * (1 + s) ** 2)


class TestAlphaBar:
    def test_one_third(self):
        assert alpha_bar(P()) == pytest.approx(1 / 3, rel=1e-15)
        assert Fraction(alpha_bar(P())).limit_denominator(1000) == Fraction(1, 3)

    def test_sigma_phi_half(self):
        exact = alpha_bar_exact(0.5, 1, 1, 0.5, 1)
        assert exact == Fraction(1, 21)
        assert alpha_bar(P(sigma_phi=0.5)) == pytest.approx(float(exact), rel=1e-14)

    def test_doubling_kappa_decreases(self):
        for s in (0.0, 0.3, 0.9):
            assert alpha_bar(P(kappa_d=4.0, sigma_phi=s)) < alpha_bar(P(kappa_d=2.0, sigma_phi=s))

    def test_disabled_restarts_have_no_floor(self):
        assert alpha_bar(P(sigma_d=0.0)) == 0.0
        assert alpha_bar(P(kappa_d=math.inf)) == 0.0

    @settings(max_examples=200, deadline=None)
    @given(s=st.floats(0, 0.99), kd=st.floats(1, 1e6), L=st.floats(1e-3, 1e3), sd=st.floats(1e-6, 1.0),
           p=st.floats(0, 1), eta=st.floats(1e-3, 0.5))
    def test_in_unit_interval(self, s, kd, L, sd, p, eta):
        ab = alpha_bar(P(sigma_phi=s, kappa_d=kd, L=L, sigma_d=sd, p=p, eta=eta))
        assert 0.0 < ab <= 1.0

    @settings(max_examples=100, deadline=None)
    @given(s=st.floats(0, 0.99), L=st.floats(1e-3, 1e3))
    def test_restarted_floor_is_unit_case(self, s, L):
        q = P(sigma_phi=s, L=L, sigma_d=0.2, kappa_d=50.0, p=0.3)
        assert alpha_bar_restarted(q) == alpha_bar(P(sigma_phi=s, L=L))


class TestDecreaseConstants:
    def test_hand_values(self):
        c_N, c_R = decrease_constants(P(sigma_phi=0.5))
        assert c_N == pytest.approx(1 / 168, rel=1e-12)
        assert c_R == pytest.approx(1 / 84, rel=1e-12)
        assert 1 / 168 == pytest.approx(0.0059524, abs=5e-8)
        assert 1 / 84 == pytest.approx(0.0119048, abs=5e-8)

    def test_saturation(self):
        # theta * alpha_bar_1 >= 1 is impossible for admissible parameters, so force it
        c_N, c_R = decrease_constants(P(sigma_phi=0.5), ab_p=1.0, ab_1=4.0)
        assert c_R == 0.5

    def test_undefined_without_relative_accuracy(self):
        c_N, c_R = decrease_constants(P(sigma_phi=0.0, p=0.5))
        assert c_N is None
        assert c_R > 0

    def test_p_zero_independent_of_power(self):
        c_N, _ = decrease_constants(P(sigma_phi=0.0, p=0.0))
        assert c_N == pytest.approx(0.5 * 1.0 * min(1.0, 0.5 * alpha_bar(P(p=0.0))))


class TestIterationBudget:
    def test_zero_gap(self):
        K, ev, _, _ = iteration_budget(P(f0=0.0, eps_1st=0.1, sigma_phi=0.5), 0.01, 0.01)
        assert K == 0 and ev == 0

    def test_hand_value(self):
        q = P(eps_1st=0.1, sigma_phi=0.5)
        K, ev, _, _ = iteration_budget(q, 0.01, 0.01, ab_p=1 / 3, ab_1=1 / 3)
        assert K == 40000
        # (log2(3) + 1) * 40000 = 103398.5..., rounded up once
        assert (math.log2(3) + 1) * 40000 == pytest.approx(103398.500, abs=1e-3)
        assert ev == 103399

    def test_unbounded_without_error_floor(self):
        K, ev, eps, _ = iteration_budget(P(sigma_phi=0.5), 0.01, 0.01)
        assert K == math.inf and ev == math.inf and eps == 0.0

    def test_eps_formula(self):
        q = P(eps_1st=1e-3, sigma_phi=0.5, p=0.5, sigma_d=0.1, kappa_d=10.0)
        c = compute_constants(q)
        r = 1e-3 / (0.5 * c.alpha_bar_p)
        assert c.eps == max(r, r ** (2 / 1.5), 1e-3 / (0.5 * c.alpha_bar_1))

    def test_noise_gate(self):
        q = P(eps_1st=0.1, sigma_phi=0.5)
        c_N, c_R = decrease_constants(q)
        limit = min(c_N / 8 * 0.1 ** 2, c_R / 8 * 0.1 ** 2)
        assert iteration_budget(dataclasses.replace(q, eps_f=limit), c_N, c_R)[3]
        assert not iteration_budget(dataclasses.replace(q, eps_f=limit * 1.01), c_N, c_R)[3]

    @settings(max_examples=200, deadline=None)
    @given(c1=st.floats(1e-4, 1), c2=st.floats(1e-4, 1), f=st.floats(1.01, 4), e=st.floats(1e-3, 1))
    def test_monotone(self, c1, c2, f, e):
        q = P(eps_1st=e, sigma_phi=0.5)
        K = iteration_budget(q, c1, c2)[0]
        assert iteration_budget(q, c1 * f, c2)[0] <= K
        assert iteration_budget(q, c1, c2 * f)[0] <= K
        assert iteration_budget(dataclasses.replace(q, eps_1st=e / f), c1, c2)[0] >= K


class TestValidation:
    @pytest.mark.parametrize("kw", [dict(sigma_phi=1.0), dict(L=0.0), dict(f0=-1.0), dict(kappa_d=0.5)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            P(**kw)

    def test_params_require_known_constants(self):
        with pytest.raises(ValueError):
            params_for_run(get_problem("rosenbrock2"), SolverConfig(), 0.0)


class TestVerifyTrace:
    def test_noiseless_gd_quadratic(self):
        p = get_problem("quad10")
        res = run(p, SolverConfig())
        rep = verify_trace(res, params_for_run(p, SolverConfig(), 0.0))
        assert rep.verifiable and rep.passed
        assert rep.checked_backtrack == res.iterations
        assert rep.checked_decrease == res.iterations

    def test_injected_backtrack_violation(self):
        p = get_problem("quad10")
        res = run(p, SolverConfig())
        params = params_for_run(p, SolverConfig(), 0.0)
        bound = backtrack_bound(compute_constants(params).alpha_bar_1, 0.5)
        bad = RunResult.from_dict(res.to_dict())
        bad.trace[3] = dataclasses.replace(bad.trace[3], j=bound + 1)
        rep = verify_trace(bad, params)
        assert not rep.passed
        assert [v.k for v in rep.violations_of("backtrack")] == [3]

    def test_injected_decrease_violation(self):
        p = get_problem("quad10")
        res = run(p, SolverConfig())
        bad = RunResult.from_dict(res.to_dict())
        bad.trace[1] = dataclasses.replace(bad.trace[1], f_true_next=bad.trace[1].f_true)
        rep = verify_trace(bad, params_for_run(p, SolverConfig(), 0.0))
        assert [v.k for v in rep.violations_of("decrease")] == [1]

    def test_not_verifiable(self):
        res = run(scale(get_problem("rosenbrock2")), SolverConfig(max_iter=3))
        rep = verify_trace(res, None)
        assert not rep.verifiable and not rep.passed
        assert "not verifiable" in rep.lines()[0]

    def test_gated_lbfgsr_budget(self):
        sp = scale(get_problem("quad10"))
        cfg, noise, params = gated_noise_setup(sp, MethodSpec.make("lbfgsr", p=1.0, kappa=2.0).config(), 0.5, 1e-3,
                                               seed=1)
        assert compute_constants(params).noise_gate_ok
        res = run(sp, cfg, noise=noise)
        rep = verify_trace(res, params, tol=cfg.grad_tol)
        assert rep.budget_checked and rep.budget_ok and rep.evals_ok
        assert rep.first_eps_index <= rep.constants.K_eps
        assert rep.passed
        assert rep.to_dict()["passed"] is True

    def test_gated_setup_rejects_unrestarted(self):
        with pytest.raises(ValueError):
            gated_noise_setup(get_problem("quad10"), MethodSpec.make("lbfgs").config(), 0.5, 1e-3)
