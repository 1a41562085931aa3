import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from restartls.noise import NoiseConfig, NoisyOracle, ball_sample, derive_seed, sanity_bounds
from restartls.testbed import Problem, get_problem, scale


def _point_problem(grad):
    grad = np.asarray(grad, dtype=float)
    return Problem("lin", grad.size, lambda x: float(grad @ x), lambda x: grad.copy(), np.zeros(grad.size))


class TestNoiseConfig:
    def test_rejects_negative_levels(self):
        with pytest.raises(ValueError):
            NoiseConfig(eps_f=-1.0)
        with pytest.raises(ValueError):
            NoiseConfig(eps_g=-1e-3)

    def test_rejects_sigma_phi_one(self):
        with pytest.raises(ValueError):
            NoiseConfig(sigma_phi=1.0)

    def test_from_level_uses_square_root(self):
        cfg = NoiseConfig.from_level(1e-4, seed=7)
        assert cfg.eps_g == pytest.approx(1e-2)
        assert cfg.seed == 7

    def test_json_round_trip(self):
        cfg = NoiseConfig(0.1, 0.3, 12, True, 0.5, 0.25, 0.5)
        assert NoiseConfig(**json.loads(json.dumps(cfg.to_dict()))) == cfg


class TestNoisyF:
    def test_zero_noise_exact(self):
        p = get_problem("rosenbrock2")
        o = NoisyOracle(p, NoiseConfig())
        x = np.array([0.3, -0.7])
        assert o.f(x) == p.eval_f(x)

    def test_uniform_bounds_and_mean(self):
        p = get_problem("quad10")
        o = NoisyOracle(p, NoiseConfig(eps_f=0.1, seed=5))
        x = p.x0
        vals = np.array([o.f(x) for _ in range(10_000)])
        phi = p.eval_f(x)
        assert np.all(np.abs(vals - phi) <= 0.1)
        assert abs(vals.mean() - phi) <= 0.01
        assert o.n_f_evals == 10_000

    def test_same_seed_same_stream(self):
        p = get_problem("beale")
        a = NoisyOracle(p, NoiseConfig(eps_f=0.1, eps_g=0.2, seed=42))
        b = NoisyOracle(p, NoiseConfig(eps_f=0.1, eps_g=0.2, seed=42))
        for _ in range(5):
            assert a.f(p.x0) == b.f(p.x0)
            np.testing.assert_array_equal(a.grad(p.x0), b.grad(p.x0))

    def test_fresh_noise_per_call(self):
        p = get_problem("quad1")
        o = NoisyOracle(p, NoiseConfig(eps_f=0.1, seed=1))
        assert o.f(p.x0) != o.f(p.x0)


class TestNoisyGrad:
    def test_zero_noise_exact(self):
        p = get_problem("beale")
        o = NoisyOracle(p, NoiseConfig())
        np.testing.assert_array_equal(o.grad(p.x0), p.eval_grad(p.x0))
        assert o.n_g_evals == 1

    def test_ball_bound(self):
        p = get_problem("quad10")
        o = NoisyOracle(p, NoiseConfig(eps_g=0.3, seed=9))
        errs = [np.linalg.norm(o.grad(p.x0) - p.x0) for _ in range(10_000)]
        assert max(errs) <= 0.3
        # the ball is filled, not only the sphere: mass concentrates near the radius in 10-D
        assert min(errs) < 0.3 * 0.9

    def test_assumption4_radius_floor(self):
        o = NoisyOracle(_point_problem([0.06, 0.0]),
                        NoiseConfig(eps_g=0.02, enforce_assumption4=True, sigma_phi=0.5,
                                    alpha_bar_p=1 / 3, p=1.0))
        assert o.grad_radius(np.array([0.06, 0.0])) == 0.02

    def test_assumption4_radius_grows_with_gradient(self):
        cfg = NoiseConfig(eps_g=0.02, enforce_assumption4=True, sigma_phi=0.5, alpha_bar_p=1 / 3, p=0.0)
        o = NoisyOracle(_point_problem([3.0, 4.0]), cfg)
        # min(5, sqrt(5)) = sqrt(5)
        assert o.grad_radius(np.array([3.0, 4.0])) == pytest.approx(0.5 / 3 * np.sqrt(5.0))

    def test_radius_ignores_sigma_when_not_enforced(self):
        o = NoisyOracle(_point_problem([3.0, 4.0]), NoiseConfig(eps_g=0.02, sigma_phi=0.5))
        assert o.grad_radius(np.array([3.0, 4.0])) == 0.02


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 50), radius=st.floats(1e-12, 1e3), seed=st.integers(0, 2**32 - 1))
def test_ball_sample_never_exceeds_radius(n, radius, seed):
    e = ball_sample(np.random.default_rng(seed), n, radius)
    assert e.shape == (n,)
    assert np.linalg.norm(e) <= radius


def test_ball_sample_radial_law():
    # P(||e|| <= r/2) = 2^-n for the uniform ball
    rng = np.random.default_rng(0)
    draws = np.array([np.linalg.norm(ball_sample(rng, 2, 1.0)) for _ in range(20_000)])
    assert abs(np.mean(draws <= 0.5) - 0.25) < 0.015


class TestSanityBounds:
    def test_exact_gradient(self):
        g = np.array([0.3, -2.0])
        for s in (0.0, 0.5, 0.99):
            assert sanity_bounds(g, g, s)

    def test_inside(self):
        assert sanity_bounds(np.array([1.4, 0.0]), np.array([1.0, 0.0]), 0.5)

    def test_outside(self):
        assert not sanity_bounds(np.array([1.6, 0.0]), np.array([1.0, 0.0]), 0.5)

    def test_enforced_runs_satisfy_lower_upper_bounds(self):
        # whenever the true gradient is large enough relative to the error floor,
        # the estimate's norm lies within (1 +- sigma_phi) of the truth
        sp = scale(get_problem("tridiag50"))
        cfg = NoiseConfig(eps_g=1e-3, seed=4, enforce_assumption4=True, sigma_phi=0.5,
                          alpha_bar_p=0.05, p=1.0)
        o = NoisyOracle(sp, cfg)
        rng = np.random.default_rng(1)
        for _ in range(200):
            x = sp.x0 + rng.standard_normal(sp.dim)
            gt = sp.eval_grad(x)
            if np.linalg.norm(gt) >= cfg.eps_g / (cfg.sigma_phi * cfg.alpha_bar_p):
                assert sanity_bounds(o.grad(x), gt, cfg.sigma_phi)


def test_derive_seed_stable_and_distinct():
    a = derive_seed("quad10", "GD", 0.01, 0, 0)
    assert a == derive_seed("quad10", "GD", 0.01, 0, 0)
    assert a != derive_seed("quad10", "GD", 0.01, 1, 0)
    assert a != derive_seed("quad10", "NLCG", 0.01, 0, 0)
    assert 0 <= a < 2**64
