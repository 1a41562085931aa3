import math

import numpy as np
import pytest

from restartls.testbed import (
    Problem,
    ScaledProblem,
    fd_gradient,
    get_problem,
    gradient_check,
    problem_names,
    registry,
    scale,
)


def _quadratic(name, x0):
    return Problem(name, len(x0), lambda x: 0.5 * float(x @ x), lambda x: np.array(x, dtype=float),
                   np.asarray(x0, dtype=float), 1.0, 0.0)


class TestRegistry:
    def test_size_and_dimensions(self):
        probs = registry()
        assert len(probs) >= 20
        dims = [p.dim for p in probs]
        assert min(dims) == 1
        assert max(dims) >= 1000

    def test_required_families_present(self):
        names = set(problem_names())
        for required in ("quad1", "quad10", "rosenbrock2", "extrosen1000", "beale", "powell4",
                         "dixonprice10", "trig10"):
            assert required in names

    def test_unique_names(self):
        names = problem_names()
        assert len(names) == len(set(names))

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            get_problem("no-such-problem")

    def test_quad10_identity_hessian(self):
        p = get_problem("quad10")
        assert p.dim == 10
        assert p.lipschitz_L == 1.0
        assert p.f_low == 0.0
        np.testing.assert_array_equal(p.eval_grad(p.x0), p.x0)
        np.testing.assert_array_equal(p.x0, np.ones(10))

    def test_rosenbrock_minimizer(self):
        p = get_problem("rosenbrock2")
        x = np.ones(2)
        assert p.eval_f(x) == 0.0
        np.testing.assert_array_equal(p.eval_grad(x), np.zeros(2))

    def test_beale_fd_at_standard_start(self):
        p = get_problem("beale")
        np.testing.assert_array_equal(p.x0, [1.0, 1.0])
        assert gradient_check(p, p.x0) <= 1e-6

    def test_x0_is_read_only(self):
        p = get_problem("quad10")
        with pytest.raises(ValueError):
            p.x0[0] = 5.0

    @pytest.mark.parametrize("name", problem_names())
    def test_deterministic_and_lower_bound(self, name):
        p = get_problem(name)
        rng = np.random.default_rng(3)
        for _ in range(3):
            x = p.x0 + 0.5 * rng.standard_normal(p.dim)
            assert p.eval_f(x) == p.eval_f(x.copy())
            np.testing.assert_array_equal(p.eval_grad(x), p.eval_grad(x.copy()))
            if p.f_low is not None:
                assert p.eval_f(x) >= p.f_low

    @pytest.mark.parametrize("name", [p.name for p in registry() if p.lipschitz_L is not None])
    def test_known_lipschitz_constant_not_exceeded(self, name):
        # secant estimate of the Lipschitz ratio along random pairs
        p = get_problem(name)
        rng = np.random.default_rng(11)
        for _ in range(20):
            x = p.x0 + rng.standard_normal(p.dim)
            y = x + 0.1 * rng.standard_normal(p.dim)
            ratio = np.linalg.norm(p.eval_grad(x) - p.eval_grad(y)) / np.linalg.norm(x - y)
            assert ratio <= p.lipschitz_L * (1 + 1e-9)


class TestFiniteDifferences:
    def test_fd_on_cubic(self):
        f = lambda x: float(np.sum(x ** 3))
        x = np.array([0.5, -2.0, 3.0])
        np.testing.assert_allclose(fd_gradient(f, x), 3 * x ** 2, rtol=1e-8)

    def test_fd_step_is_relative(self):
        # a step of 1e-6 * |x| keeps the error small even for large coordinates
        f = lambda x: float(np.sum(np.log(x)))
        x = np.array([1e4, 2e5])
        np.testing.assert_allclose(fd_gradient(f, x), 1 / x, rtol=1e-6)


class TestScale:
    def test_small_gradient_no_op(self):
        sp = scale(_quadratic("q", [0.5, -0.25]))
        assert sp.factor == 1.0

    def test_factor_eight(self):
        sp = scale(_quadratic("q", [8.0, 1.0]))
        assert sp.factor == 8.0
        assert np.max(np.abs(sp.eval_grad(sp.x0))) == 1.0

    def test_hand_substitution(self):
        sp = scale(_quadratic("q", [2.0, 0.0]))
        assert sp.factor == 2.0
        assert sp.eval_f(sp.x0) == 1.0
        assert sp.lipschitz_L == 0.5
        assert sp.f_low == 0.0

    def test_rescale_is_identity(self):
        sp = scale(get_problem("rosenbrock2"))
        again = scale(sp.as_problem())
        assert again.factor == 1.0

    def test_nonfinite_gradient_rejected(self):
        bad = Problem("bad", 1, lambda x: 0.0, lambda x: np.array([math.nan]), np.zeros(1))
        with pytest.raises(ValueError):
            scale(bad)

    @pytest.mark.parametrize("name", problem_names())
    def test_scaled_gradient_unit_bounded(self, name):
        sp = scale(get_problem(name))
        assert isinstance(sp, ScaledProblem)
        assert np.max(np.abs(sp.eval_grad(sp.x0))) <= 1.0 + 1e-15
