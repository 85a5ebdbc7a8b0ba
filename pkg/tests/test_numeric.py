import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bregman_manifold.exceptions import DomainError, NoConvergence, SingularJacobian
from bregman_manifold.numeric import (NewtonConfig, fd_gradient, fd_hessian, lambert_w0,
                                      lambert_w_minus1, newton_solve, newton_solve_batch,
                                      solve_quadratic)

INV_E = math.exp(-1.0)

# frozen from bisection on x e^x = a in 50-digit arithmetic
W_MINUS1_AT_MINUS_0_1 = -3.577152063957297
W_MINUS1_AT_MINUS_E2 = -3.1461932206205825
W0_AT_MINUS_0_1 = -0.11183255915896297
W0_AT_10 = 1.7455280027406994


def residual(w, a):
    return abs(w * math.exp(w) - a)


class TestLambertW:
    def test_w0_fixed_values(self):
        assert lambert_w0(0.0) == 0.0
        assert lambert_w0(math.e) == pytest.approx(1.0, abs=1e-15)
        assert lambert_w0(-INV_E) == pytest.approx(-1.0, abs=1e-7)
        assert lambert_w0(-0.1) == pytest.approx(W0_AT_MINUS_0_1, rel=1e-14)
        assert lambert_w0(10.0) == pytest.approx(W0_AT_10, rel=1e-14)

    def test_wm1_fixed_values(self):
        assert lambert_w_minus1(-INV_E) == pytest.approx(-1.0, abs=1e-7)
        assert lambert_w_minus1(-0.1) == pytest.approx(W_MINUS1_AT_MINUS_0_1, rel=1e-14)
        assert lambert_w_minus1(-math.exp(-2.0)) == pytest.approx(W_MINUS1_AT_MINUS_E2, rel=1e-14)

    def test_agrees_with_mpmath(self):
        for a in np.linspace(-INV_E + 1e-6, -1e-6, 25):
            assert lambert_w_minus1(a) == pytest.approx(float(mpmath.lambertw(a, -1).real), rel=1e-13)
            assert lambert_w0(a) == pytest.approx(float(mpmath.lambertw(a).real), rel=1e-12, abs=1e-15)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            lambert_w0(-0.5)
        with pytest.raises(DomainError):
            lambert_w_minus1(0.0)
        with pytest.raises(DomainError):
            lambert_w_minus1(0.3)
        with pytest.raises(DomainError):
            lambert_w_minus1(-0.5)

    def test_clamps_just_below_branch_point(self):
        a = -INV_E - 5e-17
        assert lambert_w0(a) == pytest.approx(-1.0, abs=1e-7)
        assert lambert_w_minus1(a) == pytest.approx(-1.0, abs=1e-7)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(min_value=-INV_E, max_value=1e12, allow_nan=False))
    def test_w0_branch_property(self, a):
        w = lambert_w0(a)
        assert w >= -1.0
        assert residual(w, a) < 1e-13 * (1 + abs(a))

    @settings(max_examples=300, deadline=None)
    @given(st.floats(min_value=-INV_E, max_value=-1e-300, allow_nan=False))
    def test_wm1_branch_property(self, a):
        w = lambert_w_minus1(a)
        assert w <= -1.0
        assert residual(w, a) < 1e-13 * (1 + abs(a))


class TestQuadratic:
    def test_examples(self):
        assert solve_quadratic(1, 0, -1) == (-1.0, 1.0)
        assert solve_quadratic(0, 2, -4) == (2.0,)
        assert solve_quadratic(1, 0, 1) == ()
        assert solve_quadratic(1, -2, 1) == (1.0,)

    def test_cancellation(self):
        small, big = solve_quadratic(1.0, -1e8, 1.0)
        # 40-digit references
        assert small == pytest.approx(1.0000000000000000e-08, rel=1e-15)
        assert big == pytest.approx(99999999.99999999, rel=1e-15)
        for x in (small, big):
            assert abs(x * x - 1e8 * x + 1.0) / (x * x + 1e8 * abs(x) + 1.0) < 1e-12

    def test_random_back_substitution(self):
        rng = np.random.default_rng(0)
        coef = rng.normal(size=(100_000, 3)) * np.exp(rng.uniform(-5, 5, size=(100_000, 3)))
        worst = 0.0
        for A, B, C in coef:
            for x in solve_quadratic(A, B, C):
                scale = abs(A * x * x) + abs(B * x) + abs(C)
                worst = max(worst, abs(A * x * x + B * x + C) / scale)
        assert worst < 1e-12


class TestNewton:
    def test_scalar(self):
        assert newton_solve(lambda x: x * x - 4.0, 3.0) == pytest.approx(2.0, abs=1e-12)

    def test_linear_system_one_step(self):
        A = np.array([[3.0, 1.0], [1.0, 2.0]])
        b = np.array([1.0, -1.0])
        calls = []

        def f(x):
            calls.append(1)
            return A @ x - b

        x = newton_solve(f, np.zeros(2), jac=lambda x: A)
        assert np.allclose(x, np.linalg.solve(A, b), atol=1e-14)
        assert len(calls) == 2

    def test_guard_and_halving(self):
        # log has its root at 1; a full step from 3 would leave x > 0
        x = newton_solve(lambda x: np.log(x), 3.0, domain_guard=lambda x: x > 0)
        assert x == pytest.approx(1.0, abs=1e-12)

    def test_singular_jacobian(self):
        with pytest.raises(SingularJacobian):
            newton_solve(lambda x: np.array([x[0] + x[1] - 1, 2 * x[0] + 2 * x[1] - 3]),
                         np.zeros(2))

    def test_no_convergence(self):
        with pytest.raises(NoConvergence):
            newton_solve(lambda x: x * x + 1.0, 0.5, config=NewtonConfig(max_iter=20))

    def test_bad_start(self):
        with pytest.raises(DomainError):
            newton_solve(lambda x: x, -1.0, domain_guard=lambda x: x > 0)

    def test_too_many_unknowns(self):
        with pytest.raises(ValueError):
            newton_solve(lambda x: x, np.zeros(7))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            NewtonConfig(tol=0)
        with pytest.raises(ValueError):
            NewtonConfig(max_iter=0)

    def test_deterministic(self):
        f = lambda x: np.array([x[0] ** 3 - x[1], x[1] ** 2 - 2])  # noqa: E731
        assert np.array_equal(newton_solve(f, np.array([1.0, 1.0])),
                              newton_solve(f, np.array([1.0, 1.0])))

    def test_batch_matches_single(self):
        target = np.array([[4.0], [9.0], [16.0]])

        def f(x, rows):
            return x * x - target[rows]

        res = newton_solve_batch(f, np.array([[3.0], [2.0], [5.0]]))
        assert np.allclose(res.x[:, 0], [2.0, 3.0, 4.0], atol=1e-12)
        assert res.converged.all()


class TestFiniteDifferences:
    def test_constant(self):
        assert np.allclose(fd_gradient(lambda x: 3.0, np.array([1.0, 2.0])), 0.0)

    def test_quadratic(self):
        x = np.array([0.3, -1.2, 2.0])
        f = lambda z: 0.5 * z @ z  # noqa: E731
        assert np.allclose(fd_gradient(f, x), x, atol=1e-7)
        assert np.allclose(fd_hessian(f, x), np.eye(3), atol=1e-7)

    def test_burg_gradient(self):
        g = fd_gradient(lambda t: -np.sum(np.log(t)), np.array([2.0, 0.5]))
        assert np.allclose(g, [-0.5, -2.0], atol=1e-7)
