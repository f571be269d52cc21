"""Numeric substrate: quadrature, Jacobi polynomials, log-gamma, Newton."""

import cmath
import math

import mpmath
import numpy as np
import pytest
from scipy.special import betainc, roots_jacobi

from hmt.numerics import (DomainError, PoleError, complex_log_gamma,
                          gauss_legendre, jacobi_norm, newton_minimize,
                          reg_inc_beta, shifted_jacobi, shifted_jacobi_all,
                          shifted_jacobi_binomial, working_digits)


class TestGaussLegendre:
    def test_x_squared_order2(self):
        assert gauss_legendre(lambda x: x * x, 0, 1, 2) == pytest.approx(1 / 3, abs=1e-15)

    def test_constant(self):
        assert gauss_legendre(lambda x: 1.0, 0, 1, 1) == pytest.approx(1.0, abs=1e-15)

    def test_x_fifth_order3(self):
        assert gauss_legendre(lambda x: x ** 5, 0, 1, 3) == pytest.approx(1 / 6, abs=1e-15)

    def test_polynomial_exactness_random(self, rng):
        # degree <= 2*order - 1 integrates exactly
        for _ in range(50):
            order = int(rng.integers(1, 12))
            deg = int(rng.integers(0, 2 * order))
            coef = rng.uniform(-1, 1, size=deg + 1)
            exact = sum(c / (k + 1) for k, c in enumerate(coef))
            got = gauss_legendre(lambda x: sum(c * x ** k for k, c in enumerate(coef)),
                                 0, 1, order)
            assert got == pytest.approx(exact, rel=1e-12, abs=1e-13)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            gauss_legendre(lambda x: x, 0, 1, 0)


class TestShiftedJacobi:
    def test_degree_zero_is_one(self):
        for x in (0.0, 0.3, 1.0):
            assert shifted_jacobi(0.0, 0.0, 0, x) == 1.0

    def test_legendre_degree_one(self):
        assert shifted_jacobi(0.0, 0.0, 1, 0.25) == pytest.approx(-0.5, abs=1e-15)

    def test_legendre_at_one(self):
        assert shifted_jacobi(0.0, 0.0, 2, 1.0) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("alpha,beta", [(0.0, 0.0), (-0.5, -0.5), (1.3, 0.7)])
    def test_recurrence_matches_binomial_sum(self, alpha, beta):
        xs = np.linspace(0.0, 1.0, 101)
        for n in range(11):
            rec = shifted_jacobi(alpha, beta, n, xs)
            oracle = np.array([shifted_jacobi_binomial(alpha, beta, n, float(x))
                               for x in xs])
            assert np.max(np.abs(rec - oracle)) < 1e-10

    @pytest.mark.parametrize("alpha,beta", [(0.0, 0.0), (-0.5, -0.5), (1.3, 0.7)])
    def test_orthogonality(self, alpha, beta):
        # integrate with Gauss-Jacobi nodes so the endpoint weight is exact
        t, w = roots_jacobi(40, alpha, beta)
        x = 0.5 * (t + 1.0)
        scale = 0.5 ** (alpha + beta + 1)
        polys = shifted_jacobi_all(alpha, beta, 8, x)
        for n in range(9):
            for m in range(9):
                val = scale * np.sum(w * polys[n] * polys[m])
                target = jacobi_norm(alpha, beta, n) if n == m else 0.0
                assert val == pytest.approx(target, abs=1e-8)

    def test_chebyshev_norm_special_case(self):
        assert jacobi_norm(-0.5, -0.5, 0) == pytest.approx(math.pi, rel=1e-12)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            shifted_jacobi(-1.0, 0.0, 2, 0.5)


class TestComplexLogGamma:
    def test_at_one(self):
        assert abs(complex_log_gamma(1.0)) < 1e-14

    def test_at_half(self):
        assert complex_log_gamma(0.5).real == pytest.approx(
            math.log(math.sqrt(math.pi)), rel=1e-13)

    def test_modulus_identity_at_1_plus_i(self):
        # |Gamma(1+i)| = sqrt(pi / sinh pi)
        got = abs(cmath.exp(complex_log_gamma(1 + 1j)))
        assert got == pytest.approx(math.sqrt(math.pi / math.sinh(math.pi)), rel=1e-12)

    def test_against_mpmath_right_half_plane(self, rng):
        for _ in range(200):
            z = complex(rng.uniform(0.05, 50.0), rng.uniform(-30.0, 30.0))
            ref = complex(mpmath.loggamma(z))
            assert complex_log_gamma(z) == pytest.approx(ref, rel=1e-12, abs=1e-12)

    def test_reflection_region_via_exp(self, rng):
        for _ in range(100):
            z = complex(rng.uniform(-4.0, -0.05), rng.uniform(0.1, 3.0))
            got = cmath.exp(complex_log_gamma(z))
            ref = complex(mpmath.gamma(z))
            assert abs(got - ref) / abs(ref) < 1e-12

    def test_pole(self):
        with pytest.raises(PoleError):
            complex_log_gamma(-2.0)


class TestRegIncBeta:
    def test_uniform(self):
        assert reg_inc_beta(1.0, 1.0, 0.3) == pytest.approx(0.3, abs=1e-14)

    def test_endpoints(self):
        assert reg_inc_beta(2.5, 0.7, 0.0) == 0.0
        assert reg_inc_beta(2.5, 0.7, 1.0) == 1.0

    def test_symmetric_half(self):
        assert reg_inc_beta(2.0, 2.0, 0.5) == pytest.approx(0.5, abs=1e-14)

    def test_against_scipy(self, rng):
        for _ in range(400):
            a = rng.uniform(0.05, 25.0)
            b = rng.uniform(0.05, 25.0)
            x = rng.random()
            assert reg_inc_beta(a, b, x) == pytest.approx(betainc(a, b, x), abs=1e-12)


class TestNewton:
    def test_scalar_quadratic(self):
        res = newton_minimize(lambda x: float(x[0] ** 2),
                              lambda x: 2 * x, lambda x: np.array([[2.0]]),
                              [3.0], tol=1e-10)
        assert res.converged and abs(res.x[0]) < 1e-9 and res.grad_norm <= 1e-10

    def test_anisotropic_quadratic(self):
        H = np.diag([2.0, 20.0])
        res = newton_minimize(lambda x: float(x[0] ** 2 + 10 * x[1] ** 2),
                              lambda x: H @ x, lambda x: H, [1.0, 1.0], tol=1e-12)
        assert res.converged
        assert np.max(np.abs(res.x)) < 1e-10

    def test_reports_gradient_norm_when_stuck(self):
        # a Hessian past the condition limit must not report convergence
        H = np.diag([1.0, 1e15])
        res = newton_minimize(lambda x: float(x[0] ** 2 + 1e15 * x[1] ** 2) / 2,
                              lambda x: H @ x, lambda x: H, [1.0, 1.0],
                              tol=1e-12, cond_limit=1e12)
        assert not res.converged
        assert res.reason == "ill_conditioned"
        assert res.grad_norm > 0


class TestWorkingDigits:
    def test_rejects_low_precision(self):
        with pytest.raises(ValueError):
            with working_digits(8):
                pass

    def test_scoped(self):
        before = mpmath.mp.dps
        with working_digits(120):
            assert mpmath.mp.dps == 120
        assert mpmath.mp.dps == before
