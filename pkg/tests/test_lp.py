"""Simplex solver: contract examples, weak duality, exact pivoting."""

from fractions import Fraction as F

import numpy as np
import pytest

from hmt.lp import (INFEASIBLE, OPTIMAL, UNBOUNDED, LPProblem, lp_solve,
                    lp_solve_exact, solve_standard_form)


class TestExamples:
    def test_single_equality(self):
        res = lp_solve(LPProblem(c=[1.0], A=[[1.0]], b=[1.0], sense="max"))
        assert res.status == OPTIMAL
        assert res.value == pytest.approx(1.0, abs=1e-9)
        assert res.x[0] == pytest.approx(1.0, abs=1e-9)

    def test_two_by_two(self):
        res = lp_solve(LPProblem(c=[1.0, 1.0], A=[[1.0, 1.0], [0.25, 0.75]],
                                 b=[1.0, 0.5], sense="max"))
        assert res.status == OPTIMAL
        assert res.value == pytest.approx(1.0, abs=1e-9)
        assert np.allclose(res.x, [0.5, 0.5], atol=1e-9)

    def test_infeasible_bound_conflict(self):
        res = lp_solve(LPProblem(c=[1.0], A=[[1.0]], b=[-1.0], sense="min"))
        assert res.status == INFEASIBLE

    def test_unbounded(self):
        res = lp_solve(LPProblem(c=[-1.0, 0.0], A=[[1.0, -1.0]], b=[0.0],
                                 sense="min"))
        assert res.status == UNBOUNDED


class TestWeakDuality:
    def test_random_problems(self, rng):
        # any feasible point scores no better than the reported optimum
        for _ in range(40):
            m, n = int(rng.integers(1, 5)), int(rng.integers(2, 9))
            x_feas = rng.uniform(0.0, 1.0, size=n)
            A = rng.uniform(-1.0, 1.0, size=(m, n))
            b = A @ x_feas
            c = rng.uniform(-1.0, 1.0, size=n)
            res = lp_solve(LPProblem(c=c, A=A, b=b, sense="max"), tol=1e-9)
            if res.status != OPTIMAL:
                assert res.status == UNBOUNDED
                continue
            assert float(c @ x_feas) <= res.value + 1e-7
            assert np.all(res.x >= -1e-9)
            assert np.allclose(A @ res.x, b, atol=1e-7)

    def test_degenerate_does_not_cycle(self):
        # multiple ties in the ratio test
        A = np.array([[1.0, 1.0, 1.0, 0.0], [1.0, 1.0, 0.0, 1.0]])
        b = np.array([1.0, 1.0])
        res = solve_standard_form(A, b, np.array([-1.0, -1.0, 0.0, 0.0]))
        assert res.status == OPTIMAL
        assert res.value == pytest.approx(-1.0, abs=1e-9)


class TestExactSimplex:
    def test_matches_float_path(self):
        res = lp_solve_exact([F(1), F(1)], [[F(1), F(1)], [F(1, 4), F(3, 4)]],
                             [F(1), F(1, 2)], sense="max")
        assert res.status == OPTIMAL
        assert res.value == F(1)
        assert res.x == [F(1, 2), F(1, 2)]

    def test_exact_infeasible(self):
        res = lp_solve_exact([F(1)], [[F(1)]], [F(-1)], sense="min")
        # b is flipped to +1 with a flipped row; x >= 0 makes it infeasible
        assert res.status == INFEASIBLE

    def test_exact_markov_bound(self):
        # sup of mass at or below 1/4 given mean 1/2 on support {0, 1/4, 1}
        support = [F(0), F(1, 4), F(1)]
        A = [[F(1)] * 3, support]
        b = [F(1), F(1, 2)]
        c = [F(1), F(1), F(0)]
        res = lp_solve_exact(c, A, b, sense="max")
        assert res.status == OPTIMAL
        assert res.value == F(2, 3)
