"""Moment sequences: Hankel classification, ranges, canonical coordinates."""

import math
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest

from hmt.moments import (INTERIOR, INVALID, UNIQUE_DISCRETE, DegeneratePrefixError,
                         MomentSequence, WeightSumError, canonical_moments,
                         det_exact, det_mpf, discrete_moments, hankel_determinants,
                         hankel_report, moment_bounds, moments_from_canonical)
from hmt.numerics import working_digits


def uniform_seq(n):
    return MomentSequence(tuple(F(1, k + 1) for k in range(n + 1)))


def arcsine_seq(n):
    return MomentSequence(tuple(F(math.comb(2 * k, k), 4 ** k) for k in range(n + 1)))


class TestHankelReport:
    def test_paper_example_two_jumps(self):
        m = MomentSequence((F(1), F(1, 2), F(1, 2)))
        rep = hankel_report(m)
        assert rep.lower == (F(1, 2), F(1, 4))
        assert rep.upper == (F(1, 2), F(0))
        assert rep.classification == UNIQUE_DISCRETE
        assert rep.discrete_index == 2

    def test_paper_example_interior(self):
        m = MomentSequence((F(1), F(1, 2), F(1, 3)))
        rep = hankel_report(m)
        assert rep.lower == (F(1, 2), F(1, 12))
        assert rep.upper == (F(1, 2), F(1, 6))
        assert rep.classification == INTERIOR

    def test_invalid(self):
        rep = hankel_report(MomentSequence((1.0, 0.2, 0.3)))
        assert rep.classification == INVALID
        assert float(rep.upper[1]) == pytest.approx(-0.1, abs=1e-12)

    def test_rational_exact_independent_of_precision(self):
        m = uniform_seq(10)
        with working_digits(16):
            r1 = hankel_report(m)
        with working_digits(200):
            r2 = hankel_report(m)
        assert r1.lower == r2.lower and r1.upper == r2.upper
        assert r1.classification == r2.classification == INTERIOR

    def test_five_atom_sequence_unique_at_ten(self):
        # measure with 5 interior atoms: first vanishing determinant at l = 10
        atoms = [F(1, 8), F(1, 3), F(1, 2), F(2, 3), F(4, 5)]
        m = discrete_moments(atoms, [F(1, 5)] * 5, 10)
        rep = hankel_report(m)
        assert rep.classification == UNIQUE_DISCRETE
        assert rep.discrete_index == 10
        assert all(d > 0 for d in rep.lower[:9])

    def test_interior_sequences_are_monotone(self, rng):
        # 1 = m_0 >= m_1 >= ... >= m_n >= 0 follows from the upper conditions
        from hmt.generators import generate_canonical
        for _ in range(25):
            m = generate_canonical(int(rng.integers(1, 15)), rng)
            vals = m.values
            assert all(vals[k] >= vals[k + 1] for k in range(len(vals) - 1))
            assert vals[-1] >= 0


class TestDeterminants:
    def test_bareiss_vs_mpf(self, rng):
        for _ in range(30):
            k = int(rng.integers(1, 7))
            M = [[F(int(rng.integers(-9, 10)), int(rng.integers(1, 10)))
                  for _ in range(k)] for _ in range(k)]
            exact = det_exact(M)
            approx = det_mpf([[float(v) for v in row] for row in M])
            assert float(exact) == pytest.approx(float(approx), rel=1e-10, abs=1e-12)

    def test_extended_precision_matches_exact_hankel(self):
        # p working digits reproduce rational determinants to ~10^(4-p)
        for n in (4, 7, 10):
            m = uniform_seq(n)
            lo_exact, up_exact = hankel_determinants(m)
            for p in (20, 40):
                with working_digits(p):
                    mv = [mpmath.mpf(v.numerator) / v.denominator for v in m.values]
                    mf = MomentSequence(tuple(mv))
                    lo, up = hankel_determinants(mf)
                for a, b in zip(lo_exact, lo):
                    assert abs(float(a) - float(b)) <= 10.0 ** (4 - p) * max(1.0, abs(float(a)))
                for a, b in zip(up_exact, up):
                    assert abs(float(a) - float(b)) <= 10.0 ** (4 - p) * max(1.0, abs(float(a)))


class TestMomentBounds:
    def test_order_one(self):
        b = moment_bounds(MomentSequence((F(1),)))
        assert (b.lower, b.upper) == (F(0), F(1))

    def test_order_two_closed_form(self):
        b = moment_bounds(MomentSequence((F(1), F(2, 5))))
        assert (b.lower, b.upper) == (F(4, 25), F(2, 5))

    def test_order_three_uniform(self):
        b = moment_bounds(MomentSequence((F(1), F(1, 2), F(1, 3))))
        assert (b.lower, b.upper) == (F(2, 9), F(5, 18))

    def test_degenerate_prefix_rejected(self):
        with pytest.raises(DegeneratePrefixError):
            moment_bounds(MomentSequence((F(1), F(1, 2), F(1, 2))))

    def test_bounds_bracket_actual_moment(self, rng):
        from hmt.generators import generate_canonical
        for _ in range(10):
            m = generate_canonical(int(rng.integers(2, 12)), rng)
            b = moment_bounds(m.truncated(m.n - 1))
            assert b.lower < m.values[m.n] < b.upper


class TestCanonicalMoments:
    def test_uniform(self):
        p = canonical_moments(uniform_seq(3))
        assert p.p == (F(1, 2), F(1, 3), F(1, 2))

    def test_arcsine_fixed_point(self):
        p = canonical_moments(arcsine_seq(4))
        assert p.p == (F(1, 2),) * 4

    def test_order_one(self):
        assert canonical_moments(MomentSequence((F(1), F(1, 2)))).p == (F(1, 2),)

    def test_roundtrip_exact(self, rng):
        from hmt.generators import generate_canonical
        for _ in range(10):
            m = generate_canonical(int(rng.integers(1, 13)), rng)
            p = canonical_moments(m)
            assert moments_from_canonical(p.p).values == m.values


class TestDiscreteMoments:
    def test_five_atom_first_moment(self):
        atoms = [F(1, 8), F(1, 3), F(1, 2), F(2, 3), F(4, 5)]
        m = discrete_moments(atoms, [F(1, 5)] * 5, 3)
        assert m.values[1] == F(97, 200)  # = 0.485 by direct arithmetic

    def test_point_mass(self):
        m = discrete_moments([F(1, 2)], [F(1)], 6)
        assert m.values == tuple(F(1, 2) ** k for k in range(7))

    def test_endpoint_atoms(self):
        m = discrete_moments([F(0), F(1)], [F(1, 2), F(1, 2)], 4)
        assert m.values == (F(1), F(1, 2), F(1, 2), F(1, 2), F(1, 2))

    def test_weight_sum_error(self):
        with pytest.raises(WeightSumError):
            discrete_moments([0.5], [0.9], 2)


class TestSerialization:
    def test_fraction_roundtrip(self):
        m = uniform_seq(5)
        again = MomentSequence.from_json(m.to_json())
        assert again.values == m.values

    def test_float_roundtrip(self):
        m = MomentSequence((1.0, 0.625, 0.4150390625))
        again = MomentSequence.from_json(m.to_json())
        assert tuple(float(v) for v in again.values) == m.values

    def test_truncate(self):
        m = uniform_seq(6)
        assert m.truncated(2).values == (F(1), F(1, 2), F(1, 3))
        with pytest.raises(ValueError):
            m.truncated(7)
