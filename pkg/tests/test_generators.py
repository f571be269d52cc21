"""Generators: canonical sampling, decay classes, beta mixtures, char functions."""

import cmath
import math
import os
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest
from scipy.special import betainc

from hmt.generators import (DECAY_CLASSES, BetaMixtureSpec, DecayComponent,
                            DecaySpec, beta_mixture_cdf, beta_mixture_char_fn,
                            beta_mixture_moment, beta_mixture_moments,
                            beta_sampler, char_from_integer_moments, cm_moment,
                            decay_moments, extend_canonical, generate_canonical,
                            random_beta_mixture_spec, random_decay_spec)
from hmt.moments import INTERIOR, INVALID, MomentSequence, hankel_report
from hmt.numerics import working_digits

TRIALS = 500 if os.environ.get("HMT_LONG") else 150


class TestCanonicalGeneration:
    def test_stub_half_gives_arcsine_prefix(self):
        m = generate_canonical(2, p_sampler=lambda a, b: F(1, 2))
        assert m.values == (F(1), F(1, 2), F(3, 8))

    def test_stub_inverts_uniform(self):
        ps = iter([F(1, 2), F(1, 3), F(1, 2)])
        m = generate_canonical(3, p_sampler=lambda a, b: next(ps))
        assert m.values == (F(1), F(1, 2), F(1, 3), F(1, 4))

    def test_always_interior(self, rng):
        for _ in range(20):
            m = generate_canonical(10, rng)
            assert hankel_report(m).classification == INTERIOR

    def test_extension_keeps_prefix(self, rng):
        prefix = MomentSequence((F(1), F(1, 2), F(1, 3), F(1, 4)))
        m = extend_canonical(prefix, 8, rng)
        assert m.n == 8
        assert m.values[:4] == prefix.values
        assert hankel_report(m).classification == INTERIOR

    def test_beta_shape_schedule(self, rng):
        # step k of a length-N run draws Beta(N-k+1, N-k+1)
        seen = []
        def spy(a, b):
            seen.append((a, b))
            return F(1, 2)
        generate_canonical(4, rng, p_sampler=spy)
        assert seen == [(4, 4), (3, 3), (2, 2), (1, 1)]


class TestBetaSampler:
    def test_symmetric_mean(self, rng):
        draws = np.array([beta_sampler(2.0, 2.0, rng) for _ in range(100_000)])
        assert abs(draws.mean() - 0.5) < 0.01

    def test_uniform_variance(self, rng):
        draws = np.array([beta_sampler(1.0, 1.0, rng) for _ in range(100_000)])
        assert abs(draws.var() - 1 / 12) < 0.005

    def test_open_interval(self, rng):
        draws = [beta_sampler(5.0, 5.0, rng) for _ in range(2000)]
        assert all(0.0 < d < 1.0 for d in draws)

    def test_fractional_shapes(self, rng):
        # a < 1 exercises the boost branch; Beta(1/2,1/2) mean is 1/2
        draws = np.array([beta_sampler(0.5, 0.5, rng) for _ in range(50_000)])
        assert abs(draws.mean() - 0.5) < 0.01


def _classification_digits(m: MomentSequence) -> int:
    """Digits so interior Hankel determinants clear the 10^(8-p) zero band."""
    total = 0.0
    for v in m.values[1:]:
        fv = float(v)
        if fv > 0:
            total += max(0.0, -math.log10(fv))
        else:
            total += 300.0
    return 60 + int(math.ceil(1.2 * total))


def _regen_and_classify(maker, n):
    digits = 80
    for _ in range(3):
        with working_digits(digits):
            m = maker(digits)
        need = _classification_digits(m)
        if need <= digits:
            break
        digits = need
    with working_digits(digits):
        return hankel_report(m, digits=digits)


class TestGeneratorValidity:
    def test_canonical_interior(self, rng):
        for _ in range(TRIALS):
            n = int(rng.integers(1, 21))
            assert hankel_report(generate_canonical(n, rng)).classification == INTERIOR

    @pytest.mark.parametrize("decay_class", DECAY_CLASSES)
    def test_cm_classes_never_invalid(self, decay_class, rng):
        trials = max(10, TRIALS // 6)
        for _ in range(trials):
            n = int(rng.integers(1, 21))
            spec = random_decay_spec(decay_class, rng)
            rep = _regen_and_classify(lambda d: decay_moments(spec, n, digits=d), n)
            if decay_class == "exponential":
                # discrete mixtures go unique-discrete past order 2N-1
                assert rep.classification != INVALID
            else:
                assert rep.classification == INTERIOR

    def test_beta_mixture_interior(self, rng):
        trials = max(20, TRIALS // 3)
        for _ in range(trials):
            n = int(rng.integers(1, 21))
            spec = random_beta_mixture_spec(rng)
            rep = _regen_and_classify(
                lambda d: beta_mixture_moments(spec, n, digits=d), n)
            assert rep.classification == INTERIOR

    def test_m0_exactly_one(self, rng):
        specs = [random_decay_spec("power", rng), random_beta_mixture_spec(rng)]
        assert float(decay_moments(specs[0], 5).values[0]) == 1.0
        assert float(beta_mixture_moments(specs[1], 5).values[0]) == 1.0
        assert generate_canonical(5, rng).values[0] == F(1)


class TestCmMoment:
    def test_power_single_component_is_uniform(self):
        spec = DecaySpec("power", (DecayComponent(1.0, 1.0, 1.0, 1.0),))
        for n in range(8):
            assert float(cm_moment(spec, float(n))) == pytest.approx(1 / (n + 1),
                                                                     rel=1e-14)

    @pytest.mark.parametrize("decay_class", DECAY_CLASSES)
    def test_z_zero_is_one(self, decay_class, rng):
        spec = random_decay_spec(decay_class, rng)
        assert float(cm_moment(spec, 0.0)) == 1.0
        assert complex(cm_moment(spec, 0j)) == pytest.approx(1.0 + 0j, abs=1e-12)

    def test_exponential_single_is_point_mass(self):
        spec = DecaySpec("exponential", (DecayComponent(math.log(2), 1.0, 1.0, 1.0),))
        for n in range(6):
            assert float(cm_moment(spec, float(n))) == pytest.approx(0.5 ** n,
                                                                     rel=1e-14)

    @pytest.mark.parametrize("decay_class", DECAY_CLASSES)
    def test_complex_real_consistency(self, decay_class, rng):
        spec = random_decay_spec(decay_class, rng)
        for k in (1, 3, 7):
            real_path = float(cm_moment(spec, float(k)))
            complex_path = complex(cm_moment(spec, complex(k, 0.0)))
            assert complex_path == pytest.approx(real_path + 0j, rel=1e-12)

    def test_complete_monotonicity_spot_check(self, rng):
        for decay_class in DECAY_CLASSES:
            spec = random_decay_spec(decay_class, rng)
            m = [float(cm_moment(spec, float(k))) for k in range(21)]
            for j in range(6):
                diffs = np.diff(m, n=j)
                signed = (-1) ** j * diffs
                assert np.min(signed[:16]) >= -1e-12


class TestRandomDecaySpec:
    def test_power_class_draws(self, rng):
        for _ in range(10_000):
            spec = random_decay_spec("power", rng)
            assert 0.0 < spec.rate < 10.0
            assert abs(sum(c.c for c in spec.components) - 1.0) <= 1e-12
            assert 1 <= len(spec.components) <= 10

    def test_exponential_rates_dominate(self, rng):
        for _ in range(10_000):
            spec = random_decay_spec("exponential", rng)
            s = spec.rate
            assert all(c.s >= s for c in spec.components)

    def test_fixed_seed_reproducible(self):
        a = random_decay_spec("soft_power", np.random.default_rng(123))
        b = random_decay_spec("soft_power", np.random.default_rng(123))
        assert a == b and a.to_json() == b.to_json()

    def test_json_roundtrip(self, rng):
        spec = random_decay_spec("intermediate", rng)
        assert DecaySpec.from_json(spec.to_json()) == spec


class TestBetaMixture:
    def test_uniform_component(self):
        spec = BetaMixtureSpec((1.0,), (1.0,), (1.0,))
        assert float(beta_mixture_moment(spec, 5)) == pytest.approx(1 / 6, rel=1e-14)

    def test_moment_zero(self, rng):
        spec = random_beta_mixture_spec(rng)
        assert float(beta_mixture_moment(spec, 0)) == 1.0

    @pytest.mark.parametrize("a,b", [(0.5, 2.7), (3.0, 1.0)])
    def test_product_vs_gamma_ratio(self, a, b):
        spec = BetaMixtureSpec((a,), (b,), (1.0,))
        for n in range(1, 31):
            prod = float(beta_mixture_moment(spec, n))
            ratio = complex(beta_mixture_moment(spec, complex(n, 0.0))).real
            assert ratio == pytest.approx(prod, rel=1e-12)

    def test_char_modulus_bounded(self, rng):
        # |m_{js}| <= 1: characteristic function of log X
        spec = random_beta_mixture_spec(rng)
        fn = beta_mixture_char_fn(spec)
        s = np.linspace(0.0, 200.0, 400)[1:]
        assert np.max(np.abs(fn(s))) <= 1.0 + 1e-12

    def test_cdf_uniform(self):
        spec = BetaMixtureSpec((1.0,), (1.0,), (1.0,))
        assert beta_mixture_cdf(spec, 0.3) == pytest.approx(0.3, abs=1e-13)

    def test_cdf_endpoints_and_symmetry(self, rng):
        spec = random_beta_mixture_spec(rng)
        assert beta_mixture_cdf(spec, 1.0) == 1.0
        sym = BetaMixtureSpec((2.0,), (2.0,), (1.0,))
        assert beta_mixture_cdf(sym, 0.5) == pytest.approx(0.5, abs=1e-13)

    def test_cdf_matches_scipy(self, rng):
        for _ in range(20):
            spec = random_beta_mixture_spec(rng)
            x = rng.random()
            ref = sum(c * betainc(a, b, x)
                      for a, b, c in zip(spec.a, spec.b, spec.c)) / sum(spec.c)
            assert beta_mixture_cdf(spec, x) == pytest.approx(ref, abs=1e-12)

    def test_json_roundtrip(self, rng):
        spec = random_beta_mixture_spec(rng)
        assert BetaMixtureSpec.from_json(spec.to_json()) == spec


class TestCharFromIntegerMoments:
    def test_uniform_matches_closed_form(self):
        m = MomentSequence(tuple(F(1, k + 1) for k in range(21)))
        got = char_from_integer_moments(m, 1.0)
        exact = (cmath.exp(1j) - 1.0) / 1j
        assert abs(got - exact) < 1e-10

    def test_s_zero(self):
        m = MomentSequence(tuple(F(1, k + 1) for k in range(4)))
        assert char_from_integer_moments(m, 0.0) == 1.0 + 0j

    def test_point_mass_within_paper_bound(self):
        m = MomentSequence(tuple(F(1, 2) ** k for k in range(11)))
        got = char_from_integer_moments(m, 2.0)
        assert abs(got - cmath.exp(1j)) <= math.sqrt(2 / (10 * math.pi))

    def test_warns_below_required_length(self):
        m = MomentSequence(tuple(F(1, k + 1) for k in range(5)))
        with pytest.warns(UserWarning):
            char_from_integer_moments(m, 10.0)

    def test_precision_guard(self):
        from hmt.numerics import PrecisionInsufficientError
        m = MomentSequence(tuple(F(1, k + 1) for k in range(140)))
        with pytest.raises(PrecisionInsufficientError):
            char_from_integer_moments(m, 50.0, digits=16)
