"""Hausdorff moment transforms on [0,1]: library and benchmark harness."""

from .moments import (MomentSequence, HankelReport, MomentBounds, CanonicalMoments,
                      hankel_report, moment_bounds, canonical_moments,
                      discrete_moments, INTERIOR, UNIQUE_DISCRETE, INVALID,
                      DegeneratePrefixError, WeightSumError)
from .generators import (DecaySpec, DecayComponent, BetaMixtureSpec, DECAY_CLASSES,
                         generate_canonical, extend_canonical, beta_sampler,
                         cm_moment, decay_moments, random_decay_spec,
                         beta_mixture_moment, beta_mixture_moments,
                         beta_mixture_cdf, char_from_integer_moments)
from .transforms import (bm_matrix, bm_transform, bm_cdf, me_solve, me_cdf,
                         gp_cdf, gp_dynamic, fj_params, fj_coeffs, fj_cdf,
                         fl_matrix, fl_coeffs, fl_cdf, fc_coeffs, fc_cdf,
                         cm_average, required_digits, required_moment_digits,
                         MatrixCache, TransformMatrix, MEParams,
                         MemoryGuardError, DegenerateMomentsError, uniform_grid)
from .bands import CMBand, cm_band, band_width, InfeasibleMomentsError
from .polish import SampledCdf, PolishedCdf, tweak, mono_cubic, polish, \
    l1_distance, linf_distance
from .numerics import (gauss_legendre, shifted_jacobi, complex_log_gamma,
                       newton_minimize, reg_inc_beta, working_digits,
                       PrecisionInsufficientError)
from .lp import LPProblem, LPResult, lp_solve, lp_solve_exact

__version__ = "0.1.0"
