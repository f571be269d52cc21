"""Shared numeric substrate.

Extended-precision scalars are mpmath ``mpf``/``mpc`` values used under a
``working_digits`` context; exact rationals are ``fractions.Fraction``.
On top of those this module provides Gauss-Legendre quadrature, stable
evaluation of shifted Jacobi polynomials (three-term recurrence, with the
binomial-sum form kept only as a cross-check oracle), a principal-branch
complex log-gamma, the regularized incomplete beta function, and a damped
Newton minimizer for smooth convex objectives.
"""

from __future__ import annotations

import cmath
import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np
from numpy.polynomial.legendre import leggauss

MIN_DIGITS = 16
DEFAULT_DIGITS = 64


class PoleError(ArithmeticError):
    """Raised when log-gamma is evaluated at a nonpositive integer."""


class PrecisionInsufficientError(ArithmeticError):
    """Working precision is below the digit requirement of an operation."""


class DomainError(ValueError):
    """Raised when a special-function parameter is out of range."""


@contextmanager
def working_digits(digits: int | None):
    """Context manager setting the mpmath working precision in decimal digits.

    ``None`` keeps the current precision. Precision below MIN_DIGITS is
    rejected: arithmetic at p digits carries relative error ~10^(1-p) per
    operation and nothing in this package is meaningful below double.
    """
    if digits is None:
        yield mpmath.mp.dps
        return
    digits = int(digits)
    if digits < MIN_DIGITS:
        raise ValueError(f"precision must be >= {MIN_DIGITS} digits, got {digits}")
    with mpmath.workdps(digits):
        yield digits


def to_mpf(x) -> mpmath.mpf:
    """Convert float/int/Fraction/str/mpf to mpf at the current precision."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


# ----------------------------------------------------------------------
# Quadrature
# ----------------------------------------------------------------------

def gauss_legendre(f: Callable[[float], float], a: float, b: float, order: int) -> float:
    """Integrate f on [a, b] with an ``order``-point Gauss-Legendre rule.

    Exact for polynomials of degree <= 2*order - 1.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    nodes, weights = leggauss(order)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid + half * nodes
    fx = np.asarray([f(t) for t in x], dtype=float)
    return float(half * np.dot(weights, fx))


def gauss_legendre_nodes(a: float, b: float, order: int):
    """Nodes and weights on [a, b] for vectorized integrands."""
    nodes, weights = leggauss(order)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * nodes, half * weights


# ----------------------------------------------------------------------
# Shifted Jacobi polynomials R_n^(alpha,beta)(x) = P_n^(alpha,beta)(2x-1)
# ----------------------------------------------------------------------

def _check_jacobi_params(alpha: float, beta: float) -> None:
    if alpha <= -1 or beta <= -1:
        raise DomainError(f"Jacobi parameters must exceed -1, got ({alpha}, {beta})")


def shifted_jacobi(alpha: float, beta: float, n: int, x):
    """R_n^(alpha,beta)(x) on [0,1] by the three-term recurrence.

    Vectorized over x. The recurrence is the numerically stable route; the
    binomial sum cancels catastrophically for n beyond ~20.
    """
    _check_jacobi_params(alpha, beta)
    if n < 0:
        raise ValueError("degree must be >= 0")
    return _jacobi_all(alpha, beta, n, x)[-1]


def shifted_jacobi_all(alpha: float, beta: float, nmax: int, x) -> np.ndarray:
    """All R_0..R_nmax at x, shape (nmax+1,) + shape(x)."""
    _check_jacobi_params(alpha, beta)
    return np.asarray(_jacobi_all(alpha, beta, nmax, x))


def _jacobi_all(alpha: float, beta: float, nmax: int, x):
    t = 2.0 * np.asarray(x, dtype=float) - 1.0
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = [np.ones_like(t)]
    if nmax >= 1:
        out.append((alpha + 1.0) + (alpha + beta + 2.0) * 0.5 * (t - 1.0))
    ab = alpha + beta
    for k in range(2, nmax + 1):
        c1 = 2.0 * k * (k + ab) * (2.0 * k + ab - 2.0)
        c2 = (2.0 * k + ab - 1.0) * (alpha * alpha - beta * beta)
        c3 = (2.0 * k + ab - 1.0) * (2.0 * k + ab) * (2.0 * k + ab - 2.0)
        c4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + ab)
        out.append(((c2 + c3 * t) * out[k - 1] - c4 * out[k - 2]) / c1)
    if scalar:
        return [float(p[0]) for p in out]
    return out


def shifted_jacobi_binomial(alpha: float, beta: float, n: int, x: float) -> float:
    """Binomial-sum definition of R_n; cross-check oracle only.

    R_n(x) = sum_j C(n+alpha, j) C(n+beta, n-j) (x-1)^(n-j) x^j.
    """
    _check_jacobi_params(alpha, beta)
    total = 0.0
    for j in range(n + 1):
        total += (_gbinom(n + alpha, j) * _gbinom(n + beta, n - j)
                  * (x - 1.0) ** (n - j) * x ** j)
    return total


def _gbinom(a: float, k: int) -> float:
    """Generalized binomial coefficient C(a, k) for integer k >= 0."""
    out = 1.0
    for r in range(k):
        out *= (a - r) / (k - r)
    return out


def jacobi_norm(alpha: float, beta: float, n: int) -> float:
    """eta_n^(alpha,beta) = integral of w^(alpha,beta) R_n^2 over [0,1]."""
    _check_jacobi_params(alpha, beta)
    if n == 0:
        # (2n+alpha+beta+1)*Gamma(n+alpha+beta+1) degenerates to Gamma(alpha+beta+2)
        return math.exp(math.lgamma(beta + 1.0) + math.lgamma(alpha + 1.0)
                        - math.lgamma(alpha + beta + 2.0))
    lg = (math.lgamma(n + 1.0 + beta) + math.lgamma(n + alpha + 1.0)
          - math.lgamma(n + 1.0) - math.lgamma(n + alpha + beta + 1.0))
    return math.exp(lg) / (2.0 * n + alpha + beta + 1.0)


def shifted_jacobi_sum(coeffs: Sequence[float], alpha: float, beta: float, x) -> np.ndarray:
    """Partial sum sum_m coeffs[m] R_m^(alpha,beta)(x), vectorized over x."""
    polys = shifted_jacobi_all(alpha, beta, len(coeffs) - 1, x)
    c = np.asarray(coeffs, dtype=float)
    return np.tensordot(c, polys, axes=(0, 0))


# ----------------------------------------------------------------------
# Complex log-gamma (Lanczos g=7, 15 coefficients)
# ----------------------------------------------------------------------

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def complex_log_gamma(z) -> complex:
    """Principal branch of log Gamma(z) for complex z.

    Lanczos (g=7) for Re z >= 0.5, recurrence shift on 0 < Re z < 0.5, and
    reflection otherwise. Relative error <= 1e-13 for |z| <= 1e3 away from
    the poles at nonpositive integers.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real == math.floor(z.real) and z.real <= 0.0:
        raise PoleError(f"log-gamma pole at z = {z.real}")
    return _clgamma(z)


def _clgamma(z: complex) -> complex:
    if z.real >= 0.5:
        return _clgamma_lanczos(z)
    if z.real > 0.0:
        # one shift keeps the principal branch (valid on the right half-plane)
        return _clgamma_lanczos(z + 1.0) - cmath.log(z)
    # reflection: log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z)
    return cmath.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) - _clgamma(1.0 - z)


def _clgamma_lanczos(z: complex) -> complex:
    z = z - 1.0
    acc = complex(_LANCZOS_COEF[0])
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return 0.5 * math.log(2.0 * math.pi) + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


# ----------------------------------------------------------------------
# Regularized incomplete beta (Lentz continued fraction)
# ----------------------------------------------------------------------

def reg_inc_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), the Beta(a, b) cdf at x, for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise DomainError("incomplete beta requires a, b > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    # symmetry switch keeps the continued fraction in its fast-converging regime
    if x > (a + 1.0) / (a + b + 2.0):
        return 1.0 - reg_inc_beta(b, a, 1.0 - x)
    ln_front = (a * math.log(x) + b * math.log1p(-x) - math.log(a)
                - (math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)))
    return math.exp(ln_front) * _beta_cf(a, b, x)


def _beta_cf(a: float, b: float, x: float, max_iter: int = 300, eps: float = 1e-16) -> float:
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    return h  # converged to working accuracy in practice; caller tolerances absorb the rest


# ----------------------------------------------------------------------
# Damped Newton minimizer
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class NewtonResult:
    x: np.ndarray
    grad_norm: float
    converged: bool
    iterations: int
    condition: float
    reason: str  # "converged" | "max_iter" | "ill_conditioned" | "line_search"


def newton_minimize(f: Callable[[np.ndarray], float],
                    grad: Callable[[np.ndarray], np.ndarray],
                    hess: Callable[[np.ndarray], np.ndarray],
                    x0: Sequence[float],
                    tol: float = 1e-10,
                    max_iter: int = 100,
                    cond_limit: float = 1e12) -> NewtonResult:
    """Minimize a smooth convex f by damped Newton steps.

    Convergence is declared iff the final gradient norm is <= tol; the result
    always reports the final gradient norm and a Hessian condition estimate.
    Steps are halved until f decreases; a Hessian with condition estimate
    above cond_limit stops the iteration with reason "ill_conditioned".
    """
    x = np.asarray(x0, dtype=float).copy()
    fx = f(x)
    cond = 0.0
    for it in range(1, max_iter + 1):
        g = np.asarray(grad(x), dtype=float)
        gnorm = float(np.linalg.norm(g))
        if gnorm <= tol:
            return NewtonResult(x, gnorm, True, it - 1, cond, "converged")
        H = np.asarray(hess(x), dtype=float)
        cond = float(np.linalg.cond(H))
        if not np.isfinite(cond) or cond > cond_limit:
            return NewtonResult(x, gnorm, False, it - 1, cond, "ill_conditioned")
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            return NewtonResult(x, gnorm, False, it - 1, math.inf, "ill_conditioned")
        t = 1.0
        for _ in range(60):
            x_new = x + t * step
            f_new = f(x_new)
            if np.isfinite(f_new) and f_new <= fx - 1e-4 * t * abs(g @ step):
                break
            t *= 0.5
        else:
            return NewtonResult(x, gnorm, False, it, cond, "line_search")
        x, fx = x_new, f_new
    g = np.asarray(grad(x), dtype=float)
    gnorm = float(np.linalg.norm(g))
    return NewtonResult(x, gnorm, gnorm <= tol, max_iter, cond,
                        "converged" if gnorm <= tol else "max_iter")
