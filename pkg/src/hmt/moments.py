"""Moment sequences on [0,1]: Hankel validity, feasible ranges, canonical moments.

A sequence (m_0, ..., m_n) with m_0 = 1 is classified through the two
families of Hankel determinants: it is *interior* (infinitely many
solutions) when all are strictly positive, *unique-discrete* when the first
zero appears at some order, and *invalid* when any determinant is negative.
Determinants are exact (fraction-free Bareiss) on rational input and LU at
the working precision otherwise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .numerics import to_mpf

INVALID = "invalid"
UNIQUE_DISCRETE = "unique_discrete"
INTERIOR = "interior"


class DegeneratePrefixError(ValueError):
    """Prefix is not interior: the next moment has no open feasible range."""


class WeightSumError(ValueError):
    """Discrete weights do not sum to one."""


def _is_exact(values) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in values)


@dataclass(frozen=True)
class MomentSequence:
    """Finite moment sequence (m_0..m_n) of a distribution on [0,1].

    Values may be Fractions (exact) or floats/mpf (inexact). m_0 must be 1
    and every value must lie in [0,1]. Monotone nonincrease is a consequence
    of validity (the upper Hankel conditions), established by hankel_report,
    not a construction precondition: candidate sequences that violate it
    must still be classifiable as invalid.
    """
    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 1:
            raise ValueError("moment sequence needs at least m_0")
        slack = 0 if _is_exact(vals) else 1e-9
        if abs(float(vals[0]) - 1.0) > slack:
            raise ValueError("m_0 must equal 1")
        for k, v in enumerate(vals):
            fv = float(v)
            if not (-slack <= fv <= 1.0 + slack):
                raise ValueError(f"m_{k} = {fv} outside [0,1]")

    @property
    def n(self) -> int:
        return len(self.values) - 1

    @property
    def exact(self) -> bool:
        return _is_exact(self.values)

    def truncated(self, order: int) -> "MomentSequence":
        if order > self.n:
            raise ValueError(f"cannot truncate order {self.n} to {order}")
        return MomentSequence(self.values[: order + 1])

    def as_floats(self):
        return [float(v) for v in self.values]

    def as_fractions(self):
        return [v if isinstance(v, Fraction) else Fraction(v) for v in self.values]

    def as_mpf(self):
        return [to_mpf(v) for v in self.values]

    def to_json(self) -> str:
        out = []
        for v in self.values:
            if isinstance(v, (Fraction, int)):
                f = Fraction(v)
                out.append(f"{f.numerator}/{f.denominator}")
            elif isinstance(v, mpmath.mpf):
                out.append(mpmath.nstr(v, mpmath.mp.dps, strip_zeros=True))
            else:
                out.append(repr(float(v)))
        return json.dumps(out)

    @staticmethod
    def from_json(text: str) -> "MomentSequence":
        raw = json.loads(text)
        vals = []
        for s in raw:
            if isinstance(s, str) and "/" in s:
                vals.append(Fraction(s))
            elif isinstance(s, str):
                vals.append(mpmath.mpf(s) if mpmath.mp.dps > 17 else float(s))
            else:
                vals.append(float(s))
        return MomentSequence(tuple(vals))


@dataclass(frozen=True)
class HankelReport:
    lower: tuple
    upper: tuple
    classification: str
    discrete_index: int | None = None


@dataclass(frozen=True)
class MomentBounds:
    lower: object
    upper: object


@dataclass(frozen=True)
class CanonicalMoments:
    p: tuple


# ----------------------------------------------------------------------
# Determinants
# ----------------------------------------------------------------------

def det_exact(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by fraction-free Bareiss elimination."""
    k = len(rows)
    if k == 0:
        return Fraction(1)
    # clear denominators row by row; Bareiss then runs on integers
    scale = Fraction(1)
    M: list[list[int]] = []
    for row in rows:
        fr = [Fraction(v) for v in row]
        den = math.lcm(*(f.denominator for f in fr)) if fr else 1
        scale *= den
        M.append([int(f * den) for f in fr])
    sign = 1
    prev = 1
    for i in range(k - 1):
        if M[i][i] == 0:
            swap = next((r for r in range(i + 1, k) if M[r][i] != 0), None)
            if swap is None:
                return Fraction(0)
            M[i], M[swap] = M[swap], M[i]
            sign = -sign
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                M[r][c] = (M[r][c] * M[i][i] - M[r][i] * M[i][c]) // prev
            M[r][i] = 0
        prev = M[i][i]
    return Fraction(sign * M[k - 1][k - 1]) / scale


def det_mpf(rows) -> mpmath.mpf:
    """Determinant by LU with partial pivoting at the current mpmath precision."""
    k = len(rows)
    if k == 0:
        return mpmath.mpf(1)
    M = [[to_mpf(v) for v in row] for row in rows]
    det = mpmath.mpf(1)
    for i in range(k):
        piv = max(range(i, k), key=lambda r: abs(M[r][i]))
        if M[piv][i] == 0:
            return mpmath.mpf(0)
        if piv != i:
            M[i], M[piv] = M[piv], M[i]
            det = -det
        det *= M[i][i]
        inv = 1 / M[i][i]
        for r in range(i + 1, k):
            f = M[r][i] * inv
            if f != 0:
                for c in range(i + 1, k):
                    M[r][c] -= f * M[i][c]
    return det


# ----------------------------------------------------------------------
# Hankel matrices and classification
# ----------------------------------------------------------------------

def _hankel_lower_matrix(m: Sequence, l: int):
    """Matrix whose determinant is H_lower_l."""
    if l % 2 == 0:
        h = l // 2
        return [[m[i + j] for j in range(h + 1)] for i in range(h + 1)]
    h = (l - 1) // 2
    return [[m[1 + i + j] for j in range(h + 1)] for i in range(h + 1)]


def _hankel_upper_matrix(m: Sequence, l: int):
    """Matrix whose determinant is H_upper_l."""
    if l % 2 == 0:
        h = l // 2 - 1
        return [[m[1 + i + j] - m[2 + i + j] for j in range(h + 1)] for i in range(h + 1)]
    h = (l - 1) // 2
    return [[m[i + j] - m[1 + i + j] for j in range(h + 1)] for i in range(h + 1)]


def hankel_determinants(m: MomentSequence, digits: int | None = None):
    """All (H_lower_l, H_upper_l) for l in 1..n; exact on rational input."""
    vals = m.values
    if m.exact:
        det = det_exact
        seq: list = [Fraction(v) for v in vals]
    else:
        det = det_mpf
        seq = m.as_mpf()
    lower = [det(_hankel_lower_matrix(seq, l)) for l in range(1, m.n + 1)]
    upper = [det(_hankel_upper_matrix(seq, l)) for l in range(1, m.n + 1)]
    return lower, upper


def hankel_report(m: MomentSequence, digits: int | None = None) -> HankelReport:
    """Classify a moment sequence through its Hankel determinants.

    A determinant is treated as zero on inexact input when its magnitude is
    at most 10^(8-p) for p working digits; exact input is classified exactly.
    """
    lower, upper = hankel_determinants(m)
    if m.exact:
        zero_tol = None
    else:
        p = digits if digits is not None else mpmath.mp.dps
        zero_tol = mpmath.mpf(10) ** (8 - p)

    def sgn(d) -> int:
        if zero_tol is None:
            return 0 if d == 0 else (1 if d > 0 else -1)
        if abs(d) <= zero_tol:
            return 0
        return 1 if d > 0 else -1

    classification = INTERIOR
    discrete_index = None
    for l in range(1, m.n + 1):
        s_lo, s_up = sgn(lower[l - 1]), sgn(upper[l - 1])
        if s_lo < 0 or s_up < 0:
            classification = INVALID
            discrete_index = None
            break
        if (s_lo == 0 or s_up == 0) and discrete_index is None:
            discrete_index = l
    if classification != INVALID and discrete_index is not None:
        classification = UNIQUE_DISCRETE
    return HankelReport(tuple(lower), tuple(upper), classification, discrete_index)


# ----------------------------------------------------------------------
# Feasible range of the next moment, canonical moments
# ----------------------------------------------------------------------

def moment_bounds(prefix: MomentSequence) -> MomentBounds:
    """Feasible range [m_n^-, m_n^+] of the next moment given an interior prefix.

    Both order-n Hankel determinants are affine in m_n (it enters only the
    corner entry), so each bound is the root of a linear function obtained by
    evaluating the determinant at two trial values.
    """
    n = prefix.n + 1
    if n == 1:
        one = Fraction(1) if prefix.exact else 1.0
        return MomentBounds(one * 0, one)
    rep = hankel_report(prefix)
    if rep.classification != INTERIOR:
        raise DegeneratePrefixError(
            f"prefix of order {prefix.n} is {rep.classification}, not interior")

    vals = list(prefix.as_fractions()) if prefix.exact else prefix.as_mpf()
    det = det_exact if prefix.exact else det_mpf
    zero = Fraction(0) if prefix.exact else mpmath.mpf(0)
    one = Fraction(1) if prefix.exact else mpmath.mpf(1)

    def affine_root(matrix_fn):
        d0 = det(matrix_fn(vals + [zero], n))
        d1 = det(matrix_fn(vals + [one], n))
        slope = d1 - d0
        if slope == 0:
            raise DegeneratePrefixError("degenerate affine determinant")
        return -d0 / slope

    lower = affine_root(_hankel_lower_matrix)
    upper = affine_root(_hankel_upper_matrix)
    if not prefix.exact:
        lower, upper = float(lower), float(upper)
    if lower > upper:
        raise DegeneratePrefixError("empty feasible range for the next moment")
    return MomentBounds(lower, upper)


def canonical_moments(m: MomentSequence) -> CanonicalMoments:
    """p_k = (m_k - m_k^-)/(m_k^+ - m_k^-) for k = 1..n."""
    ps = []
    for k in range(1, m.n + 1):
        b = moment_bounds(m.truncated(k - 1))
        width = b.upper - b.lower
        if width <= 0:
            raise DegeneratePrefixError(f"no open range at order {k}")
        ps.append((m.values[k] - b.lower) / width)
    return CanonicalMoments(tuple(ps))


def moments_from_canonical(p: Sequence) -> MomentSequence:
    """Rebuild (1, m_1, ..., m_n) from canonical moments (Algorithm 1 update)."""
    exact = all(isinstance(v, (Fraction, int)) for v in p)
    one = Fraction(1) if exact else 1.0
    vals = [one]
    for pk in p:
        b = moment_bounds(MomentSequence(tuple(vals)))
        vals.append(b.lower + pk * (b.upper - b.lower))
    return MomentSequence(tuple(vals))


def discrete_moments(atoms: Sequence, weights: Sequence, n: int) -> MomentSequence:
    """Moments m_k = sum_i w_i x_i^k of a discrete measure on [0,1]."""
    if len(atoms) != len(weights):
        raise ValueError("atoms and weights must have equal length")
    exact = _is_exact(atoms) and _is_exact(weights)
    total = sum(Fraction(w) for w in weights) if exact else float(sum(weights))
    if exact:
        if total != 1:
            raise WeightSumError(f"weights sum to {total}, not 1")
        xs = [Fraction(a) for a in atoms]
        ws = [Fraction(w) for w in weights]
        vals = [sum(w * x ** k for x, w in zip(xs, ws)) for k in range(n + 1)]
    else:
        if abs(total - 1.0) > 1e-12:
            raise WeightSumError(f"weights sum to {total}, not 1")
        xs = [float(a) for a in atoms]
        ws = [float(w) for w in weights]
        vals = [math.fsum(w * x ** k for x, w in zip(xs, ws)) for k in range(n + 1)]
        vals[0] = 1.0
    return MomentSequence(tuple(vals))
