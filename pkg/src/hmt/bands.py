"""Chebyshev-Markov envelope of F(x0) over all solutions, by linear programming.

For each grid point x0 the extremal values of F(x0) are reached by discrete
measures with at most floor(n/2)+1 atoms, so minimizing / maximizing the
mass at or below x0 over nonnegative weights on a fine support grid (which
always contains {0, 1} and every query point) converges to the true
envelope as the support refines. Two details make this robust:

* constraints are expressed in the shifted-Legendre basis,
  sum_i w_i R_k(s_i) = mu_k with mu = T m computed in extended precision
  (T the exact integer coefficient matrix); the feasible set is identical
  to the power-moment constraints but the LP is well conditioned;
* each equality is relaxed to a +/- lp_tol window, so sequences at the
  boundary of the moment body (discrete distributions) remain solvable on
  a grid that misses their atoms; the relaxation only widens the band by
  O(lp_tol).

An atom of an extremal measure placed exactly at x0 counts fully toward
F(x0) (cdfs are right-continuous), which is why x0 itself joins the support.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from . import lp
from .moments import MomentSequence
from .numerics import working_digits, to_mpf
from .transforms import required_digits
from .polish import SampledCdf


class InfeasibleMomentsError(ValueError):
    """The sequence is not a valid moment sequence at the LP tolerance."""


@dataclass(frozen=True)
class CMBand:
    """Pointwise envelope: inf[i] <= F(grid[i]) <= sup[i] for every solution F."""
    grid: np.ndarray
    inf: np.ndarray
    sup: np.ndarray
    lp_tol: float
    converged: bool
    achieved_tol: float
    n: int


def band_width(band: CMBand) -> np.ndarray:
    """sup - inf pointwise; |F_CM - F| <= width/2 for every solution F."""
    return band.sup - band.inf


_legendre_coeff_cache: dict[int, list[list[int]]] = {}


def legendre_coeff_matrix(n: int) -> list[list[int]]:
    """Integer coefficients T[k][l] of x^l in the shifted Legendre R_k."""
    if n in _legendre_coeff_cache:
        return _legendre_coeff_cache[n]
    rows: list[list[Fraction]] = [[Fraction(1)]]
    if n >= 1:
        rows.append([Fraction(-1), Fraction(2)])
    for k in range(2, n + 1):
        prev, prev2 = rows[k - 1], rows[k - 2]
        coef = [Fraction(0)] * (k + 1)
        for l, c in enumerate(prev):
            coef[l + 1] += 2 * (2 * k - 1) * c
            coef[l] -= (2 * k - 1) * c
        for l, c in enumerate(prev2):
            coef[l] -= (k - 1) * c
        rows.append([c / k for c in coef])
    out = [[int(c) for c in row] + [0] * (n - len(row) + 1) for row in rows]
    _legendre_coeff_cache[n] = out
    return out


def legendre_moments(m: MomentSequence, digits: int | None = None) -> np.ndarray:
    """mu_k = integral of R_k dF = sum_l T[k][l] m_l, in extended precision.

    The T entries grow like 3^n, so the contraction to the bounded mu_k
    (|mu_k| <= 1) must be carried at the FL digit requirement.
    """
    n = m.n
    T = legendre_coeff_matrix(n)
    digits = digits if digits is not None else max(64, required_digits("fl", max(n, 1)))
    with working_digits(digits):
        mv = m.as_mpf()
        return np.array([float(mpmath.fsum(T[k][l] * mv[l] for l in range(n + 1)
                                           if T[k][l]))
                         for k in range(n + 1)])


class _BandSolver:
    """Relaxed-window LP solves sharing one support grid and warm bases."""

    def __init__(self, mu: np.ndarray, support: np.ndarray, lp_tol: float,
                 simplex_tol: float = 1e-9):
        from .numerics import shifted_jacobi_all
        self.mu = mu
        self.support = support
        self.lp_tol = lp_tol
        self.simplex_tol = simplex_tol
        n_rows = mu.size
        M = support.size
        R = shifted_jacobi_all(0.0, 0.0, n_rows - 1, support)
        A = np.zeros((2 * n_rows, M + 2 * n_rows))
        A[:n_rows, :M] = R
        A[n_rows:, :M] = R
        A[:n_rows, M:M + n_rows] = np.eye(n_rows)
        A[n_rows:, M + n_rows:] = -np.eye(n_rows)
        self.A = A
        self.b = np.concatenate([mu + lp_tol, mu - lp_tol])
        self.M = M
        self._warm: dict[str, list[int] | None] = {"min": None, "max": None}
        feas = lp.solve_standard_form(self.A, self.b, np.zeros(A.shape[1]),
                                      tol=simplex_tol)
        self.feasible = feas.status == lp.OPTIMAL
        self._feas_basis = feas.basis if self.feasible else None

    def solve(self, x0: float, sense: str):
        """Extremal F(x0); returns (value, weights) or None on failure."""
        c = np.zeros(self.A.shape[1])
        c[: self.M][self.support <= x0] = 1.0
        if sense == "max":
            c = -c
        basis0 = self._warm[sense] or self._feas_basis
        res = lp.solve_standard_form(self.A, self.b, c, tol=self.simplex_tol,
                                     basis0=basis0)
        if res.status != lp.OPTIMAL:
            return None
        self._warm[sense] = res.basis
        value = res.value if sense == "min" else -res.value
        return value, res.x[: self.M]


def cm_band(m: MomentSequence, grid, support_grid_size: int = 2001,
            lp_tol: float = 1e-6, refine_cap: int = 4,
            digits: int | None = None) -> CMBand:
    """Chebyshev-Markov infima and suprema of F over the grid.

    The support grid starts at ``support_grid_size`` uniform points plus all
    query points and is doubled until the envelope moves by at most lp_tol,
    up to ``refine_cap`` doublings; if the cap is hit the best band is
    returned with converged=False and the achieved tolerance.
    """
    n = m.n
    if support_grid_size < 10 * (n + 1):
        raise ValueError("support_grid_size must be at least 10(n+1)")
    grid = np.unique(np.asarray(grid, dtype=float))
    if grid.min() < 0.0 or grid.max() > 1.0:
        raise ValueError("grid points must lie in [0,1]")
    mu = legendre_moments(m, digits=digits)
    support = np.unique(np.concatenate([np.linspace(0.0, 1.0, support_grid_size),
                                        grid]))
    prev = None
    best = None
    achieved = np.inf
    for level in range(refine_cap + 1):
        solver = _BandSolver(mu, support, lp_tol)
        cur = None
        if solver.feasible:
            inf = np.empty(grid.size)
            sup = np.empty(grid.size)
            ok = True
            for i, x0 in enumerate(grid):
                lo = solver.solve(float(x0), "min")
                hi = solver.solve(float(x0), "max")
                if lo is None or hi is None:
                    ok = False
                    break
                inf[i], sup[i] = lo[0], hi[0]
            if ok:
                cur = (inf, sup)
        if cur is not None:
            if prev is not None:
                achieved = max(float(np.max(np.abs(cur[0] - prev[0]))),
                               float(np.max(np.abs(cur[1] - prev[1]))))
                best = cur
                if achieved <= lp_tol:
                    return _finalize(m, grid, cur, lp_tol, True, achieved)
            else:
                best = cur
            prev = cur
        if level < refine_cap:
            mids = 0.5 * (support[:-1] + support[1:])
            support = np.unique(np.concatenate([support, mids]))
    if best is None:
        raise InfeasibleMomentsError(
            f"no discrete measure matches the moments within {lp_tol}")
    return _finalize(m, grid, best, lp_tol, False, achieved)


def _finalize(m, grid, envelopes, lp_tol, converged, achieved) -> CMBand:
    inf, sup = envelopes
    inf = np.clip(inf, 0.0, 1.0)
    sup = np.clip(sup, 0.0, 1.0)
    # true envelopes are nondecreasing; remove LP-noise wiggles
    inf = np.maximum.accumulate(inf)
    sup = np.maximum.accumulate(sup)
    inf = np.minimum(inf, sup)
    return CMBand(grid, inf, sup, lp_tol, converged,
                  float(achieved) if np.isfinite(achieved) else float("nan"), m.n)


def cm_extremal_measure(m: MomentSequence, x0: float, sense: str,
                        support_grid_size: int = 2001, lp_tol: float = 1e-6,
                        digits: int | None = None):
    """One extremal LP solve; returns (value, atoms, weights) certificate.

    The witness is the basic solution: at most n+1 atoms whose discrete
    moments reproduce m within lp_tol componentwise.
    """
    mu = legendre_moments(m, digits=digits)
    support = np.unique(np.concatenate([np.linspace(0.0, 1.0, support_grid_size),
                                        [float(x0)]]))
    solver = _BandSolver(mu, support, lp_tol)
    if not solver.feasible:
        raise InfeasibleMomentsError("moment constraints infeasible at lp_tol")
    out = solver.solve(float(x0), sense)
    if out is None:
        raise InfeasibleMomentsError("LP solve failed")
    value, w = out
    mask = w > 1e-12
    return value, support[mask], w[mask]


def cm_band_exact(m: MomentSequence, grid, support_grid_size: int = 201,
                  lp_tol: Fraction = Fraction(1, 10 ** 6)) -> CMBand:
    """Certified band via exact-rational simplex (single support level).

    Requires exact rational moments and modest order (n <= 12). The support
    is the uniform rational grid plus the query points; inf/sup are exact
    optima of the same relaxed-window LP, rounded to float only on output.
    """
    if not m.exact:
        raise ValueError("exact band needs exact rational moments")
    n = m.n
    if n > 12:
        raise ValueError("exact mode is for n <= 12")
    T = legendre_coeff_matrix(n)
    mv = m.as_fractions()
    mu = [sum(Fraction(T[k][l]) * mv[l] for l in range(n + 1)) for k in range(n + 1)]
    qgrid = [Fraction(g).limit_denominator(10 ** 9) for g in np.atleast_1d(grid)]
    support = sorted(set(Fraction(i, support_grid_size - 1)
                         for i in range(support_grid_size)) | set(qgrid))
    # R_k at rational support points, exactly
    rows = [[sum(Fraction(T[k][l]) * s ** l for l in range(n + 1)) for s in support]
            for k in range(n + 1)]
    M = len(support)
    nr = n + 1
    A = []
    for k in range(nr):
        A.append(rows[k] + [Fraction(int(i == k)) for i in range(nr)]
                 + [Fraction(0)] * nr)
    for k in range(nr):
        A.append(rows[k] + [Fraction(0)] * nr
                 + [-Fraction(int(i == k)) for i in range(nr)])
    b = [v + lp_tol for v in mu] + [v - lp_tol for v in mu]
    inf = []
    sup = []
    for x0 in qgrid:
        c = [Fraction(int(s <= x0)) for s in support] + [Fraction(0)] * (2 * nr)
        lo = lp.lp_solve_exact(c, A, b, sense="min")
        hi = lp.lp_solve_exact(c, A, b, sense="max")
        if lo.status != lp.OPTIMAL or hi.status != lp.OPTIMAL:
            raise InfeasibleMomentsError("exact LP infeasible")
        inf.append(float(lo.value))
        sup.append(float(hi.value))
    return _finalize(m, np.array([float(q) for q in qgrid]),
                     (np.array(inf), np.array(sup)), float(lp_tol), True, 0.0)


def band_to_csv(band: CMBand, path) -> None:
    width = band_width(band)
    with open(path, "w") as fh:
        fh.write("x,inf,sup,width\n")
        for x, lo, hi, w in zip(band.grid, band.inf, band.sup, width):
            fh.write(f"{x:.12g},{lo:.12g},{hi:.12g},{w:.12g}\n")


def cm_samples(m: MomentSequence, support_grid_size: int = 2001,
               lp_tol: float = 1e-6, refine_cap: int = 4) -> tuple[SampledCdf, CMBand]:
    """CM-average samples on U_n together with the band itself."""
    from .transforms import cm_average, uniform_grid
    band = cm_band(m, uniform_grid(m.n), support_grid_size=support_grid_size,
                   lp_tol=lp_tol, refine_cap=refine_cap)
    return cm_average(band), band
