"""Dense linear programming for small moment problems.

Two-phase revised simplex over float64 with Dantzig pricing that switches
permanently to Bland's rule after a run of degenerate pivots (anti-cycling).
Problems here are tiny (tens of rows, a few thousand columns), so the basis
is refactorized every iteration; robustness beats speed.

An exact tableau simplex over ``fractions.Fraction`` (Bland's rule
throughout) is provided for certification of small instances.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg as sla


def _lu_factor(B):
    """LU factor that reports singularity instead of warning."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        return sla.lu_factor(B)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True)
class LPProblem:
    """min/max c.x subject to A x = b, x >= 0."""
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    sense: str = "min"

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))
        if self.A.ndim != 2 or self.A.shape != (self.b.size, self.c.size):
            raise ValueError("inconsistent LP dimensions")
        if self.sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")


@dataclass
class LPResult:
    status: str
    value: float | None = None
    x: np.ndarray | None = None
    iterations: int = 0
    basis: list[int] | None = None


def lp_solve(problem: LPProblem, tol: float = 1e-9, max_iter: int = 20000) -> LPResult:
    """Solve an LPProblem; status is one of optimal/infeasible/unbounded."""
    sign = 1.0 if problem.sense == "min" else -1.0
    res = solve_standard_form(problem.A, problem.b, sign * problem.c,
                              tol=tol, max_iter=max_iter)
    if res.status == OPTIMAL:
        res.value = sign * res.value
    return res


def _simplex_core(A, b, c, basis, tol, max_iter):
    """Iterate from a primal-feasible basis. Returns (status, x, basis, iters)."""
    m, n = A.shape
    basis = list(basis)
    bland = False
    stall = 0
    for it in range(1, max_iter + 1):
        try:
            lu = _lu_factor(A[:, basis])
        except (ValueError, sla.LinAlgError, sla.LinAlgWarning):
            return INFEASIBLE, None, basis, it
        xB = sla.lu_solve(lu, b)
        y = sla.lu_solve(lu, c[basis], trans=1)
        if not (np.all(np.isfinite(xB)) and np.all(np.isfinite(y))):
            return INFEASIBLE, None, basis, it
        r = c - A.T @ y
        r[basis] = 0.0
        cand = np.flatnonzero(r < -tol)
        if cand.size == 0:
            x = np.zeros(n)
            x[basis] = np.maximum(xB, 0.0)
            return OPTIMAL, x, basis, it
        j = int(cand[0]) if bland else int(cand[np.argmin(r[cand])])
        d = sla.lu_solve(lu, A[:, j])
        rows = np.flatnonzero(d > tol)
        if rows.size == 0:
            return UNBOUNDED, None, basis, it
        ratios = np.maximum(xB[rows], 0.0) / d[rows]
        theta = ratios.min()
        tied = rows[ratios <= theta + tol * (1.0 + theta)]
        labels = np.asarray([basis[i] for i in tied])
        leave = int(tied[np.argmin(labels)])
        basis[leave] = j
        if theta <= tol:
            stall += 1
            if stall > 3 * m + 20:
                bland = True
        else:
            stall = 0
    return ITERATION_LIMIT, None, basis, max_iter


def solve_standard_form(A, b, c, tol: float = 1e-9, max_iter: int = 20000,
                        basis0: Sequence[int] | None = None,
                        feas_tol: float | None = None) -> LPResult:
    """min c.x, A x = b, x >= 0. Two-phase unless a feasible basis is given."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    if feas_tol is None:
        feas_tol = 100.0 * tol * (1.0 + float(np.abs(b).max(initial=0.0)))

    if basis0 is not None:
        try:
            xB = sla.lu_solve(_lu_factor(A[:, list(basis0)]), b)
            warm_ok = (np.all(np.isfinite(xB))
                       and float(xB.min(initial=0.0)) >= -feas_tol)
        except (ValueError, sla.LinAlgError, sla.LinAlgWarning):
            warm_ok = False
        if warm_ok:
            status, x, basis, its = _simplex_core(A, b, c, basis0, tol, max_iter)
            if status == OPTIMAL:
                return LPResult(OPTIMAL, float(c @ x), x, its, basis)
            if status == UNBOUNDED:
                return LPResult(UNBOUNDED, iterations=its)
        # fall through to a cold start

    # Phase 1: minimize the sum of artificial variables
    flip = b < 0
    A1 = np.where(flip[:, None], -A, A)
    b1 = np.abs(b)
    A_ext = np.hstack([A1, np.eye(m)])
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    status, x1, basis, its1 = _simplex_core(A_ext, b1, c1, range(n, n + m), tol, max_iter)
    if status != OPTIMAL:
        return LPResult(INFEASIBLE, iterations=its1)
    resid = float(c1 @ x1)
    if resid > feas_tol:
        return LPResult(INFEASIBLE, value=resid, iterations=its1)

    # drive remaining artificials out; rows where that is impossible are redundant
    drop_rows: list[int] = []
    for pos in range(m):
        if basis[pos] < n:
            continue
        try:
            lu = _lu_factor(A_ext[:, basis])
        except (ValueError, sla.LinAlgError, sla.LinAlgWarning):
            drop_rows.append(pos)
            continue
        replaced = False
        for j in range(n):
            if j in basis:
                continue
            d = sla.lu_solve(lu, A_ext[:, j])
            if abs(d[pos]) > 1e-7:
                basis[pos] = j
                replaced = True
                break
        if not replaced:
            drop_rows.append(pos)
    if drop_rows:
        keep = [i for i in range(m) if i not in drop_rows]
        A1 = A1[keep]
        b1 = b1[keep]
        basis = [basis[i] for i in keep]

    status, x, basis, its2 = _simplex_core(A1, b1, c, basis, tol, max_iter)
    if status == OPTIMAL:
        return LPResult(OPTIMAL, float(c @ x), x, its1 + its2, basis)
    return LPResult(status, iterations=its1 + its2)


# ----------------------------------------------------------------------
# Exact simplex (Fraction tableau, Bland's rule throughout)
# ----------------------------------------------------------------------

def lp_solve_exact(c: Sequence, A: Sequence[Sequence], b: Sequence,
                   sense: str = "min", max_iter: int = 200000) -> LPResult:
    """Exact-rational simplex for certification of small instances.

    Same contract as lp_solve but every pivot is exact, so the optimum and
    witness are exact rationals. Intended for order <= 12 band certification.
    """
    sign = 1 if sense == "min" else -1
    cF = [sign * Fraction(v) for v in c]
    AF = [[Fraction(v) for v in row] for row in A]
    bF = [Fraction(v) for v in b]
    m, n = len(AF), len(cF)
    for i in range(m):
        if bF[i] < 0:
            AF[i] = [-v for v in AF[i]]
            bF[i] = -bF[i]
    # tableau columns: [original x | artificials | rhs]
    T = [AF[i] + [Fraction(int(i == k)) for k in range(m)] + [bF[i]] for i in range(m)]
    basis = list(range(n, n + m))
    iters = 0

    def pivot(row: int, col: int) -> None:
        piv = T[row][col]
        T[row] = [v / piv for v in T[row]]
        prow = T[row]
        for r in range(m):
            if r != row and T[r][col] != 0:
                f = T[r][col]
                T[r] = [a - f * p for a, p in zip(T[r], prow)]
        basis[row] = col

    def run(cost: list[Fraction], ncols: int) -> str:
        nonlocal iters
        while iters < max_iter:
            iters += 1
            in_basis = set(basis)
            cb = [cost[basis[r]] for r in range(m)]
            enter = None
            for j in range(ncols):  # Bland: first column with negative reduced cost
                if j in in_basis:
                    continue
                rj = cost[j] - sum(cb[r] * T[r][j] for r in range(m) if T[r][j] != 0)
                if rj < 0:
                    enter = j
                    break
            if enter is None:
                return OPTIMAL
            best = None
            for r in range(m):
                if T[r][enter] > 0:
                    ratio = T[r][-1] / T[r][enter]
                    key = (ratio, basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return UNBOUNDED
            pivot(best[1], enter)
        return ITERATION_LIMIT

    cost1 = [Fraction(0)] * n + [Fraction(1)] * m
    status = run(cost1, n + m)
    if status != OPTIMAL:
        return LPResult(status, iterations=iters)
    if sum(T[r][-1] for r in range(m) if basis[r] >= n) != 0:
        return LPResult(INFEASIBLE, iterations=iters)
    for r in range(m):
        if basis[r] >= n:
            col = next((j for j in range(n) if T[r][j] != 0), None)
            if col is not None:
                pivot(r, col)
    live = [r for r in range(m) if basis[r] < n]
    if len(live) < m:  # redundant rows: harmless, keep zero-level artificials fixed
        pass

    cost2 = cF + [Fraction(0)] * m
    status = run(cost2, n)
    if status != OPTIMAL:
        return LPResult(status, iterations=iters)
    x = [Fraction(0)] * n
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = T[r][-1]
    val = sum(cf * xi for cf, xi in zip(cF, x))
    res = LPResult(OPTIMAL, value=sign * val, iterations=iters)
    res.x = x
    return res
