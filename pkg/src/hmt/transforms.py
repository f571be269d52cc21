"""The seven Hausdorff moment transforms and their linear-transform forms.

BM (binomial mixture), ME (maximum entropy), GP (Gil-Pelaez inversion of
imaginary moments), FJ (Fourier-Jacobi with data-driven alpha, beta), FL
(Fourier-Legendre on the cdf), FC (Fourier-Chebyshev on the cdf), and the
CM average of the Chebyshev-Markov envelope. BM, FL, and FC admit fixed
transform matrices h = A m and c = A_hat (1 - m_hat); matrices are exact
(integer / rational; FC entries are rational multiples of 1/pi stored as
decimal strings) and cacheable to disk. Digit requirements follow the
max-entry growth of the matrices: about n/2 - log10(n) digits for BM and
0.9 n for FL, plus a fixed 10-digit guard.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np

from .moments import MomentSequence
from .numerics import (DEFAULT_DIGITS, PrecisionInsufficientError, reg_inc_beta,
                       gauss_legendre_nodes, jacobi_norm, newton_minimize,
                       shifted_jacobi_sum, to_mpf, working_digits)
from .polish import SampledCdf

METHOD_ORDER_CAPS = {"bm": 150, "me": 50, "fj": 50, "fl": 50, "fc": 50, "cm": 30}


class DegenerateMomentsError(ValueError):
    """FJ parameters are undefined (point mass or endpoint-pinned mean)."""


class MemoryGuardError(RuntimeError):
    """GP refinement would exceed the configured term cap."""

    def __init__(self, message, samples=None, ds=None, upsilon=None, rounds=0):
        super().__init__(message)
        self.samples = samples
        self.ds = ds
        self.upsilon = upsilon
        self.rounds = rounds


def uniform_grid(n: int) -> np.ndarray:
    """The evaluation set U_n = {i/n, i = 0..n}."""
    return np.arange(n + 1) / n


# ----------------------------------------------------------------------
# Digit requirements
# ----------------------------------------------------------------------

def required_digits(method: str, n: int) -> int:
    """Decimal digits needed by the order-n linear transform (plus 10 guard)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if method == "bm":
        return max(0, math.ceil(n / 2 - math.log10(n))) + 10
    if method in ("fl", "fc"):
        return math.ceil(0.9 * n) + 10
    raise ValueError(f"no digit estimator for method {method!r}")


def required_moment_digits(decay_class: str, n: int, s: float,
                           a: float | None = None, b: float | None = None) -> int:
    """Decimal digits needed to carry the moments themselves at order n.

    Power-law and exponential follow the stated estimators; the remaining
    classes resolve the magnitude of the smallest moment the same way.
    """
    log10e = math.log10(math.e)
    if decay_class == "power":
        need = s * math.log10((n + a) / a)
    elif decay_class == "exponential":
        need = s * n / 2
    elif decay_class == "sub_power":
        need = s * (math.log10(math.log(n + 1) + a) - math.log10(a))
    elif decay_class == "soft_power":
        need = s * math.log10((n + a) / a) + math.log10((math.log(n + 1) + b) / b)
    elif decay_class == "intermediate":
        need = s * (math.sqrt(n + a) - math.sqrt(a)) * log10e
    elif decay_class == "soft_exponential":
        need = s * n * log10e + math.log10((n + a) / a)
    else:
        raise ValueError(f"unknown decay class {decay_class!r}")
    return math.ceil(need) + 10


def spec_moment_digits(spec, n: int) -> int:
    """Worst-case moment digits over the components of a DecaySpec."""
    return max(required_moment_digits(spec.decay_class, n, c.s, c.a, c.b)
               for c in spec.components)


# ----------------------------------------------------------------------
# Transform matrices + cache
# ----------------------------------------------------------------------

@dataclass
class TransformMatrix:
    """Dense (n+1)x(n+1) matrix for one of the linear transforms.

    Entries are exact ints (BM), exact Fractions (FL), or decimal strings at
    ``digits`` significant digits (FC, whose entries carry a factor 1/pi).
    digits == 0 marks exact entries.
    """
    method: str
    n: int
    digits: int
    entries: list

    def rows_mpf(self):
        out = []
        for row in self.entries:
            out.append([mpmath.mpf(v) if isinstance(v, str) else to_mpf(v) for v in row])
        return out

    def max_abs(self) -> float:
        return max(abs(float(v) if not isinstance(v, str) else float(mpmath.mpf(v)))
                   for row in self.entries for v in row)

    def serialize(self) -> str:
        lines = [f"HMT-MATRIX v1 method={self.method} n={self.n} digits={self.digits}"]
        for row in self.entries:
            for v in row:
                if isinstance(v, str):
                    lines.append(v)
                elif isinstance(v, Fraction):
                    lines.append(f"{v.numerator}/{v.denominator}")
                else:
                    lines.append(str(int(v)))
        return "\n".join(lines) + "\n"

    @staticmethod
    def parse(text: str) -> "TransformMatrix":
        lines = text.strip().split("\n")
        head = lines[0].split()
        if head[:2] != ["HMT-MATRIX", "v1"]:
            raise ValueError("not an HMT-MATRIX v1 file")
        meta = dict(kv.split("=") for kv in head[2:])
        method, n, digits = meta["method"], int(meta["n"]), int(meta["digits"])
        body = lines[1:]
        if len(body) != (n + 1) ** 2:
            raise ValueError("matrix file has wrong entry count")
        vals = []
        for s in body:
            if digits == 0:
                vals.append(Fraction(s) if "/" in s else int(s))
            else:
                vals.append(s)
        entries = [vals[i * (n + 1):(i + 1) * (n + 1)] for i in range(n + 1)]
        return TransformMatrix(method, n, digits, entries)


class MatrixCache:
    """Disk + memory cache keyed by (method, n, digits); first writer wins."""

    def __init__(self, directory: str | os.PathLike | None = None):
        self.directory = Path(directory) if directory is not None else None
        self._mem: dict = {}

    def path(self, method: str, n: int, digits: int) -> Path | None:
        if self.directory is None:
            return None
        return self.directory / f"{method}-{n}-{digits}.hmt"

    def get(self, method: str, n: int, digits: int, builder) -> TransformMatrix:
        key = (method, n, digits)
        if key in self._mem:
            return self._mem[key]
        path = self.path(method, n, digits)
        if path is not None and path.exists():
            mat = TransformMatrix.parse(path.read_text())
        else:
            mat = builder()
            if path is not None:
                path.parent.mkdir(parents=True, exist_ok=True)
                fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
                with os.fdopen(fd, "w") as fh:
                    fh.write(mat.serialize())
                if path.exists():
                    os.unlink(tmp)  # someone else won the race; reuse theirs
                    mat = TransformMatrix.parse(path.read_text())
                else:
                    os.replace(tmp, path)
        self._mem[key] = mat
        return mat


_shared_cache = MatrixCache()


def _cache_or_default(cache: MatrixCache | None) -> MatrixCache:
    return cache if cache is not None else _shared_cache


# ----------------------------------------------------------------------
# BM method
# ----------------------------------------------------------------------

def bm_matrix(n: int, cache: MatrixCache | None = None) -> TransformMatrix:
    """A_ij = C(n,j) C(j,i) (-1)^(j-i) for j >= i; exact integers."""
    def build():
        entries = [[math.comb(n, j) * math.comb(j, i) * (-1) ** (j - i) if j >= i else 0
                    for j in range(n + 1)] for i in range(n + 1)]
        return TransformMatrix("bm", n, 0, entries)
    return _cache_or_default(cache).get("bm", n, 0, build)


def _bm_guard(n: int, digits: int | None, check_precision: bool) -> int:
    req = required_digits("bm", n)
    if digits is None:
        digits = max(DEFAULT_DIGITS, req)
    if check_precision and digits < req:
        raise PrecisionInsufficientError(
            f"BM at n = {n} needs {req} digits, got {digits}")
    return digits


def bm_transform(m: MomentSequence, digits: int | None = None,
                 check_precision: bool = True,
                 cache: MatrixCache | None = None) -> np.ndarray:
    """Binomial masses h = A m. Sum h_k = m_0; h_k >= 0 for moment input."""
    n = m.n
    digits = _bm_guard(n, digits, check_precision)
    mat = bm_matrix(n, cache)
    with working_digits(digits):
        mv = m.as_mpf()
        h = [mpmath.fsum(row[j] * mv[j] for j in range(n + 1) if row[j] != 0)
             for row in mat.entries]
        return np.array([float(v) for v in h])


def bm_masses_direct(m: MomentSequence, digits: int | None = None,
                     check_precision: bool = True) -> np.ndarray:
    """h_k by the direct alternating sum (no matrix); equivalence oracle."""
    n = m.n
    digits = _bm_guard(n, digits, check_precision)
    with working_digits(digits):
        mv = m.as_mpf()
        out = []
        for k in range(n + 1):
            out.append(mpmath.fsum(
                math.comb(n, i) * math.comb(i, k) * (-1) ** (i - k) * mv[i]
                for i in range(k, n + 1)))
        return np.array([float(v) for v in out])


def bm_cdf(h: np.ndarray, x: float) -> float:
    """Piecewise-constant F_BM(x) = sum_{k <= floor(n x)} h_k, with F(0) = 0."""
    if x == 0.0:
        return 0.0
    n = len(h) - 1
    top = min(n, int(math.floor(n * x)))
    return float(np.sum(h[: top + 1]))


def bm_samples(m: MomentSequence, digits: int | None = None,
               cache: MatrixCache | None = None) -> SampledCdf:
    """F_BM,n sampled on U_{n+1} (the comparison convention for BM)."""
    h = bm_transform(m, digits=digits, cache=cache)
    n = m.n
    grid = uniform_grid(n + 1)
    cums = np.concatenate([[0.0], np.cumsum(h)])
    return SampledCdf(grid, cums)


# ----------------------------------------------------------------------
# ME method
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class MEParams:
    xi: np.ndarray
    gradient_norm: float
    converged: bool
    iterations: int
    condition: float
    reason: str


def me_solve(m: MomentSequence, tol: float = 1e-8, max_iter: int = 200,
             quad_order: int = 64) -> MEParams:
    """Fit the maximum-entropy density exp(-sum xi_k x^k) to the moments.

    Minimizes the convex dual Gamma(xi_1..xi_n) by damped Newton (gradient
    m_k - mu_k(xi), Hessian the covariance of (x, .., x^n) under the current
    density), then solves for xi_0 by normalization. converged is set iff
    the final gradient norm is <= tol.
    """
    n = m.n
    target = np.asarray(m.as_floats()[1:])
    x, w = gauss_legendre_nodes(0.0, 1.0, quad_order)
    powers = np.vstack([x ** k for k in range(2 * n + 1)])  # powers[k] = x^k

    def moments_under(xi):
        expo = -(powers[1:n + 1].T @ xi)
        shift = expo.max()
        e = np.exp(expo - shift)
        z = w @ e
        mu = (powers @ (w * e)) / z
        return mu, math.log(z) + shift

    def f(xi):
        _, logz = moments_under(xi)
        return float(xi @ target + logz)

    def grad(xi):
        mu, _ = moments_under(xi)
        return target - mu[1:n + 1]

    def hess(xi):
        mu, _ = moments_under(xi)
        return np.array([[mu[i + j] - mu[i] * mu[j] for j in range(1, n + 1)]
                         for i in range(1, n + 1)])

    res = newton_minimize(f, grad, hess, np.zeros(n), tol=tol, max_iter=max_iter)
    _, logz = moments_under(res.x)
    xi = np.concatenate([[logz], res.x])
    return MEParams(xi, res.grad_norm, res.converged, res.iterations,
                    res.condition, res.reason)


def me_density(params: MEParams, x):
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    expo = -sum(params.xi[k] * xs ** k for k in range(len(params.xi)))
    return np.exp(expo)


def me_cdf(params: MEParams, x: float, quad_order: int = 64) -> float:
    """F_ME(x) = integral of the fitted density from 0 to x."""
    if x <= 0.0:
        return 0.0
    t, w = gauss_legendre_nodes(0.0, float(x), quad_order)
    return float(w @ me_density(params, t))


def me_samples(m: MomentSequence, tol: float = 1e-8) -> tuple[SampledCdf, MEParams]:
    params = me_solve(m, tol=tol)
    grid = uniform_grid(m.n)
    vals = np.array([me_cdf(params, float(u)) for u in grid])
    return SampledCdf(grid, vals), params


# ----------------------------------------------------------------------
# GP method
# ----------------------------------------------------------------------

def gp_cdf_grid(moment_fn, xs, ds: float, upsilon: float,
                chunk: int = 8192) -> np.ndarray:
    """Trapezoid Gil-Pelaez values at xs in (0,1].

    moment_fn maps an ndarray of s >= 0 to the imaginary moments m_{js}.
    The i = 0 term uses the analytic limit r(0,x) = Im m'_{j0} - log x,
    with the derivative taken by a one-sided difference at s = 1e-6.
    """
    xs = np.asarray(xs, dtype=float)
    if np.any(xs <= 0.0) or np.any(xs > 1.0):
        raise ValueError("GP evaluation points must lie in (0, 1]")
    n_terms = int(math.floor(upsilon / ds))
    logx = np.log(xs)
    s_eps = 1e-6
    phi_eps = complex(np.asarray(moment_fn(np.array([s_eps])), dtype=complex)[0])
    acc = (phi_eps.imag / s_eps) - logx  # r(s_0, x), weight 1
    for start in range(1, n_terms + 1, chunk):
        stop = min(start + chunk, n_terms + 1)
        idx = np.arange(start, stop)
        s = idx * ds
        phi = np.asarray(moment_fn(s), dtype=complex)
        r = (np.exp(-1j * np.outer(s, logx)) * phi[:, None]).imag / s[:, None]
        wgt = np.where(idx == n_terms, 1.0, 2.0)
        acc = acc + wgt @ r
    return 0.5 - ds / (2.0 * math.pi) * acc


def gp_cdf(moment_fn, x: float, ds: float, upsilon: float) -> float:
    return float(gp_cdf_grid(moment_fn, np.array([x]), ds, upsilon)[0])


@dataclass(frozen=True)
class GpDynamicResult:
    samples: SampledCdf
    ds: float
    upsilon: float
    rounds: int


def gp_dynamic(moment_fn, grid, eps: float = 1e-3, n_cap: int = 10 ** 6,
               ds0: float = 0.1, upsilon0: float = 1000.0) -> GpDynamicResult:
    """Dynamic step/limit selection for GP.

    Start at (0.1, 1000); while any raw sample leaves [-eps, 1+eps], divide
    the step by 3 and triple the upper limit. If the next round would need
    more than n_cap terms, abort with MemoryGuardError carrying the last
    computed parameters and samples.
    """
    grid = np.asarray(grid, dtype=float)
    if grid[0] != 0.0 or grid[-1] != 1.0:
        raise ValueError("gp_dynamic expects a full grid from 0 to 1")
    pos = grid > 0.0
    ds, ups = ds0, upsilon0
    rounds = 0
    last = None
    while True:
        if math.floor(ups / ds) > n_cap:
            raise MemoryGuardError(
                f"GP refinement needs {math.floor(ups / ds)} > {n_cap} terms",
                samples=None if last is None else last[0],
                ds=None if last is None else last[1],
                upsilon=None if last is None else last[2], rounds=rounds)
        vals = np.zeros_like(grid)
        vals[pos] = gp_cdf_grid(moment_fn, grid[pos], ds, ups)
        raw = SampledCdf(grid, vals)
        last = (raw, ds, ups)
        if np.all(vals[pos] >= -eps) and np.all(vals[pos] <= 1.0 + eps):
            return GpDynamicResult(raw, ds, ups, rounds)
        ds /= 3.0
        ups *= 3.0
        rounds += 1


# ----------------------------------------------------------------------
# FJ method
# ----------------------------------------------------------------------

def fj_params(m1: float, m2: float) -> tuple[float, float]:
    """alpha, beta with c_1 = c_2 = 0: the beta-approximation matching."""
    m1, m2 = float(m1), float(m2)
    denom = m2 - m1 * m1
    if denom <= 0 or m1 <= 0 or m1 >= 1 or m2 >= m1:
        raise DegenerateMomentsError(
            f"FJ parameters undefined for m1 = {m1}, m2 = {m2}")
    alpha = (m1 - m2) * (1.0 - m1) / denom - 1.0
    beta = (alpha + 1.0) * m1 / (1.0 - m1) - 1.0
    if alpha <= -1 or beta <= -1:
        raise DegenerateMomentsError("FJ parameters left the Jacobi domain")
    return alpha, beta


def fj_coeffs(m: MomentSequence, digits: int | None = None) -> tuple[float, float, np.ndarray]:
    """Fourier-Jacobi pdf coefficients c_0..c_n at data-driven (alpha, beta)."""
    n = m.n
    if n < 2:
        raise DegenerateMomentsError("FJ needs at least m_1 and m_2")
    alpha, beta = fj_params(float(m.values[1]), float(m.values[2]))
    digits = digits if digits is not None else max(DEFAULT_DIGITS,
                                                   required_digits("fl", max(n, 1)))
    with working_digits(digits):
        a = to_mpf(alpha)
        b = to_mpf(beta)
        mv = m.as_mpf()
        lg = mpmath.loggamma

        def gbinom(top, k: int):
            return mpmath.exp(lg(top + 1) - lg(k + 1) - lg(top - k + 1))

        coeffs = []
        for order in range(n + 1):
            if order == 0:
                eta = mpmath.exp(lg(b + 1) + lg(a + 1) - lg(a + b + 2))
            else:
                eta = (mpmath.exp(lg(order + 1 + b) + lg(order + a + 1)
                                  - lg(order + 1) - lg(order + a + b + 1))
                       / (2 * order + a + b + 1))
            total = mpmath.mpf(0)
            for j in range(order + 1):
                inner = mpmath.fsum(math.comb(order - j, k) * (-1) ** k * mv[order - k]
                                    for k in range(order - j + 1))
                total += gbinom(order + a, j) * gbinom(order + b, order - j) * inner
            coeffs.append(total / eta)
        return alpha, beta, np.array([float(c) for c in coeffs])


def fj_cdf(alpha: float, beta: float, coeffs: np.ndarray, x) -> np.ndarray:
    """F_FJ(x) = I_x(beta+1, alpha+1) - sum_k (c_k/k) w^(a+1,b+1)(x) R_{k-1}^(a+1,b+1)(x)."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    lead = np.array([reg_inc_beta(beta + 1.0, alpha + 1.0, float(t)) for t in xs])
    out = lead
    if len(coeffs) > 1:
        d = np.array([-coeffs[k] / k for k in range(1, len(coeffs))])
        interior = (xs > 0.0) & (xs < 1.0)
        corr = np.zeros_like(xs)
        if np.any(interior):
            xi = xs[interior]
            wgt = (1.0 - xi) ** (alpha + 1.0) * xi ** (beta + 1.0)
            corr[interior] = wgt * shifted_jacobi_sum(d, alpha + 1.0, beta + 1.0, xi)
        out = lead + corr
    return out if np.asarray(x).ndim else float(out[0])


def fj_samples(m: MomentSequence, digits: int | None = None) -> tuple[SampledCdf, dict]:
    alpha, beta, coeffs = fj_coeffs(m, digits=digits)
    grid = uniform_grid(m.n)
    vals = fj_cdf(alpha, beta, coeffs, grid)
    return SampledCdf(grid, vals), {"alpha": alpha, "beta": beta, "coeffs": coeffs}


# ----------------------------------------------------------------------
# FL method
# ----------------------------------------------------------------------

def fl_matrix(n: int, cache: MatrixCache | None = None) -> TransformMatrix:
    """Lower-triangular A_hat with c = A_hat (1 - m_hat); exact rationals."""
    def build():
        entries = []
        for k in range(n + 1):
            row = []
            for l in range(n + 1):
                if l > k:
                    row.append(Fraction(0))
                    continue
                ssum = sum(math.comb(k, j) * math.comb(k, k - j) * math.comb(k - j, k - l)
                           for j in range(l + 1))
                row.append(Fraction((-1) ** (k - l) * (2 * k + 1) * ssum, l + 1))
            entries.append(row)
        return TransformMatrix("fl", n, 0, entries)
    return _cache_or_default(cache).get("fl", n, 0, build)


def _fl_guard(n: int, digits: int | None, check_precision: bool, method: str = "fl") -> int:
    req = required_digits(method, max(n, 1))
    if digits is None:
        digits = max(DEFAULT_DIGITS, req)
    if check_precision and digits < req:
        raise PrecisionInsufficientError(
            f"{method.upper()} at n = {n} needs {req} digits, got {digits}")
    return digits


def fl_coeffs(m: MomentSequence, digits: int | None = None,
              check_precision: bool = True,
              cache: MatrixCache | None = None) -> np.ndarray:
    """Legendre cdf coefficients c_0..c_{n} from moments m_1..m_{n+1}.

    Matrix route: the products A_hat 1 and A_hat m_hat are formed separately
    (the first one exactly), then subtracted at working precision.
    """
    n = m.n - 1
    if n < 0:
        raise ValueError("need at least m_1")
    digits = _fl_guard(n, digits, check_precision)
    mat = fl_matrix(n, cache)
    with working_digits(digits):
        mhat = [to_mpf(v) for v in m.values[1:]]
        out = []
        for row in mat.entries:
            ones = sum(row, start=Fraction(0))  # exact A_hat . 1
            mm = mpmath.fsum(to_mpf(row[l]) * mhat[l] for l in range(n + 1) if row[l])
            out.append(to_mpf(ones) - mm)
        return np.array([float(v) for v in out])


def fl_coeffs_direct(m: MomentSequence, digits: int | None = None,
                     check_precision: bool = True) -> np.ndarray:
    """c_m by the direct triple sum; equivalence oracle for the matrix route."""
    n = m.n - 1
    digits = _fl_guard(n, digits, check_precision)
    with working_digits(digits):
        mv = m.as_mpf()
        out = []
        for order in range(n + 1):
            total = mpmath.mpf(0)
            for j in range(order + 1):
                inner = mpmath.fsum(
                    math.comb(order - j, k) * (-1) ** k
                    * (1 - mv[order - k + 1]) / (order - k + 1)
                    for k in range(order - j + 1))
                total += math.comb(order, j) * math.comb(order, order - j) * inner
            out.append((2 * order + 1) * total)
        return np.array([float(v) for v in out])


def fl_cdf(coeffs: np.ndarray, x) -> np.ndarray:
    """Partial sum of the Legendre series at x (recurrence evaluation)."""
    return shifted_jacobi_sum(coeffs, 0.0, 0.0, x)


def fl_samples(m: MomentSequence, digits: int | None = None,
               cache: MatrixCache | None = None) -> SampledCdf:
    """F_FL,n-1 sampled on U_n, per the comparison convention."""
    coeffs = fl_coeffs(m, digits=digits, cache=cache)
    grid = uniform_grid(m.n)
    return SampledCdf(grid, fl_cdf(coeffs, grid))


# ----------------------------------------------------------------------
# FC method
# ----------------------------------------------------------------------

def _half_binom_exact(k: int, j: int) -> Fraction:
    """C(k - 1/2, j) as an exact rational."""
    num = 1
    for r in range(j):
        num *= 2 * (k - r) - 1
    return Fraction(num, 2 ** j * math.factorial(j))


def fc_matrix(n: int, digits: int | None = None,
              cache: MatrixCache | None = None) -> TransformMatrix:
    """FC analogue of fl_matrix; entries are rationals times 1/pi, stored as
    decimal strings at the given precision."""
    digits = digits if digits is not None else max(DEFAULT_DIGITS,
                                                   required_digits("fc", max(n, 1)))

    def build():
        rows = []
        for k in range(n + 1):
            if k == 0:
                cprime = Fraction(1)
            else:
                cprime = Fraction(2 * 16 ** k * math.factorial(k) ** 4,
                                  math.factorial(2 * k) ** 2)
            row = []
            for l in range(n + 1):
                if l > k:
                    row.append(Fraction(0))
                    continue
                ssum = sum(_half_binom_exact(k, j) * _half_binom_exact(k, k - j)
                           * math.comb(k - j, k - l) for j in range(l + 1))
                row.append(Fraction((-1) ** (k - l), l + 1) * cprime * ssum)
            rows.append(row)
        with working_digits(digits + 10):
            inv_pi = 1 / mpmath.pi
            entries = [[mpmath.nstr(to_mpf(v) * inv_pi, digits, strip_zeros=True)
                        if v else "0.0" for v in row] for row in rows]
        return TransformMatrix("fc", n, digits, entries)

    return _cache_or_default(cache).get("fc", n, digits, build)


def fc_coeffs(m: MomentSequence, digits: int | None = None,
              check_precision: bool = True,
              cache: MatrixCache | None = None) -> np.ndarray:
    """Chebyshev cdf coefficients c_0..c_n from moments m_1..m_{n+1}."""
    n = m.n - 1
    if n < 0:
        raise ValueError("need at least m_1")
    digits = _fl_guard(n, digits, check_precision, method="fc")
    mat = fc_matrix(n, digits=digits, cache=cache)
    with working_digits(digits):
        rows = mat.rows_mpf()
        mhat = [to_mpf(v) for v in m.values[1:]]
        out = []
        for row in rows:
            ones = mpmath.fsum(row)
            mm = mpmath.fsum(row[l] * mhat[l] for l in range(n + 1))
            out.append(ones - mm)
        return np.array([float(v) for v in out])


def fc_coeffs_direct(m: MomentSequence, digits: int | None = None,
                     check_precision: bool = True) -> np.ndarray:
    """c_m per the series definition, generalized binomials via log-gamma."""
    n = m.n - 1
    digits = _fl_guard(n, digits, check_precision, method="fc")
    with working_digits(digits):
        mv = m.as_mpf()
        lg = mpmath.loggamma
        half = mpmath.mpf(1) / 2

        def hbinom(k: int, j: int):
            return mpmath.exp(lg(k + half) - lg(j + 1) - lg(k - j + half))

        out = []
        for order in range(n + 1):
            if order == 0:
                cprime = 1 / mpmath.pi
            else:
                cprime = 2 * mpmath.exp(2 * (lg(order + 1) - lg(order + half)))
            total = mpmath.mpf(0)
            for j in range(order + 1):
                inner = mpmath.fsum(
                    math.comb(order - j, k) * (-1) ** k
                    * (1 - mv[order - k + 1]) / (order - k + 1)
                    for k in range(order - j + 1))
                total += hbinom(order, j) * hbinom(order, order - j) * inner
            out.append(cprime * total)
        return np.array([float(v) for v in out])


def fc_cdf(coeffs: np.ndarray, x) -> np.ndarray:
    """Weighted Chebyshev partial sum on (0,1); returns x at the endpoints."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = xs.copy()
    interior = (xs > 0.0) & (xs < 1.0)
    if np.any(interior):
        xi = xs[interior]
        wgt = xi ** -0.5 * (1.0 - xi) ** -0.5
        out[interior] = wgt * shifted_jacobi_sum(coeffs, -0.5, -0.5, xi)
    return out if np.asarray(x).ndim else float(out[0])


def fc_samples(m: MomentSequence, digits: int | None = None,
               cache: MatrixCache | None = None) -> SampledCdf:
    """F_FC,n-1 sampled on U_n."""
    coeffs = fc_coeffs(m, digits=digits, cache=cache)
    grid = uniform_grid(m.n)
    return SampledCdf(grid, fc_cdf(coeffs, grid))


# ----------------------------------------------------------------------
# CM average
# ----------------------------------------------------------------------

def cm_average(band) -> SampledCdf:
    """Midpoint of the Chebyshev-Markov envelope; |F_CM - F| <= width/2."""
    mid = 0.5 * (np.asarray(band.inf) + np.asarray(band.sup))
    return SampledCdf(np.asarray(band.grid, dtype=float), mid)
