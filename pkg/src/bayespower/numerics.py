"""Shared numerical kernels.

Standard-normal CDF/quantile, special functions, a small Cholesky
factorization, Brent root-finding with geometric bracket expansion, a
Newton local maximizer with Nelder-Mead fallback, and empirical
quantiles.  Everything here is pure: same inputs give same outputs, with
no hidden state, so all kernels are safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy import special as _sp

from .errors import (
    ConvergenceError,
    EvaluationError,
    FactorizationError,
    InvalidArgumentError,
    OptimizationError,
)

__all__ = [
    "Bracket",
    "BracketVerdict",
    "std_normal_cdf",
    "std_normal_quantile",
    "cholesky_lower",
    "brent_root",
    "expand_bracket",
    "local_maximize",
    "empirical_quantile",
    "log_gamma",
    "digamma",
    "trigamma",
    "reg_inc_gamma_upper",
    "reg_inc_gamma_lower",
]

_SQRT2 = math.sqrt(2.0)


def std_normal_cdf(z: float) -> float:
    """Standard normal CDF.

    Accurate to well below 1e-12 absolute error over the whole real
    line; maps -inf to 0 and +inf to 1.
    """
    if math.isnan(z):
        raise InvalidArgumentError("std_normal_cdf: NaN input")
    if z == math.inf:
        return 1.0
    if z == -math.inf:
        return 0.0
    return 0.5 * math.erfc(-z / _SQRT2)


def std_normal_quantile(p: float) -> float:
    """Inverse of :func:`std_normal_cdf` for p in the open interval (0, 1)."""
    if math.isnan(p) or p <= 0.0 or p >= 1.0:
        raise InvalidArgumentError(f"std_normal_quantile: p must be in (0,1), got {p}")
    return float(_sp.ndtri(p))


def log_gamma(x: float) -> float:
    if x <= 0.0:
        raise InvalidArgumentError(f"log_gamma: x must be positive, got {x}")
    return float(_sp.gammaln(x))


def digamma(x: float) -> float:
    if x <= 0.0:
        raise InvalidArgumentError(f"digamma: x must be positive, got {x}")
    return float(_sp.digamma(x))


def trigamma(x: float) -> float:
    if x <= 0.0:
        raise InvalidArgumentError(f"trigamma: x must be positive, got {x}")
    v = float(_sp.polygamma(1, x))
    if not math.isfinite(v):
        raise EvaluationError(f"trigamma overflowed at x={x}")
    return v


def reg_inc_gamma_upper(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x)."""
    if a <= 0.0 or x < 0.0:
        raise InvalidArgumentError(f"reg_inc_gamma_upper: bad arguments a={a}, x={x}")
    return float(_sp.gammaincc(a, x))


def reg_inc_gamma_lower(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    if a <= 0.0 or x < 0.0:
        raise InvalidArgumentError(f"reg_inc_gamma_lower: bad arguments a={a}, x={x}")
    return float(_sp.gammainc(a, x))


def cholesky_lower(m: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L @ L.T equal to the symmetric matrix ``m``.

    Raises :class:`FactorizationError` naming the first failing pivot
    when ``m`` is not positive definite.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError(f"cholesky_lower: expected square matrix, got {a.shape}")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(a).max()))):
        raise InvalidArgumentError("cholesky_lower: matrix is not symmetric")
    k = a.shape[0]
    lower = np.zeros_like(a)
    for i in range(k):
        for j in range(i + 1):
            s = a[i, j] - lower[i, :j] @ lower[j, :j]
            if i == j:
                if s <= 0.0 or not math.isfinite(s):
                    raise FactorizationError(i, float(s))
                lower[i, i] = math.sqrt(s)
            else:
                lower[i, j] = s / lower[j, j]
    return lower


@dataclass(frozen=True)
class Bracket:
    """A sign-changing interval for root-finding: lo < hi, f_lo * f_hi <= 0."""

    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InvalidArgumentError(f"Bracket: lo={self.lo} must be < hi={self.hi}")
        if self.f_lo * self.f_hi > 0.0:
            raise InvalidArgumentError(
                f"Bracket: no sign change, f_lo={self.f_lo}, f_hi={self.f_hi}"
            )


class BracketVerdict(Enum):
    """Outcome of bracket expansion when f keeps a constant sign."""

    ROOT_BELOW_LO_MIN = "root-below-lo_min"
    ROOT_ABOVE_HI_MAX = "root-above-hi_max"


def brent_root(
    f: Callable[[float], float],
    bracket: Bracket,
    tol_x: float = 1e-8,
    tol_f: float = 0.0,
    max_iter: int = 100,
) -> float:
    """Brent's method on a validated bracket.

    Returns x with |f(x)| <= tol_f or with the bracket narrowed to
    tol_x; never evaluates f outside [bracket.lo, bracket.hi].  Raises
    :class:`ConvergenceError` carrying the best iterate if max_iter is
    exceeded.
    """
    a, b = bracket.lo, bracket.hi
    fa, fb = bracket.f_lo, bracket.f_hi
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    c, fc = a, fa
    d = e = b - a
    eps = np.finfo(float).eps
    for _ in range(max_iter):
        if fb * fc > 0.0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol = 2.0 * eps * abs(b) + 0.5 * tol_x
        xm = 0.5 * (c - b)
        if abs(xm) <= tol or fb == 0.0 or abs(fb) <= tol_f:
            return b
        if abs(e) >= tol and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = xm
        else:
            d = e = xm
        a, fa = b, fb
        b = b + (d if abs(d) > tol else math.copysign(tol, xm))
        fb = f(b)
    raise ConvergenceError(
        f"brent_root: no convergence after {max_iter} iterations", best_x=b, best_f=fb
    )


def expand_bracket(
    f: Callable[[float], float],
    x0: float,
    lo_min: float,
    hi_max: float,
) -> Bracket | BracketVerdict:
    """Find a sign-changing bracket around x0 by geometric expansion.

    Doubles (or halves) the trial point away from x0 until the sign of
    f flips, staying inside [lo_min, hi_max].  When f has constant sign
    on the whole range, returns ROOT_BELOW_LO_MIN if f > 0 there and
    ROOT_ABOVE_HI_MAX if f < 0 (the convention for functions that
    increase through their root).
    """
    if not (lo_min < x0 < hi_max):
        raise InvalidArgumentError(
            f"expand_bracket: need lo_min < x0 < hi_max, got {lo_min}, {x0}, {hi_max}"
        )
    fx0 = f(x0)
    if fx0 == 0.0:
        # zero-width sign change; widen a hair for a valid bracket
        hi = min(hi_max, x0 * (1.0 + 1e-12) + 1e-300)
        return Bracket(x0, hi, 0.0, f(hi)) if hi > x0 else Bracket(lo_min, x0, f(lo_min), 0.0)
    if fx0 > 0.0:
        hi, f_hi = x0, fx0
        lo = x0
        while True:
            lo = max(lo_min, lo / 2.0)
            f_lo = f(lo)
            if f_lo <= 0.0:
                return Bracket(lo, hi, f_lo, f_hi)
            if lo == lo_min:
                return BracketVerdict.ROOT_BELOW_LO_MIN
            hi, f_hi = lo, f_lo
    lo, f_lo = x0, fx0
    hi = x0
    while True:
        hi = min(hi_max, hi * 2.0)
        f_hi = f(hi)
        if f_hi >= 0.0:
            return Bracket(lo, hi, f_lo, f_hi)
        if hi == hi_max:
            return BracketVerdict.ROOT_ABOVE_HI_MAX
        lo, f_lo = hi, f_hi


def _numeric_gradient(obj, x, h=1e-6):
    g = np.zeros_like(x)
    for i in range(x.size):
        step = h * max(1.0, abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += step
        xm[i] -= step
        g[i] = (obj(xp) - obj(xm)) / (2.0 * step)
    return g


def _numeric_hessian(obj, x, h=1e-4):
    k = x.size
    hess = np.zeros((k, k))
    steps = [h * max(1.0, abs(x[i])) for i in range(k)]
    f0 = obj(x)
    for i in range(k):
        for j in range(i, k):
            if i == j:
                xp, xm = x.copy(), x.copy()
                xp[i] += steps[i]
                xm[i] -= steps[i]
                hess[i, i] = (obj(xp) - 2.0 * f0 + obj(xm)) / steps[i] ** 2
            else:
                xpp, xpm, xmp, xmm = x.copy(), x.copy(), x.copy(), x.copy()
                xpp[[i, j]] += [steps[i], steps[j]]
                xpm[i] += steps[i]
                xpm[j] -= steps[j]
                xmp[i] -= steps[i]
                xmp[j] += steps[j]
                xmm[[i, j]] -= [steps[i], steps[j]]
                hess[i, j] = hess[j, i] = (
                    obj(xpp) - obj(xpm) - obj(xmp) + obj(xmm)
                ) / (4.0 * steps[i] * steps[j])
    return hess


def _nelder_mead(obj, x0, tol, max_iter=2000):
    # standard simplex method on -obj (we maximize); deterministic given x0
    neg = lambda x: -obj(x)
    k = x0.size
    simplex = [x0.copy()]
    for i in range(k):
        v = x0.copy()
        v[i] += 0.05 * max(1.0, abs(v[i]))
        simplex.append(v)
    fvals = [neg(v) for v in simplex]
    for _ in range(max_iter):
        order = np.argsort(fvals)
        simplex = [simplex[i] for i in order]
        fvals = [fvals[i] for i in order]
        if abs(fvals[-1] - fvals[0]) < 1e-13 * (1.0 + abs(fvals[0])) and (
            max(np.max(np.abs(simplex[i] - simplex[0])) for i in range(1, k + 1)) < tol * 1e-2
        ):
            break
        centroid = np.mean(simplex[:-1], axis=0)
        xr = centroid + (centroid - simplex[-1])
        fr = neg(xr)
        if fr < fvals[0]:
            xe = centroid + 2.0 * (centroid - simplex[-1])
            fe = neg(xe)
            simplex[-1], fvals[-1] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            xc = centroid + 0.5 * (simplex[-1] - centroid)
            fc = neg(xc)
            if fc < fvals[-1]:
                simplex[-1], fvals[-1] = xc, fc
            else:
                for i in range(1, k + 1):
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0])
                    fvals[i] = neg(simplex[i])
    return simplex[int(np.argmin(fvals))]


def local_maximize(
    obj: Callable[[np.ndarray], float],
    x0: Sequence[float],
    tol: float = 1e-8,
    max_iter: int = 200,
    grad: Callable[[np.ndarray], np.ndarray] | None = None,
    hess: Callable[[np.ndarray], np.ndarray] | None = None,
) -> np.ndarray:
    """Maximize a smooth scalar objective near x0.

    Newton iterations with (numeric, unless supplied) gradient and
    Hessian; falls back to Nelder-Mead whenever the Hessian is not
    negative definite.  Deterministic given x0.  Raises
    :class:`OptimizationError` when the objective goes non-finite.
    """
    x = np.asarray(x0, dtype=float).copy()
    f0 = obj(x)
    if not math.isfinite(f0):
        raise OptimizationError(f"local_maximize: objective not finite at x0={x0}")
    trace = [(x.copy(), f0)]
    g_fn = grad if grad is not None else lambda v: _numeric_gradient(obj, v)
    h_fn = hess if hess is not None else lambda v: _numeric_hessian(obj, v)
    fx = f0
    for _ in range(max_iter):
        g = g_fn(x)
        if not np.all(np.isfinite(g)):
            raise OptimizationError("local_maximize: non-finite gradient", trace=trace)
        if float(np.linalg.norm(g)) <= tol:
            return x
        hmat = h_fn(x)
        step = None
        try:
            # Newton on the maximization problem: solve H s = -g
            lo = cholesky_lower(-0.5 * (hmat + hmat.T))
            y = np.linalg.solve(lo, g)
            step = np.linalg.solve(lo.T, y)
        except (FactorizationError, np.linalg.LinAlgError):
            x = _nelder_mead(obj, x, tol)
            g = _numeric_gradient(obj, x)
            if float(np.linalg.norm(g)) <= max(tol, 1e-6):
                return x
            continue
        # backtracking keeps the iteration monotone
        t = 1.0
        for _bt in range(40):
            xn = x + t * step
            fn = obj(xn)
            if math.isfinite(fn) and fn >= fx - 1e-14 * max(1.0, abs(fx)):
                break
            t *= 0.5
        else:
            raise OptimizationError("local_maximize: line search failed", trace=trace)
        x, fx = xn, fn
        trace.append((x.copy(), fx))
        if not math.isfinite(fx):
            raise OptimizationError("local_maximize: objective became non-finite", trace=trace)
    g = g_fn(x)
    if float(np.linalg.norm(g)) <= max(tol, 1e-6):
        return x
    raise OptimizationError(
        f"local_maximize: no convergence after {max_iter} iterations "
        f"(|grad|={float(np.linalg.norm(g)):.3g})",
        trace=trace,
    )


def empirical_quantile(values: Sequence[float], level: float) -> float:
    """Order-statistic quantile: the ceil(level * m)-th smallest value.

    ``values`` must be sorted ascending and nonempty; level in (0, 1]
    uses the inverse-CDF convention so the result is conservative.
    """
    m = len(values)
    if m == 0:
        raise InvalidArgumentError("empirical_quantile: empty input")
    if not (0.0 < level <= 1.0):
        raise InvalidArgumentError(f"empirical_quantile: level must be in (0,1], got {level}")
    k = max(1, math.ceil(level * m))
    return float(values[k - 1])
