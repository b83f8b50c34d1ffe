"""Power-curve approximation by per-point root-finding over sample size.

The procedure: compute an analytic initializer n0 from the
known-variance normal model, generate one randomized low-discrepancy
point block, solve the per-point criterion equation for n starting at
ceil(n0), take the target-power quantile of the m roots, re-check every
point at that quantile and re-solve any inconsistencies from there, and
recommend the ceiling of the final quantile.  The empirical CDF of the
roots is the power curve.

Per-point solves are independent; a worker pool may run them in
parallel, and results are identical for any worker count because each
point's solve depends only on the immutable design and point block.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .approx import (
    BayesFactorAnalysis,
    CredibleIntervalAnalysis,
    DesignContext,
    DesignSpec,
    PosteriorProbAnalysis,
    approx_posterior,
    interval_prob,
    posterior_prob,
)
from .comparisons import g_eval, g_grad, h_eval, h_grad
from .errors import (
    BayesPowerError,
    ConvergenceError,
    InvalidArgumentError,
    UnattainableDesignError,
)
from .lowdisc import sobol_block
from .models import fisher_info
from .numerics import (
    Bracket,
    BracketVerdict,
    brent_root,
    empirical_quantile,
    expand_bracket,
    std_normal_cdf,
    std_normal_quantile,
)

__all__ = [
    "PowerCurve",
    "PriorIntervalEstimate",
    "bf_threshold",
    "prior_interval_prob",
    "initial_n0",
    "solve_point",
    "power_curve",
    "power_at",
    "ci_power_curve",
]

FLAG_NONE = "none"
FLAG_CLAMPED_LOW = "clamped_low"
FLAG_CLAMPED_HIGH = "clamped_high"
FLAG_FAILED = "failed"

_N_FLOOR = 2.0
_PRIOR_DRAWS_DEFAULT = 10**6


# ---------------------------------------------------------------------------
# analysis-threshold plumbing


def bf_threshold(pi0: float, K: float) -> float:
    """Conviction threshold equivalent to a Bayes-factor threshold K.

    The factor exceeds K exactly when the posterior interval probability
    exceeds K pi0 / (1 + (K - 1) pi0), where pi0 is the prior interval
    probability.
    """
    if not 0.0 < pi0 < 1.0:
        raise InvalidArgumentError(f"bf_threshold: pi0 must be in (0,1), got {pi0}")
    if not K >= 1.0:
        raise InvalidArgumentError(f"bf_threshold: K must be >= 1, got {K}")
    return K * pi0 / (1.0 + (K - 1.0) * pi0)


@dataclass(frozen=True)
class PriorIntervalEstimate:
    value: float
    se: float
    draws: int


def prior_interval_prob(design: DesignSpec, draws: int = _PRIOR_DRAWS_DEFAULT) -> PriorIntervalEstimate:
    """Monte Carlo prior probability that the comparison lies in the interval.

    Deterministic given the design seed; group parameters are drawn from
    the analysis priors on the natural scale.
    """
    if draws < 10**4:
        raise InvalidArgumentError(f"prior_interval_prob: draws must be >= 1e4, got {draws}")
    rng = np.random.default_rng(np.random.SeedSequence([int(design.seed), 0x70]))
    model = design.model
    x1 = design.priors[0].sample_natural(rng, draws)
    x2 = design.priors[1].sample_natural(rng, draws)
    th1 = _g_eval_natural(design, x1)
    th2 = _g_eval_natural(design, x2)
    w = _h_eval_working_vec(design, th1, th2)
    lo, hi = DesignContext.build(design).working_interval
    inside = (w > lo) & (w < hi)
    p = float(np.mean(inside))
    se = math.sqrt(max(p * (1.0 - p), 1e-300) / draws)
    return PriorIntervalEstimate(value=p, se=se, draws=draws)


def _g_eval_natural(design: DesignSpec, x: np.ndarray) -> np.ndarray:
    """Vectorized characteristic on natural-scale parameter draws."""
    from scipy import special as _sp

    g = design.g
    if g.kind == "identity":
        return x[:, 0]
    if design.model.name == "gamma":
        return _sp.gammaincc(x[:, 0], x[:, 1] * g.threshold)
    nu, lam = x[:, 0], x[:, 1]
    return np.exp(-((g.threshold / lam) ** nu))


def _h_eval_working_vec(design: DesignSpec, th1: np.ndarray, th2: np.ndarray) -> np.ndarray:
    kind = design.h.kind
    if kind == "difference":
        return th1 - th2
    if kind == "ratio":
        with np.errstate(divide="ignore"):
            return np.log(th1) - np.log(th2)
    s = th1 - th2
    return np.log1p(s) - np.log1p(-s)


def resolve_gamma(design: DesignSpec, pi0: float | None = None) -> float:
    """Effective conviction threshold for posterior-probability criteria."""
    an = design.analysis
    if isinstance(an, PosteriorProbAnalysis):
        return an.gamma
    if isinstance(an, BayesFactorAnalysis):
        if pi0 is None:
            pi0 = prior_interval_prob(design).value
        return bf_threshold(pi0, an.K)
    raise InvalidArgumentError("credible-interval analyses have no single threshold")


# ---------------------------------------------------------------------------
# analytic initializer


def _composite_variance_factor(design: DesignSpec) -> float:
    """Delta-method variance of the working comparison, times n.

    Group 2 contributes through its effective size q n.
    """
    model = design.model
    th1 = g_eval(design.g, model, design.eta10)
    th2 = g_eval(design.g, model, design.eta20)
    dh1, dh2 = h_grad(design.h, th1, th2)
    out = 0.0
    for eta, dh, qj in (
        (design.eta10, dh1, 1.0),
        (design.eta20, dh2, design.q),
    ):
        grad = g_grad(design.g, model, eta)
        info = fisher_info(model, eta)
        sol = np.linalg.solve(info, grad)
        out += dh * dh * float(grad @ sol) / qj
    return out


def _one_sided_n0(v0: float, gap: float, gamma: float, target: float) -> float:
    return v0 * (std_normal_quantile(target) + std_normal_quantile(gamma)) ** 2 / gap**2


def _two_sided_region_halfwidth(sigma: float, lo: float, hi: float, gamma: float) -> float | None:
    """Half-width of the estimate region keeping the interval mass >= gamma.

    Returns None when even the interval midpoint fails the criterion.
    """
    mid = 0.5 * (lo + hi)
    w = 0.5 * (hi - lo)

    def mass_at(offset: float) -> float:
        return std_normal_cdf((w - offset) / sigma) - std_normal_cdf((-w - offset) / sigma)

    if mass_at(0.0) < gamma:
        return None
    step = sigma
    hi_off = step
    while mass_at(hi_off) >= gamma:
        hi_off += step
    bracket = Bracket(hi_off - step, hi_off, mass_at(hi_off - step) - gamma, mass_at(hi_off) - gamma)
    return brent_root(lambda t: mass_at(t) - gamma, bracket, tol_x=1e-12 * max(1.0, sigma))


def initial_n0(design: DesignSpec, gamma_eff: float | None = None) -> float:
    """Sample size at which the known-variance normal model hits the target.

    The estimate and the posterior share the variance v0 / n evaluated
    at the design values, which turns the power criterion into a nested
    pair of one-dimensional solves (estimate-region endpoints inside,
    sample size outside).  One-sided intervals reduce to a closed form.
    """
    ctx = DesignContext.build(design)
    lo, hi = ctx.working_interval
    th0 = ctx.theta0_working
    if not lo < th0 < hi:
        raise UnattainableDesignError(
            f"design comparison value {th0:.6g} lies outside the working interval "
            f"({lo:.6g}, {hi:.6g}); power cannot reach the target for any n"
        )
    v0 = _composite_variance_factor(design)
    target = design.target

    if isinstance(design.analysis, CredibleIntervalAnalysis):
        alpha = design.analysis.alpha
        if math.isinf(lo) or math.isinf(hi):
            gamma = 1.0 - alpha
            gap = (th0 - lo) if math.isinf(hi) else (hi - th0)
            return max(_one_sided_n0(v0, gap, gamma, target), _N_FLOOR)
        z = std_normal_quantile(1.0 - alpha / 2.0)

        def power_ci(n: float) -> float:
            sigma = math.sqrt(v0 / n)
            a_lo, a_hi = lo + z * sigma, hi - z * sigma
            if a_lo >= a_hi:
                return 0.0
            return std_normal_cdf((a_hi - th0) / sigma) - std_normal_cdf((a_lo - th0) / sigma)

        return _solve_outer(power_ci, target)

    gamma = resolve_gamma(design) if gamma_eff is None else gamma_eff
    if math.isinf(lo) or math.isinf(hi):
        gap = (th0 - lo) if math.isinf(hi) else (hi - th0)
        return max(_one_sided_n0(v0, gap, gamma, target), _N_FLOOR)

    def power_two_sided(n: float) -> float:
        sigma = math.sqrt(v0 / n)
        c = _two_sided_region_halfwidth(sigma, lo, hi, gamma)
        if c is None:
            return 0.0
        mid = 0.5 * (lo + hi)
        return std_normal_cdf((mid + c - th0) / sigma) - std_normal_cdf((mid - c - th0) / sigma)

    return _solve_outer(power_two_sided, target)


def _solve_outer(power_fn, target: float) -> float:
    if power_fn(_N_FLOOR) >= target:
        return _N_FLOOR
    n_hi = _N_FLOOR
    for _ in range(60):
        n_hi *= 2.0
        if power_fn(n_hi) >= target:
            break
    else:
        raise UnattainableDesignError("initializer power never reached the target")
    bracket = Bracket(n_hi / 2.0, n_hi, power_fn(n_hi / 2.0) - target, power_fn(n_hi) - target)
    return brent_root(lambda n: power_fn(n) - target, bracket, tol_x=1e-9 * n_hi)


# ---------------------------------------------------------------------------
# per-point solving


class _GapFn:
    """Per-point criterion margin as a function of n, with call counting."""

    def __init__(self, design, u, ctx, point_index, gamma_eff):
        self.design = design
        self.u = u
        self.ctx = ctx
        self.point_index = point_index
        self.gamma_eff = gamma_eff
        self.evals = 0
        lo, hi = ctx.working_interval
        self.lo, self.hi = lo, hi
        an = design.analysis
        self.ci = isinstance(an, CredibleIntervalAnalysis)
        if self.ci and math.isfinite(lo) and math.isfinite(hi):
            self.level = 1.0 - an.alpha / 2.0
        elif self.ci:
            self.level = 1.0 - an.alpha

    def __call__(self, n: float) -> float:
        self.evals += 1
        post = approx_posterior(self.design, n, self.u, ctx=self.ctx, point_index=self.point_index)
        if not self.ci:
            return interval_prob(post, self.lo, self.hi) - self.gamma_eff
        if math.isinf(self.lo) or math.isinf(self.hi):
            return interval_prob(post, self.lo, self.hi) - self.level
        # joint margin of the two one-sided conditions; its root is the
        # larger of the two one-sided roots since both margins increase in n
        m_lo = (1.0 - posterior_prob(post, self.lo)) - self.level
        m_hi = posterior_prob(post, self.hi) - self.level
        return min(m_lo, m_hi)


@dataclass
class _PointResult:
    root: float
    flag: str
    evals: int


def _solve_gap(gap: _GapFn, n_init: float, n_max: float, tol_x: float, tol_f: float) -> _PointResult:
    start_evals = gap.evals
    # expansion needs a strictly interior start
    x0 = min(max(n_init, _N_FLOOR * (1.0 + 1e-9)), n_max * (1.0 - 1e-9))
    try:
        found = expand_bracket(gap, x0, _N_FLOOR, n_max)
        if found is BracketVerdict.ROOT_BELOW_LO_MIN:
            return _PointResult(_N_FLOOR, FLAG_CLAMPED_LOW, gap.evals - start_evals)
        if found is BracketVerdict.ROOT_ABOVE_HI_MAX:
            return _PointResult(n_max, FLAG_CLAMPED_HIGH, gap.evals - start_evals)
        root = brent_root(gap, found, tol_x=tol_x, tol_f=tol_f)
        return _PointResult(float(root), FLAG_NONE, gap.evals - start_evals)
    except ConvergenceError as exc:
        root = float(exc.best_x) if exc.best_x is not None else n_max
        root = min(max(root, _N_FLOOR), n_max)
        return _PointResult(root, FLAG_FAILED, gap.evals - start_evals)
    except BayesPowerError:
        return _PointResult(n_max, FLAG_FAILED, gap.evals - start_evals)


def solve_point(
    design: DesignSpec,
    u: np.ndarray,
    n_init: float,
    ctx: DesignContext | None = None,
    gamma_eff: float | None = None,
    tol_x: float | None = None,
    tol_f: float = 1e-6,
    point_index: int = -1,
) -> tuple[float, str, int]:
    """Solve the criterion equation for one point; returns (root, flag, evals)."""
    if not _N_FLOOR <= n_init <= design.n_max:
        raise InvalidArgumentError(
            f"solve_point: n_init must be within [2, n_max], got {n_init}"
        )
    if ctx is None:
        ctx = DesignContext.build(design)
    if gamma_eff is None and not isinstance(design.analysis, CredibleIntervalAnalysis):
        gamma_eff = resolve_gamma(design)
    if tol_x is None:
        tol_x = 1e-9 * max(1.0, n_init)
    gap = _GapFn(design, np.asarray(u, dtype=float), ctx, point_index, gamma_eff)
    res = _solve_gap(gap, float(n_init), design.n_max, tol_x, tol_f)
    return res.root, res.flag, res.evals


# ---------------------------------------------------------------------------
# the full curve


@dataclass
class PowerCurve:
    """Per-point root sample sizes and the derived recommendation."""

    roots: np.ndarray
    n0: float
    n_star: float
    recommendation: int
    reinit_count: int
    boundary_flags: list[str]
    gap_evals: int
    mean_evals_per_point: float
    gamma_eff: float | None
    warnings: list[str] = field(default_factory=list)
    seed: int = 0
    m: int = 0
    method: str = ""

    def power_at_n(self, n: float) -> float:
        """Empirical-CDF power read off the stored roots."""
        return float(np.mean(self.roots <= n))

    def grid(self, points: int = 200) -> list[tuple[float, float]]:
        lo = max(_N_FLOOR, math.floor(float(self.roots.min())))
        hi = math.ceil(float(self.roots.max()))
        if hi <= lo:
            hi = lo + 1.0
        xs = np.linspace(lo, hi, points)
        return [(float(x), self.power_at_n(float(x))) for x in xs]

    def to_dict(self) -> dict:
        return {
            "n0": self.n0,
            "n_star": self.n_star,
            "recommendation": self.recommendation,
            "reinit_count": self.reinit_count,
            "gap_evals": self.gap_evals,
            "mean_evals_per_point": self.mean_evals_per_point,
            "gamma_eff": self.gamma_eff,
            "m": self.m,
            "seed": self.seed,
            "method": self.method,
            "flag_counts": {
                flag: self.boundary_flags.count(flag)
                for flag in (FLAG_CLAMPED_LOW, FLAG_CLAMPED_HIGH, FLAG_FAILED)
            },
            "warnings": list(self.warnings),
            "curve": [[n, p] for n, p in self.grid()],
            "roots": [float(r) for r in self.roots],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def to_csv(self) -> str:
        lines = ["n,power"]
        lines += [f"{n:.6f},{p:.6f}" for n, p in self.grid()]
        return "\n".join(lines) + "\n"


def _run_points(design, points, ctx, gamma_eff, n_init, tol_x, tol_f, workers, cancel_check):
    m = points.shape[0]
    roots = np.empty(m)
    flags = [FLAG_NONE] * m
    evals = np.zeros(m, dtype=int)

    def work(r: int):
        gap = _GapFn(design, points[r], ctx, r, gamma_eff)
        res = _solve_gap(gap, n_init, design.n_max, tol_x, tol_f)
        return r, res

    if workers <= 1:
        for r in range(m):
            if cancel_check is not None and r % 64 == 0:
                cancel_check()
            _, res = work(r)
            roots[r], flags[r], evals[r] = res.root, res.flag, res.evals
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for r, res in pool.map(work, range(m)):
                if cancel_check is not None and r % 64 == 0:
                    cancel_check()
                roots[r], flags[r], evals[r] = res.root, res.flag, res.evals
    return roots, flags, evals


def power_curve(
    design: DesignSpec,
    workers: int = 1,
    tol_x: float | None = None,
    tol_f: float = 1e-6,
    cancel_check=None,
) -> PowerCurve:
    """Approximate the full power curve for a posterior-probability or
    Bayes-factor design (credible-interval designs route through
    :func:`ci_power_curve`, which shares this implementation)."""
    ctx = DesignContext.build(design)
    gamma_eff = None
    if not isinstance(design.analysis, CredibleIntervalAnalysis):
        gamma_eff = resolve_gamma(design)
    n0 = initial_n0(design, gamma_eff=gamma_eff)
    if tol_x is None:
        # the gap tolerance is the binding stop; the width tolerance is a
        # guard that also decides when a second consistency pass is needed
        tol_x = 1e-9 * max(1.0, n0)
    n_init = min(max(float(math.ceil(n0)), _N_FLOOR), design.n_max)
    points = sobol_block(ctx.dim, design.m, design.seed)

    roots, flags, evals = _run_points(
        design, points, ctx, gamma_eff, n_init, tol_x, tol_f, workers, cancel_check
    )

    def consistency_pass(anchor: float) -> int:
        reinits = 0
        for r in range(design.m):
            if flags[r] == FLAG_FAILED:
                continue
            gap = _GapFn(design, points[r], ctx, r, gamma_eff)
            margin = gap(anchor)
            consistent = (
                margin >= -tol_f if roots[r] <= anchor else margin < tol_f
            )
            evals[r] += gap.evals
            if consistent:
                continue
            res = _solve_gap(gap, anchor, design.n_max, tol_x, tol_f)
            roots[r], flags[r] = res.root, res.flag
            evals[r] += res.evals
            reinits += 1
        return reinits

    n_low = empirical_quantile(np.sort(roots), design.target)
    anchor = min(max(n_low, _N_FLOOR), design.n_max)
    reinit_count = consistency_pass(anchor)
    n_star = empirical_quantile(np.sort(roots), design.target)
    repeat_tol = max(0.5, 1e-4 * n0)
    if abs(n_star - anchor) > repeat_tol:
        reinit_count += consistency_pass(min(max(n_star, _N_FLOOR), design.n_max))
        n_star = empirical_quantile(np.sort(roots), design.target)

    warnings: list[str] = []
    n_bad = sum(1 for f in flags if f == FLAG_FAILED)
    n_high = sum(1 for f in flags if f == FLAG_CLAMPED_HIGH)
    n_low = sum(1 for f in flags if f == FLAG_CLAMPED_LOW)
    if (n_bad + n_high + n_low) > 0.01 * design.m:
        warnings.append(
            "degraded-quality: more than 1% of points failed or clamped "
            f"(clamped_low: {n_low}, clamped_high: {n_high}, failed: {n_bad})"
        )
    if n_high > 0.01 * design.m:
        warnings.append(f"design unattainable at n_max={design.n_max:g}")

    return PowerCurve(
        roots=roots,
        n0=float(n0),
        n_star=float(n_star),
        recommendation=int(math.ceil(n_star)),
        reinit_count=reinit_count,
        boundary_flags=flags,
        gap_evals=int(np.sum(evals)),
        mean_evals_per_point=float(np.mean(evals)),
        gamma_eff=gamma_eff,
        warnings=warnings,
        seed=design.seed,
        m=design.m,
        method=design.method,
    )


def ci_power_curve(design: DesignSpec, **kwargs) -> PowerCurve:
    """Power curve for equal-tailed credible-interval analyses.

    With both endpoints finite, each point's root is the larger of the
    two one-sided solutions at level 1 - alpha/2; with one endpoint
    infinite this is exactly the posterior-probability procedure at
    threshold 1 - alpha.
    """
    if not isinstance(design.analysis, CredibleIntervalAnalysis):
        raise InvalidArgumentError("ci_power_curve needs a credible_interval analysis")
    return power_curve(design, **kwargs)


def power_at(
    design: DesignSpec,
    n: float,
    points: np.ndarray | None = None,
    ctx: DesignContext | None = None,
    gamma_eff: float | None = None,
) -> float:
    """Fraction of points whose analysis criterion holds at sample size n."""
    if n < _N_FLOOR:
        raise InvalidArgumentError(f"power_at: n must be >= 2, got {n}")
    if ctx is None:
        ctx = DesignContext.build(design)
    if points is None:
        points = sobol_block(ctx.dim, design.m, design.seed)
    if gamma_eff is None and not isinstance(design.analysis, CredibleIntervalAnalysis):
        gamma_eff = resolve_gamma(design)
    hits = 0
    for r in range(points.shape[0]):
        gap = _GapFn(design, points[r], ctx, r, gamma_eff)
        if gap(n) >= 0.0:
            hits += 1
    return hits / points.shape[0]
