"""Independent Monte Carlo verification of engine power estimates.

This path never touches the engine's normal approximations: it
simulates raw data from the design distributions, computes each group's
posterior exactly (conjugate beta) or on a dense deterministic grid,
draws from that posterior, and evaluates the analysis criterion on the
draws.  It also hosts the Sobol-versus-pseudorandom precision study.

Per-repetition seeds derive from (seed, rep index), so results are
independent of execution order and worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .approx import BayesFactorAnalysis, CredibleIntervalAnalysis, DesignContext, DesignSpec
from .errors import GridResolutionError, InvalidArgumentError
from .lowdisc import sobol_block
from .models import fisher_info, mle_from_data, simulate_data
from .powercurve import power_at, resolve_gamma

__all__ = ["OracleReport", "mc_power", "variance_study", "conventional_curve", "VarianceRow"]

_GRID_POINTS = 100
_GRID_HALF_WIDTH_SDS = 8.0
_THETA_DRAWS = 10_000
_BOUNDARY_MASS_TOL = 1e-4


@dataclass(frozen=True)
class OracleReport:
    n: int
    reps: int
    power_hat: float
    ci95: tuple[float, float]
    posterior_method: str

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "reps": self.reps,
            "power_hat": self.power_hat,
            "ci95": [self.ci95[0], self.ci95[1]],
            "posterior_method": self.posterior_method,
        }


def _log_prior_grid(design: DesignSpec, group: int, axes: list[np.ndarray]) -> np.ndarray:
    """Log prior density over a transformed-scale grid, Jacobian included."""
    prior = design.priors[group]
    model = design.model
    if model.name == "bernoulli":
        (pm,) = prior.marginals
        eta = axes[0]
        th = 1.0 / (1.0 + np.exp(-eta))
        return pm.a * np.log(th) + pm.b * np.log1p(-th)
    pa, pb = prior.marginals
    la = pa.shape * axes[0] - pa.rate * np.exp(axes[0])
    lb = pb.shape * axes[1] - pb.rate * np.exp(axes[1])
    return la[:, None] + lb[None, :]


def _log_lik_grid(design: DesignSpec, axes: list[np.ndarray], y: np.ndarray) -> np.ndarray:
    model = design.model
    n = y.shape[0]
    if model.name == "bernoulli":
        t = float(np.sum(y))
        th = 1.0 / (1.0 + np.exp(-axes[0]))
        return t * np.log(th) + (n - t) * np.log1p(-th)
    if model.name == "gamma":
        a = np.exp(axes[0])[:, None]
        b = np.exp(axes[1])[None, :]
        t1, t2 = float(np.sum(np.log(y))), float(np.sum(y))
        return (a - 1.0) * t1 - b * t2 + n * (a * np.log(b) - _sp.gammaln(a))
    # weibull: sum_i (y_i/lam)^nu separates into lam^-nu * sum_i y_i^nu
    nu = np.exp(axes[0])
    lam = np.exp(axes[1])
    logy_sum = float(np.sum(np.log(y)))
    s_nu = np.array([float(np.sum(y**v)) for v in nu])
    out = (
        n * (np.log(nu)[:, None] - nu[:, None] * np.log(lam)[None, :])
        + (nu - 1.0)[:, None] * logy_sum
        - s_nu[:, None] * lam[None, :] ** (-nu[:, None])
    )
    return out


def _grid_posterior_draws(
    design: DesignSpec, group: int, y: np.ndarray, rng: np.random.Generator, draws: int
) -> np.ndarray:
    """Draw transformed-scale parameters from a dense grid posterior."""
    model = design.model
    eta_hat = mle_from_data(model, y)
    info = fisher_info(model, eta_hat) * y.shape[0]
    sds = np.sqrt(np.diag(np.linalg.inv(info)))
    axes = [
        np.linspace(
            eta_hat[k] - _GRID_HALF_WIDTH_SDS * sds[k],
            eta_hat[k] + _GRID_HALF_WIDTH_SDS * sds[k],
            _GRID_POINTS,
        )
        for k in range(model.d)
    ]
    logp = _log_lik_grid(design, axes, y) + _log_prior_grid(design, group, axes)
    logp -= logp.max()
    w = np.exp(logp)
    total = float(w.sum())
    if model.d == 1:
        boundary = float(w[0] + w[-1])
    else:
        boundary = float(w[0, :].sum() + w[-1, :].sum() + w[:, 0].sum() + w[:, -1].sum())
    if boundary > _BOUNDARY_MASS_TOL * total:
        raise GridResolutionError(
            f"posterior grid is leaking mass ({boundary / total:.2e} of total on the "
            "boundary); widen the grid",
            suggested_bounds=[
                (float(a[0] - 8 * s), float(a[-1] + 8 * s)) for a, s in zip(axes, sds)
            ],
        )
    p = (w / total).ravel()
    idx = rng.choice(p.size, size=draws, p=p)
    jitter = rng.random((draws, model.d)) - 0.5
    if model.d == 1:
        step = axes[0][1] - axes[0][0]
        return (axes[0][idx] + jitter[:, 0] * step)[:, None]
    ia, ib = np.unravel_index(idx, (_GRID_POINTS, _GRID_POINTS))
    step_a = axes[0][1] - axes[0][0]
    step_b = axes[1][1] - axes[1][0]
    return np.column_stack(
        [axes[0][ia] + jitter[:, 0] * step_a, axes[1][ib] + jitter[:, 1] * step_b]
    )


def _conjugate_beta_draws(
    design: DesignSpec, group: int, y: np.ndarray, rng: np.random.Generator, draws: int
) -> np.ndarray:
    (pm,) = design.priors[group].marginals
    t = float(np.sum(y))
    th = rng.beta(pm.a + t, pm.b + y.shape[0] - t, draws)
    eps = 1e-12
    th = np.clip(th, eps, 1.0 - eps)
    return (np.log(th) - np.log1p(-th))[:, None]


def _theta_from_eta_draws(design: DesignSpec, eta: np.ndarray) -> np.ndarray:
    g = design.g
    if g.kind == "identity":
        return 1.0 / (1.0 + np.exp(-eta[:, 0]))
    if design.model.name == "gamma":
        return _sp.gammaincc(np.exp(eta[:, 0]), np.exp(eta[:, 1]) * g.threshold)
    nu, lam = np.exp(eta[:, 0]), np.exp(eta[:, 1])
    return np.exp(-((g.threshold / lam) ** nu))


def _working_draws(design: DesignSpec, th1: np.ndarray, th2: np.ndarray) -> np.ndarray:
    kind = design.h.kind
    if kind == "difference":
        return th1 - th2
    if kind == "ratio":
        tiny = 1e-300
        return np.log(np.maximum(th1, tiny)) - np.log(np.maximum(th2, tiny))
    s = np.clip(th1 - th2, -1 + 1e-15, 1 - 1e-15)
    return np.log1p(s) - np.log1p(-s)


def mc_power(
    design: DesignSpec,
    n: int,
    reps: int,
    seed: int,
    posterior_method: str | None = None,
    theta_draws: int = _THETA_DRAWS,
    gamma_eff: float | None = None,
) -> OracleReport:
    """Estimate power at sample size n by simulating raw experiments.

    Each repetition simulates both groups (sizes n and ceil(q n)),
    computes per-group posteriors without any normal approximation, and
    checks the analysis criterion on paired posterior draws.
    """
    if reps < 100:
        raise InvalidArgumentError(f"mc_power: reps must be >= 100, got {reps}")
    if n < 2:
        raise InvalidArgumentError(f"mc_power: n must be >= 2, got {n}")
    model = design.model
    if posterior_method is None:
        posterior_method = "conjugate_beta" if model.name == "bernoulli" else "grid2d"
    if posterior_method == "conjugate_beta" and model.name != "bernoulli":
        raise InvalidArgumentError("conjugate_beta posterior is Bernoulli-only")
    ctx = DesignContext.build(design)
    lo, hi = ctx.working_interval
    an = design.analysis
    if isinstance(an, CredibleIntervalAnalysis):
        gamma = None
        alpha = an.alpha
        if math.isinf(lo) or math.isinf(hi):
            gamma, alpha = 1.0 - alpha, None
    else:
        gamma = resolve_gamma(design, pi0=None) if gamma_eff is None else gamma_eff
        alpha = None
    n2 = int(math.ceil(design.q * n))
    hits = 0
    for rep in range(reps):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), rep]))
        y1 = simulate_data(model, design.eta10, n, rng)
        y2 = simulate_data(model, design.eta20, n2, rng)
        if posterior_method == "conjugate_beta":
            eta1 = _conjugate_beta_draws(design, 0, y1, rng, theta_draws)
            eta2 = _conjugate_beta_draws(design, 1, y2, rng, theta_draws)
        else:
            eta1 = _grid_posterior_draws(design, 0, y1, rng, theta_draws)
            eta2 = _grid_posterior_draws(design, 1, y2, rng, theta_draws)
        w = _working_draws(
            design, _theta_from_eta_draws(design, eta1), _theta_from_eta_draws(design, eta2)
        )
        if gamma is not None:
            ok = float(np.mean((w > lo) & (w < hi))) >= gamma
        else:
            ok = float(np.mean(w < lo)) < alpha / 2.0 and float(np.mean(w > hi)) < alpha / 2.0
        hits += bool(ok)
    p = hits / reps
    half = 1.959964 * math.sqrt(max(p * (1.0 - p), 1e-12) / reps)
    return OracleReport(
        n=int(n),
        reps=int(reps),
        power_hat=p,
        ci95=(max(0.0, p - half), min(1.0, p + half)),
        posterior_method=posterior_method,
    )


@dataclass(frozen=True)
class VarianceRow:
    n: int
    sobol_sd: float
    prng_sd: float
    sobol_mean: float
    prng_mean: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "sobol_sd": self.sobol_sd,
            "prng_sd": self.prng_sd,
            "sobol_mean": self.sobol_mean,
            "prng_mean": self.prng_mean,
        }


def _child_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence([int(seed), *key]).generate_state(1, np.uint64)[0])


def variance_study(
    design: DesignSpec,
    n_grid: list[int],
    m: int,
    replications: int,
    seed: int,
) -> list[VarianceRow]:
    """Precision of the point-set power estimate: Sobol' versus pseudorandom.

    For each n, the engine's power estimate is replicated with fresh
    digital shifts and with fresh pseudorandom point sets of the same
    length; the two sample standard deviations are reported.
    """
    if replications < 50:
        raise InvalidArgumentError(f"variance_study: replications must be >= 50, got {replications}")
    ctx = DesignContext.build(design)
    gamma_eff = None
    if not isinstance(design.analysis, CredibleIntervalAnalysis):
        gamma_eff = resolve_gamma(design)
    rows = []
    for i, n in enumerate(n_grid):
        sob = np.empty(replications)
        prng = np.empty(replications)
        for rep in range(replications):
            block = sobol_block(ctx.dim, m, _child_seed(seed, i, rep, 0))
            sob[rep] = power_at(design, n, points=block, ctx=ctx, gamma_eff=gamma_eff)
            rng = np.random.default_rng(np.random.SeedSequence([int(seed), i, rep, 1]))
            u = rng.random((m, ctx.dim))
            u = np.clip(u, 2.0**-32, 1.0 - 2.0**-32)
            prng[rep] = power_at(design, n, points=u, ctx=ctx, gamma_eff=gamma_eff)
        rows.append(
            VarianceRow(
                n=int(n),
                sobol_sd=float(np.std(sob, ddof=1)),
                prng_sd=float(np.std(prng, ddof=1)),
                sobol_mean=float(np.mean(sob)),
                prng_mean=float(np.mean(prng)),
            )
        )
    return rows


def conventional_curve(
    design: DesignSpec,
    n_grid: list[int],
    reps: int,
    seed: int,
    posterior_method: str | None = None,
) -> list[OracleReport]:
    """Monte Carlo power at each grid sample size (the baseline curve)."""
    if list(n_grid) != sorted(n_grid):
        raise InvalidArgumentError("conventional_curve: n_grid must be sorted ascending")
    return [
        mc_power(
            design,
            int(n),
            reps,
            _child_seed(seed, int(n)),
            posterior_method=posterior_method,
        )
        for n in n_grid
    ]


def reports_to_csv(reports: list[OracleReport]) -> str:
    lines = ["n,power,ci_lo,ci_hi"]
    lines += [
        f"{r.n},{r.power_hat:.6f},{r.ci95[0]:.6f},{r.ci95[1]:.6f}" for r in reports
    ]
    return "\n".join(lines) + "\n"
