"""Per-point normal approximation to the posterior of the comparison.

Given a design, a sample size, and one low-discrepancy point in
(0,1)^(2d), produce the mean/variance normal approximation of the
working-scale comparison under the selected method:

- "bvm": centered at the simulated group MLEs with inverse-information
  curvature scaled by the (effective) sample sizes; priors ignored.
- "laplace": sufficient statistics are recovered from the simulated
  MLEs, the exact posterior is maximized, and its curvature at the mode
  supplies the variance; exponential families only.
- "hybrid": the log-posterior is replaced by its quadratic expansion
  around the simulated MLE plus the exact log-prior; works for any
  family.

The first d coordinates of a point drive group 1, the rest group 2,
whose effective sample size is q * n throughout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import models as _models
from .comparisons import GSpec, HSpec, g_eval, g_grad, h_eval, h_grad, map_interval
from .errors import InvalidArgumentError, UnsupportedOperationError
from .models import ModelSpec, Prior, hybrid_mode, laplace_mode, recover_suffstats, sample_mle
from .numerics import std_normal_cdf

__all__ = [
    "NormalPosterior",
    "DesignSpec",
    "DesignContext",
    "approx_posterior",
    "posterior_prob",
    "interval_prob",
]

METHODS = ("bvm", "laplace", "hybrid")

_VAR_FLOOR = 1e-300


@dataclass(frozen=True)
class NormalPosterior:
    """Normal approximation N(mean, variance) on the working scale."""

    mean: float
    variance: float
    method: str
    n: float
    point_index: int = -1

    def __post_init__(self):
        if not math.isfinite(self.mean):
            raise InvalidArgumentError(f"NormalPosterior: non-finite mean {self.mean}")
        if not self.variance > 0:
            raise InvalidArgumentError(f"NormalPosterior: variance must be > 0, got {self.variance}")


@dataclass(frozen=True)
class PosteriorProbAnalysis:
    gamma: float

    def __post_init__(self):
        if not 0.5 <= self.gamma < 1.0:
            raise InvalidArgumentError(
                f"conviction threshold must satisfy 0.5 <= gamma < 1, got {self.gamma}"
            )


@dataclass(frozen=True)
class BayesFactorAnalysis:
    K: float

    def __post_init__(self):
        if not self.K >= 1.0:
            raise InvalidArgumentError(f"Bayes factor threshold must be >= 1, got {self.K}")


@dataclass(frozen=True)
class CredibleIntervalAnalysis:
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InvalidArgumentError(f"alpha must be in (0,1), got {self.alpha}")


Analysis = PosteriorProbAnalysis | BayesFactorAnalysis | CredibleIntervalAnalysis


@dataclass(frozen=True)
class DesignSpec:
    """Complete description of one power-analysis problem.

    Design values are stored on the transformed parameter scale; use
    :meth:`from_dict` to load the natural-scale wire format.
    """

    model: ModelSpec
    eta10: np.ndarray
    eta20: np.ndarray
    priors: tuple[Prior, Prior]
    g: GSpec
    h: HSpec
    interval: tuple[float, float]
    analysis: Analysis
    target: float
    method: str = "bvm"
    m: int = 1024
    q: float = 1.0
    seed: int = 1
    n_max: float = 1e6
    label: str = ""

    def __post_init__(self):
        eta10 = np.asarray(self.eta10, dtype=float)
        eta20 = np.asarray(self.eta20, dtype=float)
        object.__setattr__(self, "eta10", eta10)
        object.__setattr__(self, "eta20", eta20)
        if eta10.shape != (self.model.d,) or eta20.shape != (self.model.d,):
            raise InvalidArgumentError(
                f"design values must have {self.model.d} components for {self.model.name}"
            )
        if not (np.all(np.isfinite(eta10)) and np.all(np.isfinite(eta20))):
            raise InvalidArgumentError("design values must be finite")
        if not 0.0 < self.target < 1.0:
            raise InvalidArgumentError(f"target power must be in (0,1), got {self.target}")
        if self.method not in METHODS:
            raise InvalidArgumentError(f"unknown method {self.method!r}; expected {METHODS}")
        if self.method == "laplace" and not self.model.exp_family:
            raise UnsupportedOperationError(
                f"laplace method needs an exponential family; {self.model.name} is not - "
                "use the hybrid method"
            )
        if self.m < 1:
            raise InvalidArgumentError("m must be >= 1")
        if self.q <= 0:
            raise InvalidArgumentError(f"q must be positive, got {self.q}")
        if not self.n_max > 2:
            raise InvalidArgumentError("n_max must exceed 2")
        lo, hi = self.interval
        if not lo < hi:
            raise InvalidArgumentError(f"interval endpoints must increase, got {self.interval}")
        n_finite = sum(1 for x in (lo, hi) if math.isfinite(x))
        if isinstance(self.analysis, (PosteriorProbAnalysis, BayesFactorAnalysis)):
            if n_finite == 0:
                raise InvalidArgumentError("at least one interval endpoint must be finite")
        else:
            if n_finite == 0:
                raise InvalidArgumentError("credible-interval designs need a finite endpoint")
        map_interval(self.h, lo, hi)  # raises if the transform rejects the endpoints

    # -- wire format ---------------------------------------------------

    @classmethod
    def from_dict(cls, doc: dict) -> "DesignSpec":
        model = _models.model_from_name(doc["model"])
        dv = doc["design_values"]
        eta10 = model.from_natural(np.asarray(dv["group1"], dtype=float))
        eta20 = model.from_natural(np.asarray(dv["group2"], dtype=float))
        priors = tuple(
            Prior(marginals=tuple(_prior_from_dict(p) for p in doc["priors"][grp]))
            for grp in ("group1", "group2")
        )
        ch = doc["characteristic"]
        g = GSpec(
            kind=ch["kind"],
            threshold=ch.get("threshold"),
            gradient_mode=ch.get("gradient_mode", "analytic"),
        )
        h = HSpec(kind=doc["comparison"])
        lo, hi = doc["interval"]
        interval = (
            -math.inf if lo is None else float(lo),
            math.inf if hi is None else float(hi),
        )
        an = doc["analysis"]
        if an["type"] == "posterior_prob":
            analysis = PosteriorProbAnalysis(gamma=float(an["gamma"]))
        elif an["type"] == "bayes_factor":
            analysis = BayesFactorAnalysis(K=float(an["K"]))
        elif an["type"] == "credible_interval":
            analysis = CredibleIntervalAnalysis(alpha=float(an["alpha"]))
        else:
            raise InvalidArgumentError(f"unknown analysis type {an['type']!r}")
        return cls(
            model=model,
            eta10=eta10,
            eta20=eta20,
            priors=priors,
            g=g,
            h=h,
            interval=interval,
            analysis=analysis,
            target=float(doc["target_power"]),
            method=doc.get("method", "bvm"),
            m=int(doc.get("m", 1024)),
            q=float(doc.get("q", 1.0)),
            seed=int(doc.get("seed", 1)),
            n_max=float(doc.get("n_max", 1e6)),
            label=str(doc.get("label", "")),
        )

    def to_dict(self) -> dict:
        lo, hi = self.interval
        if isinstance(self.analysis, PosteriorProbAnalysis):
            analysis = {"type": "posterior_prob", "gamma": self.analysis.gamma}
        elif isinstance(self.analysis, BayesFactorAnalysis):
            analysis = {"type": "bayes_factor", "K": self.analysis.K}
        else:
            analysis = {"type": "credible_interval", "alpha": self.analysis.alpha}
        ch = {"kind": self.g.kind}
        if self.g.threshold is not None:
            ch["threshold"] = self.g.threshold
        return {
            "model": self.model.name,
            "design_values": {
                "group1": [float(x) for x in self.model.to_natural(self.eta10)],
                "group2": [float(x) for x in self.model.to_natural(self.eta20)],
            },
            "priors": {
                "group1": [_prior_to_dict(p) for p in self.priors[0].marginals],
                "group2": [_prior_to_dict(p) for p in self.priors[1].marginals],
            },
            "characteristic": ch,
            "comparison": self.h.kind,
            "interval": [
                None if not math.isfinite(lo) else lo,
                None if not math.isfinite(hi) else hi,
            ],
            "analysis": analysis,
            "target_power": self.target,
            "method": self.method,
            "m": self.m,
            "q": self.q,
            "seed": self.seed,
            "n_max": self.n_max,
            "label": self.label,
        }

    @classmethod
    def from_json(cls, text: str) -> "DesignSpec":
        return cls.from_dict(json.loads(text))

    def with_seed(self, seed: int) -> "DesignSpec":
        return replace(self, seed=int(seed))


def _prior_from_dict(p: dict):
    if p["family"] == "gamma":
        return _models.GammaPrior(shape=float(p["shape"]), rate=float(p["rate"]))
    if p["family"] == "beta":
        return _models.BetaPrior(a=float(p["a"]), b=float(p["b"]))
    raise InvalidArgumentError(f"unknown prior family {p['family']!r}")


def _prior_to_dict(p) -> dict:
    if isinstance(p, _models.GammaPrior):
        return {"family": "gamma", "shape": p.shape, "rate": p.rate}
    return {"family": "beta", "a": p.a, "b": p.b}


@dataclass
class DesignContext:
    """Per-run cache of design-value factorizations and the working interval."""

    chol1: np.ndarray
    chol2: np.ndarray
    working_interval: tuple[float, float]
    theta0_working: float
    dim: int

    @classmethod
    def build(cls, design: DesignSpec) -> "DesignContext":
        model = design.model
        th1 = g_eval(design.g, model, design.eta10)
        th2 = g_eval(design.g, model, design.eta20)
        return cls(
            chol1=_models.inv_fisher_cholesky(model, design.eta10),
            chol2=_models.inv_fisher_cholesky(model, design.eta20),
            working_interval=map_interval(design.h, *design.interval),
            theta0_working=h_eval(design.h, th1, th2),
            dim=2 * model.d,
        )


def _quad_form_inv(curv: np.ndarray, vec: np.ndarray) -> float:
    """vec' curv^{-1} vec for a small positive-definite curvature matrix."""
    if curv.shape == (1, 1):
        return float(vec[0] * vec[0] / curv[0, 0])
    sol = np.linalg.solve(curv, vec)
    return float(vec @ sol)


def approx_posterior(
    design: DesignSpec,
    n: float,
    u: np.ndarray,
    ctx: DesignContext | None = None,
    point_index: int = -1,
) -> NormalPosterior:
    """Normal approximation for one low-discrepancy point at sample size n."""
    if n < 2:
        raise InvalidArgumentError(f"approx_posterior: n must be >= 2, got {n}")
    u = np.asarray(u, dtype=float)
    model = design.model
    d = model.d
    if u.shape != (2 * d,):
        raise InvalidArgumentError(f"point must have dimension {2 * d}, got {u.shape}")
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise InvalidArgumentError("point coordinates must lie strictly inside (0,1)")
    if ctx is None:
        ctx = DesignContext.build(design)

    eta1_hat = sample_mle(model, design.eta10, n, 1.0, u[:d], chol=ctx.chol1)
    eta2_hat = sample_mle(model, design.eta20, n, design.q, u[d:], chol=ctx.chol2)

    if design.method == "bvm":
        centers = (eta1_hat, eta2_hat)
        curvatures = (
            n * _models.fisher_info(model, eta1_hat),
            design.q * n * _models.fisher_info(model, eta2_hat),
        )
    elif design.method == "laplace":
        c1, j1 = laplace_mode(
            model, recover_suffstats(model, eta1_hat, n), design.priors[0], start=eta1_hat
        )
        c2, j2 = laplace_mode(
            model,
            recover_suffstats(model, eta2_hat, design.q * n),
            design.priors[1],
            start=eta2_hat,
        )
        centers, curvatures = (c1, c2), (j1, j2)
    else:
        c1, j1 = hybrid_mode(model, eta1_hat, n, design.priors[0])
        c2, j2 = hybrid_mode(model, eta2_hat, design.q * n, design.priors[1])
        centers, curvatures = (c1, c2), (j1, j2)

    th1 = g_eval(design.g, model, centers[0])
    th2 = g_eval(design.g, model, centers[1])
    dh1, dh2 = h_grad(design.h, th1, th2)
    mean = h_eval(design.h, th1, th2)
    var = dh1 * dh1 * _quad_form_inv(curvatures[0], g_grad(design.g, model, centers[0]))
    var += dh2 * dh2 * _quad_form_inv(curvatures[1], g_grad(design.g, model, centers[1]))
    return NormalPosterior(
        mean=mean,
        variance=max(var, _VAR_FLOOR),
        method=design.method,
        n=float(n),
        point_index=point_index,
    )


def posterior_prob(post: NormalPosterior, delta: float) -> float:
    """Estimated probability that the comparison falls below ``delta``."""
    if math.isnan(delta):
        raise InvalidArgumentError("posterior_prob: delta is NaN")
    if delta == math.inf:
        return 1.0
    if delta == -math.inf:
        return 0.0
    return std_normal_cdf((delta - post.mean) / math.sqrt(post.variance))


def interval_prob(post: NormalPosterior, lo: float, hi: float) -> float:
    """Estimated probability that the comparison lies in (lo, hi)."""
    if not lo < hi:
        raise InvalidArgumentError(f"interval_prob: need lo < hi, got ({lo}, {hi})")
    p = posterior_prob(post, hi) - posterior_prob(post, lo)
    return min(max(p, 0.0), 1.0)
