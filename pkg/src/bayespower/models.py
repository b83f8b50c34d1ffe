"""Model families: gamma, Weibull, and Bernoulli.

All engine math runs on transformed parameter scales with support on
the whole real line (log scale for gamma and Weibull parameters, logit
scale for the Bernoulli probability).  Priors are specified on the
natural scale; change-of-variable Jacobians are applied internally
whenever a prior enters a transformed-scale computation.

The module-level operations are pure; model and prior objects are
immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .errors import (
    EvaluationError,
    FactorizationError,
    InvalidArgumentError,
    UnsupportedOperationError,
)
from .numerics import cholesky_lower, local_maximize

__all__ = [
    "GammaPrior",
    "BetaPrior",
    "Prior",
    "SuffStats",
    "ModelSpec",
    "GAMMA",
    "WEIBULL",
    "BERNOULLI",
    "model_from_name",
    "fisher_info",
    "sample_mle",
    "recover_suffstats",
    "laplace_mode",
    "hybrid_mode",
    "simulate_data",
    "log_prior_transformed",
    "mle_from_data",
    "suffstats_from_data",
]

_EULER = float(np.euler_gamma)


# ---------------------------------------------------------------------------
# priors


@dataclass(frozen=True)
class GammaPrior:
    """Gamma(shape, rate) marginal prior for a positive natural parameter."""

    shape: float
    rate: float

    def __post_init__(self):
        if self.shape <= 0 or self.rate <= 0:
            raise InvalidArgumentError(f"GammaPrior hyperparameters must be positive: {self}")

    def log_pdf(self, x: float) -> float:
        if x <= 0:
            return -math.inf
        return (
            self.shape * math.log(self.rate)
            - float(_sp.gammaln(self.shape))
            + (self.shape - 1.0) * math.log(x)
            - self.rate * x
        )

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.gamma(self.shape, 1.0 / self.rate, size)


@dataclass(frozen=True)
class BetaPrior:
    """Beta(a, b) marginal prior for a probability parameter."""

    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise InvalidArgumentError(f"BetaPrior hyperparameters must be positive: {self}")

    def log_pdf(self, x: float) -> float:
        if not 0.0 < x < 1.0:
            return -math.inf
        return (
            (self.a - 1.0) * math.log(x)
            + (self.b - 1.0) * math.log1p(-x)
            - float(_sp.betaln(self.a, self.b))
        )

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.beta(self.a, self.b, size)


@dataclass(frozen=True)
class Prior:
    """One marginal prior per natural-scale model parameter."""

    marginals: tuple

    def __post_init__(self):
        if len(self.marginals) == 0:
            raise InvalidArgumentError("Prior needs at least one marginal")

    def sample_natural(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw natural-scale parameter vectors, shape (size, d)."""
        return np.column_stack([m.sample(rng, size) for m in self.marginals])


@dataclass(frozen=True)
class SuffStats:
    """Summed sufficient statistics t together with the sample size n.

    n is real valued: sample size is treated as continuous during
    root-finding, and it enters only as a multiplier.
    """

    t: np.ndarray
    n: float


# ---------------------------------------------------------------------------
# family definitions


class _GammaFamily:
    """Gamma(alpha, beta) with rate beta; transformed scale (log a, log b)."""

    name = "gamma"
    d = 2
    exp_family = True

    @staticmethod
    def to_natural(eta):
        return np.exp(np.asarray(eta, dtype=float))

    @staticmethod
    def from_natural(x):
        return np.log(np.asarray(x, dtype=float))

    @staticmethod
    def fisher_info_t(eta):
        a = math.exp(eta[0])
        tri = float(_sp.polygamma(1, a))
        m = np.array([[a * a * tri, -a], [-a, a]])
        if not np.all(np.isfinite(m)):
            raise EvaluationError(f"gamma fisher information not finite at eta={eta}")
        return m

    @staticmethod
    def suffstats_from_mle(eta_hat, n):
        a, b = math.exp(eta_hat[0]), math.exp(eta_hat[1])
        t1 = n * (float(_sp.digamma(a)) - math.log(b))
        t2 = n * a / b
        return SuffStats(t=np.array([t1, t2]), n=float(n))

    @staticmethod
    def loglik_stats(eta, stats):
        a, b = math.exp(eta[0]), math.exp(eta[1])
        return (
            (a - 1.0) * stats.t[0]
            - b * stats.t[1]
            + stats.n * (a * math.log(b) - float(_sp.gammaln(a)))
        )

    @staticmethod
    def score_t(eta, stats):
        """Gradient of loglik_stats on the transformed scale."""
        a, b = math.exp(eta[0]), math.exp(eta[1])
        sa = a * (stats.t[0] + stats.n * math.log(b) - stats.n * float(_sp.digamma(a)))
        sb = -b * stats.t[1] + stats.n * a
        return np.array([sa, sb])

    @staticmethod
    def log_posterior_t(eta, stats, prior):
        a, b = math.exp(eta[0]), math.exp(eta[1])
        pa, pb = prior.marginals
        # natural-scale gamma priors plus log-Jacobian absorb to a*log(x) - b*x
        return (
            _GammaFamily.loglik_stats(eta, stats)
            + pa.shape * eta[0]
            - pa.rate * a
            + pb.shape * eta[1]
            - pb.rate * b
        )

    @staticmethod
    def log_posterior_grad_t(eta, stats, prior):
        a, b = math.exp(eta[0]), math.exp(eta[1])
        pa, pb = prior.marginals
        ga = (
            a * (stats.t[0] + stats.n * math.log(b) - stats.n * float(_sp.digamma(a)) - pa.rate)
            + pa.shape
        )
        gb = -b * (stats.t[1] + pb.rate) + stats.n * a + pb.shape
        return np.array([ga, gb])

    @staticmethod
    def log_posterior_hess_t(eta, stats, prior):
        a, b = math.exp(eta[0]), math.exp(eta[1])
        pa, pb = prior.marginals
        ga = (
            a * (stats.t[0] + stats.n * math.log(b) - stats.n * float(_sp.digamma(a)) - pa.rate)
            + pa.shape
        )
        haa = (ga - pa.shape) - stats.n * a * a * float(_sp.polygamma(1, a))
        hab = stats.n * a
        hbb = -b * (stats.t[1] + pb.rate)
        return np.array([[haa, hab], [hab, hbb]])

    @staticmethod
    def mle_start_from_stats(stats):
        mean_log = stats.t[0] / stats.n
        mean_y = stats.t[1] / stats.n
        s = math.log(mean_y) - mean_log
        if s <= 0:
            a = 10.0
        else:
            a = (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
        for _ in range(40):
            f = float(_sp.digamma(a)) - math.log(a) + s
            fp = float(_sp.polygamma(1, a)) - 1.0 / a
            step = f / fp
            a_new = a - step
            if a_new <= 0:
                a_new = a / 2.0
            if abs(a_new - a) < 1e-12 * a:
                a = a_new
                break
            a = a_new
        b = a / mean_y
        return np.array([math.log(a), math.log(b)])

    @staticmethod
    def simulate(x_natural, n, rng):
        a, b = x_natural
        return rng.gamma(a, 1.0 / b, int(n))

    @staticmethod
    def loglik_data(eta, y):
        a, b = math.exp(eta[0]), math.exp(eta[1])
        n = y.shape[0]
        return (
            (a - 1.0) * float(np.sum(np.log(y)))
            - b * float(np.sum(y))
            + n * (a * math.log(b) - float(_sp.gammaln(a)))
        )


class _WeibullFamily:
    """Weibull(nu, lambda) shape/scale; transformed scale (log nu, log lambda)."""

    name = "weibull"
    d = 2
    exp_family = False

    to_natural = staticmethod(_GammaFamily.to_natural)
    from_natural = staticmethod(_GammaFamily.from_natural)

    # constants of the unit-exponential pivot: E[(1 + log z - z log z)^2]
    # and E[(1 + log z - z log z)(z - 1)] for z ~ Exp(1)
    _C_SHAPE = math.pi**2 / 6.0 + (1.0 - _EULER) ** 2
    _C_CROSS = _EULER - 1.0

    @classmethod
    def fisher_info_t(cls, eta):
        nu = math.exp(eta[0])
        m = np.array(
            [[cls._C_SHAPE, nu * cls._C_CROSS], [nu * cls._C_CROSS, nu * nu]]
        )
        if not np.all(np.isfinite(m)):
            raise EvaluationError(f"weibull fisher information not finite at eta={eta}")
        return m

    @staticmethod
    def simulate(x_natural, n, rng):
        nu, lam = x_natural
        return lam * rng.weibull(nu, int(n))

    @staticmethod
    def loglik_data(eta, y):
        nu, lam = math.exp(eta[0]), math.exp(eta[1])
        n = y.shape[0]
        return (
            n * (math.log(nu) - nu * math.log(lam))
            + (nu - 1.0) * float(np.sum(np.log(y)))
            - float(np.sum(y**nu)) / lam**nu
        )


class _BernoulliFamily:
    """Bernoulli(theta); transformed scale logit(theta)."""

    name = "bernoulli"
    d = 1
    exp_family = True

    @staticmethod
    def to_natural(eta):
        return 1.0 / (1.0 + np.exp(-np.asarray(eta, dtype=float)))

    @staticmethod
    def from_natural(x):
        x = np.asarray(x, dtype=float)
        return np.log(x) - np.log1p(-x)

    @staticmethod
    def fisher_info_t(eta):
        th = 1.0 / (1.0 + math.exp(-eta[0]))
        v = th * (1.0 - th)
        if v <= 0.0 or not math.isfinite(v):
            raise EvaluationError(f"bernoulli fisher information degenerate at eta={eta}")
        return np.array([[v]])

    @staticmethod
    def suffstats_from_mle(eta_hat, n):
        th = 1.0 / (1.0 + math.exp(-eta_hat[0]))
        return SuffStats(t=np.array([n * th]), n=float(n))

    @staticmethod
    def loglik_stats(eta, stats):
        th = 1.0 / (1.0 + math.exp(-eta[0]))
        return stats.t[0] * math.log(th) + (stats.n - stats.t[0]) * math.log1p(-th)

    @staticmethod
    def score_t(eta, stats):
        th = 1.0 / (1.0 + math.exp(-eta[0]))
        return np.array([stats.t[0] - stats.n * th])

    @staticmethod
    def log_posterior_t(eta, stats, prior):
        (pm,) = prior.marginals
        th = 1.0 / (1.0 + math.exp(-eta[0]))
        # beta prior plus logit Jacobian: (T + a) log th + (n - T + b) log(1 - th)
        return (stats.t[0] + pm.a) * math.log(th) + (stats.n - stats.t[0] + pm.b) * math.log1p(
            -th
        )

    @staticmethod
    def simulate(x_natural, n, rng):
        return (rng.random(int(n)) < x_natural[0]).astype(float)

    @staticmethod
    def loglik_data(eta, y):
        stats = SuffStats(t=np.array([float(np.sum(y))]), n=float(y.shape[0]))
        return _BernoulliFamily.loglik_stats(eta, stats)


GAMMA = _GammaFamily()
WEIBULL = _WeibullFamily()
BERNOULLI = _BernoulliFamily()

ModelSpec = _GammaFamily | _WeibullFamily | _BernoulliFamily

_FAMILIES = {m.name: m for m in (GAMMA, WEIBULL, BERNOULLI)}


def model_from_name(name: str) -> ModelSpec:
    try:
        return _FAMILIES[name]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown model family {name!r}; expected one of {sorted(_FAMILIES)}"
        ) from None


def _validate_prior(model: ModelSpec, prior: Prior) -> None:
    if len(prior.marginals) != model.d:
        raise InvalidArgumentError(
            f"{model.name} needs {model.d} prior marginals, got {len(prior.marginals)}"
        )
    expected = BetaPrior if model.name == "bernoulli" else GammaPrior
    for m in prior.marginals:
        if not isinstance(m, expected):
            raise InvalidArgumentError(
                f"{model.name} priors must be {expected.__name__}, got {type(m).__name__}"
            )


# ---------------------------------------------------------------------------
# spec operations


def fisher_info(model: ModelSpec, eta: np.ndarray) -> np.ndarray:
    """Fisher information for one observation, on the transformed scale."""
    eta = np.asarray(eta, dtype=float)
    if not np.all(np.isfinite(eta)):
        raise InvalidArgumentError(f"fisher_info: eta must be finite, got {eta}")
    return model.fisher_info_t(eta)


def inv_fisher_cholesky(model: ModelSpec, eta: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of the inverse Fisher information at eta."""
    info = fisher_info(model, eta)
    inv = np.linalg.inv(info)
    return cholesky_lower(0.5 * (inv + inv.T))


def sample_mle(
    model: ModelSpec,
    eta0: np.ndarray,
    n: float,
    q: float,
    u_block: np.ndarray,
    chol: np.ndarray | None = None,
) -> np.ndarray:
    """Draw a transformed-scale MLE from its limiting normal distribution.

    Returns eta0 + L z / sqrt(q n), where L is the Cholesky factor of
    the inverse Fisher information at eta0 and z holds the normal
    quantiles of u_block.  Callers pass q = 1 for the first group; the
    second group's effective size is q n.  The coordinate-by-coordinate
    conditional construction this reproduces makes the deviation from
    eta0 scale exactly as 1/sqrt(n) for fixed u.
    """
    if n < 1:
        raise InvalidArgumentError(f"sample_mle: n must be >= 1, got {n}")
    if q <= 0:
        raise InvalidArgumentError(f"sample_mle: q must be positive, got {q}")
    u = np.asarray(u_block, dtype=float)
    if u.shape != (model.d,):
        raise InvalidArgumentError(f"sample_mle: u_block must have shape ({model.d},)")
    if chol is None:
        chol = inv_fisher_cholesky(model, eta0)
    z = _sp.ndtri(u)
    return np.asarray(eta0, dtype=float) + (chol @ z) / math.sqrt(q * n)


def recover_suffstats(model: ModelSpec, eta_hat: np.ndarray, n: float) -> SuffStats:
    """Invert the score equations at the MLE to recover summed statistics."""
    if not model.exp_family:
        raise UnsupportedOperationError(
            f"{model.name} is not an exponential family; sufficient statistics cannot "
            "be recovered from the MLE - use the hybrid method instead"
        )
    return model.suffstats_from_mle(np.asarray(eta_hat, dtype=float), float(n))


def laplace_mode(
    model: ModelSpec,
    stats: SuffStats,
    prior: Prior,
    start: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mode and curvature on the transformed scale.

    The posterior combines the likelihood implied by ``stats`` with the
    natural-scale prior and its transform Jacobian.  Returns the mode
    and the negated log-posterior Hessian evaluated there; the
    curvature is checked positive-definite.
    """
    _validate_prior(model, prior)
    if model.name == "bernoulli":
        (pm,) = prior.marginals
        th = (stats.t[0] + pm.a) / (stats.n + pm.a + pm.b)
        mode = np.array([math.log(th) - math.log1p(-th)])
        curv = np.array([[(stats.n + pm.a + pm.b) * th * (1.0 - th)]])
        return mode, curv
    if model.name == "gamma":
        x0 = model.mle_start_from_stats(stats) if start is None else np.asarray(start, float)
        mode = local_maximize(
            lambda e: model.log_posterior_t(e, stats, prior),
            x0,
            tol=1e-9,
            grad=lambda e: model.log_posterior_grad_t(e, stats, prior),
            hess=lambda e: model.log_posterior_hess_t(e, stats, prior),
        )
        curv = -model.log_posterior_hess_t(mode, stats, prior)
        curv = 0.5 * (curv + curv.T)
        cholesky_lower(curv)  # raises FactorizationError if not PD
        return mode, curv
    raise UnsupportedOperationError(f"laplace_mode not available for {model.name}")


def log_prior_transformed(model: ModelSpec, prior: Prior, eta: np.ndarray) -> float:
    """Log prior density of the transformed parameter, Jacobian included."""
    _validate_prior(model, prior)
    eta = np.asarray(eta, dtype=float)
    if model.name == "bernoulli":
        (pm,) = prior.marginals
        th = 1.0 / (1.0 + math.exp(-eta[0]))
        return (
            pm.a * math.log(th) + pm.b * math.log1p(-th) - float(_sp.betaln(pm.a, pm.b))
        )
    total = 0.0
    for k, pm in enumerate(prior.marginals):
        x = math.exp(eta[k])
        # gamma prior with log transform: a*eta - b*exp(eta) + normalizer
        total += (
            pm.shape * eta[k]
            - pm.rate * x
            + pm.shape * math.log(pm.rate)
            - float(_sp.gammaln(pm.shape))
        )
    return total


def _log_prior_grad_hess_t(model, prior, eta):
    if model.name == "bernoulli":
        (pm,) = prior.marginals
        th = 1.0 / (1.0 + math.exp(-eta[0]))
        g = np.array([pm.a - (pm.a + pm.b) * th])
        h = np.array([[-(pm.a + pm.b) * th * (1.0 - th)]])
        return g, h
    x = np.exp(eta)
    shapes = np.array([pm.shape for pm in prior.marginals])
    rates = np.array([pm.rate for pm in prior.marginals])
    g = shapes - rates * x
    h = np.diag(-rates * x)
    return g, h


def hybrid_mode(
    model: ModelSpec,
    eta_hat: np.ndarray,
    n: float,
    prior: Prior,
) -> tuple[np.ndarray, np.ndarray]:
    """Mode of the curvature-anchored posterior surrogate, plus curvature.

    Maximizes -(n/2)(eta - eta_hat)' I(eta_hat) (eta - eta_hat) +
    log prior(eta) over the transformed scale; the returned curvature is
    n I(eta_mode) minus the prior's log-density Hessian there.
    """
    if n < 1:
        raise InvalidArgumentError(f"hybrid_mode: n must be >= 1, got {n}")
    _validate_prior(model, prior)
    eta_hat = np.asarray(eta_hat, dtype=float)
    info_hat = fisher_info(model, eta_hat)

    def obj(e):
        delta = e - eta_hat
        return -0.5 * n * float(delta @ info_hat @ delta) + log_prior_transformed(
            model, prior, e
        )

    def grad(e):
        gp, _ = _log_prior_grad_hess_t(model, prior, e)
        return -n * (info_hat @ (e - eta_hat)) + gp

    def hess(e):
        _, hp = _log_prior_grad_hess_t(model, prior, e)
        return -n * info_hat + hp

    mode = local_maximize(obj, eta_hat, tol=1e-9, grad=grad, hess=hess)
    _, hp = _log_prior_grad_hess_t(model, prior, mode)
    curv = n * fisher_info(model, mode) - hp
    curv = 0.5 * (curv + curv.T)
    cholesky_lower(curv)  # raises FactorizationError if not PD
    return mode, curv


def simulate_data(model: ModelSpec, eta0: np.ndarray, n: int, rng_seed) -> np.ndarray:
    """n independent draws from the family at the natural-scale parameters.

    ``rng_seed`` may be an integer seed or an existing Generator.
    """
    if n < 1:
        raise InvalidArgumentError(f"simulate_data: n must be >= 1, got {n}")
    rng = (
        rng_seed
        if isinstance(rng_seed, np.random.Generator)
        else np.random.default_rng(rng_seed)
    )
    x = model.to_natural(np.asarray(eta0, dtype=float))
    return model.simulate(x, n, rng)


def suffstats_from_data(model: ModelSpec, y: np.ndarray) -> SuffStats:
    """Summed sufficient statistics computed directly from raw data."""
    y = np.asarray(y, dtype=float)
    if model.name == "gamma":
        return SuffStats(
            t=np.array([float(np.sum(np.log(y))), float(np.sum(y))]), n=float(y.shape[0])
        )
    if model.name == "bernoulli":
        return SuffStats(t=np.array([float(np.sum(y))]), n=float(y.shape[0]))
    raise UnsupportedOperationError(f"{model.name} has no low-dimensional statistics")


def mle_from_data(model: ModelSpec, y: np.ndarray) -> np.ndarray:
    """Transformed-scale maximum likelihood estimate from raw data."""
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if model.name == "bernoulli":
        th = float(np.mean(y))
        eps = 0.5 / max(n, 1)
        th = min(max(th, eps), 1.0 - eps)
        return np.array([math.log(th) - math.log1p(-th)])
    if model.name == "gamma":
        return GAMMA.mle_start_from_stats(suffstats_from_data(GAMMA, y))
    # weibull: Newton on the profile likelihood in the shape parameter
    logy = np.log(y)
    mean_logy = float(np.mean(logy))
    nu = 1.2 / max(float(np.std(logy)), 1e-6)
    for _ in range(100):
        ynu = y**nu
        s0 = float(np.sum(ynu))
        s1 = float(np.sum(ynu * logy))
        s2 = float(np.sum(ynu * logy * logy))
        f = s1 / s0 - 1.0 / nu - mean_logy
        fp = (s2 * s0 - s1 * s1) / (s0 * s0) + 1.0 / (nu * nu)
        step = f / fp
        nu_new = nu - step
        if nu_new <= 0:
            nu_new = nu / 2.0
        if abs(nu_new - nu) < 1e-12 * nu:
            nu = nu_new
            break
        nu = nu_new
    lam = (float(np.mean(y**nu))) ** (1.0 / nu)
    return np.array([math.log(nu), math.log(lam)])
