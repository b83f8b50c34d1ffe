"""Group characteristics, comparison functions, and working transforms.

A characteristic g maps a group's (transformed) model parameters to a
scalar such as a tail probability.  A comparison h combines the two
group characteristics into the scalar under test, expressed on a
strictly increasing *working* scale (identity for differences, log for
ratios, a log-odds-style map for differences of proportions).  Interval
endpoints are pushed through the same working transform once, at design
load, so everything downstream compares on a single scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGradientError, EvaluationError, InvalidArgumentError
from .models import ModelSpec
from .numerics import log_gamma, reg_inc_gamma_upper

__all__ = ["GSpec", "HSpec", "g_eval", "g_grad", "h_eval", "h_grad", "map_interval"]

# keep characteristics strictly inside (0, 1) so log-based comparisons stay finite
_THETA_FLOOR = 1e-300
_THETA_CEIL = 1.0 - 1e-16


@dataclass(frozen=True)
class GSpec:
    """Scalar group characteristic.

    kind "tail_prob" is the probability of exceeding ``threshold``;
    kind "identity" is the success probability itself (Bernoulli only).
    gradient_mode "numeric" uses central differences with the given
    relative step for components lacking an elementary derivative.
    """

    kind: str
    threshold: float | None = None
    gradient_mode: str = "analytic"
    numeric_step: float = 1e-5
    degenerate_tol: float = 1e-12

    def __post_init__(self):
        if self.kind not in ("tail_prob", "identity"):
            raise InvalidArgumentError(f"GSpec: unknown kind {self.kind!r}")
        if self.kind == "tail_prob":
            if self.threshold is None or self.threshold <= 0:
                raise InvalidArgumentError("GSpec: tail_prob needs a positive threshold")
        if self.gradient_mode not in ("analytic", "numeric"):
            raise InvalidArgumentError(f"GSpec: unknown gradient_mode {self.gradient_mode!r}")


@dataclass(frozen=True)
class HSpec:
    """Two-group comparison with its induced working transform."""

    kind: str

    def __post_init__(self):
        if self.kind not in ("difference", "ratio", "proportion_difference"):
            raise InvalidArgumentError(f"HSpec: unknown kind {self.kind!r}")


def _clip_theta(v: float) -> float:
    return min(max(v, _THETA_FLOOR), _THETA_CEIL)


def g_eval(g: GSpec, model: ModelSpec, eta: np.ndarray) -> float:
    """Characteristic value at a transformed-scale parameter vector."""
    eta = np.asarray(eta, dtype=float)
    if not np.all(np.isfinite(eta)):
        raise InvalidArgumentError(f"g_eval: eta must be finite, got {eta}")
    if g.kind == "identity":
        if model.name != "bernoulli":
            raise InvalidArgumentError("identity characteristic is Bernoulli-only")
        return _clip_theta(1.0 / (1.0 + math.exp(-eta[0])))
    if model.name == "gamma":
        a, b = math.exp(eta[0]), math.exp(eta[1])
        return _clip_theta(reg_inc_gamma_upper(a, b * g.threshold))
    if model.name == "weibull":
        nu, lam = math.exp(eta[0]), math.exp(eta[1])
        return _clip_theta(math.exp(-((g.threshold / lam) ** nu)))
    raise InvalidArgumentError(f"tail_prob not defined for model {model.name}")


def g_grad(g: GSpec, model: ModelSpec, eta: np.ndarray) -> np.ndarray:
    """Gradient of the characteristic with respect to the transformed parameters.

    Analytic where an elementary form exists; the gamma tail's shape
    component falls back to central differences (no elementary
    derivative of the regularized incomplete gamma in its first
    argument).
    """
    eta = np.asarray(eta, dtype=float)
    if g.kind == "identity":
        th = 1.0 / (1.0 + math.exp(-eta[0]))
        grad = np.array([th * (1.0 - th)])
    elif model.name == "weibull" and g.gradient_mode == "analytic":
        nu, lam = math.exp(eta[0]), math.exp(eta[1])
        w = (g.threshold / lam) ** nu
        val = math.exp(-w)
        logw = nu * math.log(g.threshold / lam)
        grad = np.array([-val * w * logw, val * w * nu])
    elif model.name == "gamma" and g.gradient_mode == "analytic":
        a, b = math.exp(eta[0]), math.exp(eta[1])
        x = b * g.threshold
        # d/d(log beta) of Q(a, b*kappa) in closed form
        log_db = a * math.log(x) - x - log_gamma(a)
        d_beta = -math.exp(log_db) if log_db > -745.0 else 0.0
        # shape component numerically: central difference in log alpha
        h = g.numeric_step
        up = reg_inc_gamma_upper(math.exp(eta[0] + h), x)
        dn = reg_inc_gamma_upper(math.exp(eta[0] - h), x)
        grad = np.array([(up - dn) / (2.0 * h), d_beta])
    else:
        h = g.numeric_step
        grad = np.empty(model.d)
        for k in range(model.d):
            ep, em = eta.copy(), eta.copy()
            ep[k] += h
            em[k] -= h
            grad[k] = (g_eval(g, model, ep) - g_eval(g, model, em)) / (2.0 * h)
    if not np.all(np.isfinite(grad)):
        raise EvaluationError(f"g_grad: non-finite gradient at eta={eta}")
    if np.all(np.abs(grad) < g.degenerate_tol):
        raise DegenerateGradientError(
            f"characteristic gradient vanished at eta={eta}; the design is degenerate there"
        )
    return grad


def h_eval(h: HSpec, theta1: float, theta2: float) -> float:
    """Comparison value on the working-transform scale."""
    if h.kind == "difference":
        return theta1 - theta2
    if h.kind == "ratio":
        if theta1 <= 0 or theta2 <= 0:
            raise InvalidArgumentError("ratio comparison needs positive characteristics")
        return math.log(theta1) - math.log(theta2)
    # proportion_difference
    if not (0.0 < theta1 < 1.0 and 0.0 < theta2 < 1.0):
        raise InvalidArgumentError(
            "proportion_difference comparison needs characteristics in (0,1)"
        )
    s = theta1 - theta2
    return math.log1p(s) - math.log1p(-s)


def h_grad(h: HSpec, theta1: float, theta2: float) -> tuple[float, float]:
    """Partial derivatives of the working-scale comparison in (theta1, theta2)."""
    if h.kind == "difference":
        return 1.0, -1.0
    if h.kind == "ratio":
        if theta1 <= 0 or theta2 <= 0:
            raise InvalidArgumentError("ratio comparison needs positive characteristics")
        return 1.0 / theta1, -1.0 / theta2
    s = theta1 - theta2
    d = 2.0 / (1.0 - s * s)
    return d, -d


def map_interval(h: HSpec, delta_l: float, delta_u: float) -> tuple[float, float]:
    """Push natural-scale interval endpoints through the working transform.

    Infinities map to infinities; endpoints outside the comparison's
    natural range saturate to the matching infinity.
    """
    if not delta_l < delta_u:
        raise InvalidArgumentError(
            f"map_interval: endpoints must satisfy delta_l < delta_u, got "
            f"({delta_l}, {delta_u})"
        )

    def one(x: float) -> float:
        if h.kind == "difference":
            return x
        if h.kind == "ratio":
            if x == math.inf:
                return math.inf
            if x <= 0.0:
                return -math.inf
            return math.log(x)
        if x >= 1.0:
            return math.inf
        if x <= -1.0:
            return -math.inf
        return math.log1p(x) - math.log1p(-x)

    lo, hi = one(delta_l), one(delta_u)
    if not lo < hi:
        raise InvalidArgumentError(
            f"map_interval: transform collapsed the interval ({delta_l}, {delta_u})"
        )
    return lo, hi
