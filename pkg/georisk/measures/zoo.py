"""
Concrete risk measures on finite spaces.

Monetary side: var, avar, expectation, entropic, hg_premium.
Return side: arar, h0_premium, pnorm and its robust variants, logconvex_eval,
mean_value_ce and the Orlicz premium (see orlicz.py).
"""

import math
import logging
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from georisk.errors import DomainError, InvalidInputError
from georisk.measures.kernels import LossKernel
from georisk.measures.orlicz import OrliczFunction, orlicz_root
from georisk.prob_core import (
    Position,
    Scenario,
    ScenarioSet,
    check_same_space,
    expect,
    quantile,
    quantile_steps,
    tail_integral,
)

logger = logging.getLogger(__name__)


def _require_positive(x: Position):
    if np.any(x.values <= 0):
        raise DomainError("return-side measures need strictly positive positions")


def _weights(x: Position, q: Optional[Scenario]) -> np.ndarray:
    if q is None:
        return x.space.p
    check_same_space(x, q)
    return q.weights


def _penalties(qs: ScenarioSet, c: Optional[Sequence[float]]) -> np.ndarray:
    if c is None:
        return np.zeros(len(qs))
    c = np.asarray(c, dtype=float)
    if c.shape != (len(qs),):
        raise InvalidInputError(f"expected {len(qs)} penalties, got {c.size}")
    if np.any(c < 0) or not np.all(np.isfinite(c)):
        raise InvalidInputError("penalties must be finite and nonnegative")
    return c


# ---------------------------------------------------------------------------
# Monetary side
# ---------------------------------------------------------------------------

def var(x: Position, alpha: float) -> float:
    """Value-at-Risk: the smallest alpha-quantile"""
    return quantile(x, alpha)


def avar(x: Position, alpha: float) -> float:
    """Average Value-at-Risk (1/(1-alpha)) * int_alpha^1 q_X; alpha = 0 gives the mean"""
    if not 0.0 <= alpha < 1.0:
        raise DomainError(f"alpha must lie in [0,1), got {alpha}")
    return tail_integral(x, alpha) / (1.0 - alpha)


def expectation(x: Position, q: Optional[Scenario] = None) -> float:
    return expect(x, q if q is not None else Scenario.reference(x.space))


def entropic(x: Position, gamma: float, q: Optional[Scenario] = None) -> float:
    """(1/gamma) log E[exp(gamma X)], computed with a shifted exponent"""
    if not gamma > 0:
        raise InvalidInputError(f"gamma must be > 0, got {gamma}")
    w = _weights(x, q)
    shift = float(np.max(x.values))
    return shift + math.log(math.fsum(w * np.exp(gamma * (x.values - shift)))) / gamma


@lru_cache(maxsize=1)
def _warn_experimental():
    logger.warning("hg_premium is experimental: outer infimum found by bounded 1-D search on [min X, max X]")


def hg_premium(x: Position, phi: OrliczFunction) -> float:
    """
    Haezendonck-Goovaerts premium inf_m {m + H_{Phi,alpha}[(X - m)^+]}.

    Experimental: the outer infimum is searched on [min X, max X] only.
    """
    _warn_experimental()
    lo, hi = float(np.min(x.values)), float(np.max(x.values))
    p = x.space.p

    def objective(m: float) -> float:
        return m + orlicz_root(np.maximum(x.values - m, 0.0), p, phi)

    if hi - lo <= 0:
        return objective(lo)
    res = optimize.minimize_scalar(objective, bounds=(lo, hi), method='bounded', options={'xatol': 1e-10})
    return min(float(res.fun), objective(lo), objective(hi))


# ---------------------------------------------------------------------------
# Return side
# ---------------------------------------------------------------------------

def arar(x: Position, alpha: float) -> float:
    """Average Return-at-Risk exp(AV@R_alpha(log X))"""
    _require_positive(x)
    return math.exp(avar(x.log(), alpha))


def arar_geometric(x: Position, alpha: float) -> float:
    """AR@R as a weighted geometric average of the upper quantiles of X"""
    _require_positive(x)
    if not 0.0 <= alpha < 1.0:
        raise DomainError(f"alpha must lie in [0,1), got {alpha}")
    v, cum = quantile_steps(x.values, x.space.p)
    left = np.concatenate(([0.0], cum[:-1]))
    widths = np.clip(cum - np.maximum(left, alpha), 0.0, None)
    return float(np.prod(v ** (widths / (1.0 - alpha))))


def h0_premium(x: Position, q: Optional[Scenario] = None) -> float:
    """Building block H_{0,Q}(X) = exp(E_Q[log X])"""
    _require_positive(x)
    w = _weights(x, q)
    return math.exp(math.fsum(w * np.log(x.values)))


def h0_premium_bisection(x: Position, q: Optional[Scenario] = None) -> float:
    """H_{0,Q} through its infimum definition inf{k > 0 : E_Q[log(X/k)] <= 0}"""
    _require_positive(x)
    return orlicz_root(x.values, _weights(x, q), OrliczFunction('canonical_log'))


def pnorm(x: Position, gamma: float, q: Optional[Scenario] = None) -> float:
    """(E_Q[X^gamma])^(1/gamma); small gamma tends to h0_premium but is not special-cased"""
    _require_positive(x)
    if not gamma > 0:
        raise InvalidInputError(f"gamma must be > 0, got {gamma}")
    w = _weights(x, q)
    return math.fsum(w * x.values ** gamma) ** (1.0 / gamma)


def robust_pnorm(x: Position, gamma: float, qs: ScenarioSet) -> float:
    return max(pnorm(x, gamma, q) for q in qs)


def robust_discounted_pnorm(x: Position, gamma: float, qs: ScenarioSet, c: Sequence[float]) -> float:
    """sup_Q exp(-c(Q)) (E_Q[X^gamma])^(1/gamma)"""
    c = _penalties(qs, c)
    return max(math.exp(-ck) * pnorm(x, gamma, q) for q, ck in zip(qs, c))


def logconvex_eval(x: Position, qs: ScenarioSet, c: Optional[Sequence[float]] = None) -> float:
    """sup_Q exp(-c(Q)) H_{0,Q}(X); c = 0 gives the logcoherent measure"""
    c = _penalties(qs, c)
    return max(math.exp(-ck) * h0_premium(x, q) for q, ck in zip(qs, c))


def mean_value_ce(x: Position, ell: LossKernel, qs: ScenarioSet) -> float:
    """sup_Q exp(l^{-1}(E_Q[l(log X)]))"""
    _require_positive(x)
    logs = np.log(x.values)
    best = -math.inf
    for q in qs:
        check_same_space(x, q)
        best = max(best, ell.inverse(math.fsum(q.weights * ell(logs))))
    return math.exp(best)
