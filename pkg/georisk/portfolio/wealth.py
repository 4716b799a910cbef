"""
Wealth dynamics of buy-and-hold and rebalanced portfolios, and the
diversification inequalities they are tied to.

Paths are per-period gross returns 1 + R_{i,j}, one row per asset.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy import optimize

from georisk.correspondence.checkers import LEVEL_BRACKET, PropertyReport, SamplerConfig, grid_result
from georisk.correspondence.functional import RiskFunctional
from georisk.errors import InvalidInputError
from georisk.prob_core import PositivePosition, ProbSpace, check_same_space

logger = logging.getLogger(__name__)

STRATEGIES = ('buy_and_hold', 'rebalanced')
WEIGHT_TOL = 1e-12


def _check_weights(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or np.any(w < -WEIGHT_TOL) or abs(w.sum() - 1.0) > 1e-9:
        raise InvalidInputError(f"weights must lie in the simplex, got {w.tolist()}")
    return np.clip(w, 0.0, None)


def _check_paths(w: np.ndarray, paths) -> np.ndarray:
    try:
        g = np.asarray(paths, dtype=float)
    except ValueError as e:
        raise InvalidInputError("asset paths must all have the same length") from e
    if g.ndim == 1:
        g = g[np.newaxis, :]
    if g.ndim != 2 or g.shape[0] != w.size:
        raise InvalidInputError(f"expected {w.size} asset paths, got array of shape {g.shape}")
    if not np.all(np.isfinite(g)) or np.any(g <= 0):
        raise InvalidInputError("gross returns must be finite and strictly positive")
    return g


def wealth_buy_and_hold(w, paths, w0: float = 1.0) -> np.ndarray:
    """
    W_t = W0 * sum_i w_i V_{i,t} with V_{i,t} the compounded value of asset i

    Returns:
        np.ndarray: wealth at t = 0..T
    """
    w = _check_weights(w)
    g = _check_paths(w, paths)
    values = np.hstack([np.ones((g.shape[0], 1)), np.cumprod(g, axis=1)])
    return w0 * (w @ values)


def wealth_rebalanced(w, paths, w0: float = 1.0, steps_per_period: int = 1) -> np.ndarray:
    """
    Wealth when weights are restored after each of K equal log-rate sub-steps

    Args:
        w: target weights in the simplex
        paths: gross returns, shape (assets, periods)
        w0: initial wealth
        steps_per_period: K, the number of rebalancing dates per period

    Returns:
        np.ndarray: wealth at t = 0..T
    """
    if steps_per_period < 1:
        raise InvalidInputError("steps_per_period must be at least 1")
    w = _check_weights(w)
    g = _check_paths(w, paths)
    sub = g ** (1.0 / steps_per_period)
    per_period = (w @ sub) ** steps_per_period
    return w0 * np.concatenate([[1.0], np.cumprod(per_period)])


def continuous_limit_wealth(w, paths, w0: float = 1.0) -> np.ndarray:
    """W_t = W0 exp(sum_i w_i r_{i,t}), r the cumulated log-returns"""
    w = _check_weights(w)
    g = _check_paths(w, paths)
    return w0 * np.exp(np.concatenate([[0.0], np.cumsum(w @ np.log(g))]))


@dataclass(frozen=True)
class WealthPair:
    """Terminal asset values V_A, V_B and the weight on A"""

    va: PositivePosition
    vb: PositivePosition
    w: float

    def to_dict(self):
        return {'va': self.va.values.tolist(), 'vb': self.vb.values.tolist(), 'w': self.w}


def _match_level(measure: RiskFunctional, va: PositivePosition, vb: PositivePosition) -> Optional[PositivePosition]:
    target = measure(va)

    def excess(s: float) -> float:
        return measure(PositivePosition(vb.space, vb.values * math.exp(s))) - target

    lo, hi = excess(-LEVEL_BRACKET), excess(LEVEL_BRACKET)
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo * hi >= 0:
        return None
    s = optimize.brentq(excess, -LEVEL_BRACKET, LEVEL_BRACKET, xtol=1e-12)
    return PositivePosition(vb.space, vb.values * math.exp(s))


def sample_wealth_pairs(space: ProbSpace, n: int, seed: int = 0,
                        measure: Optional[RiskFunctional] = None) -> List[WealthPair]:
    """
    Seeded (V_A, V_B, w) instances with log-values uniform on [-3, 3]

    With a measure, every other pair is rescaled so that both assets carry
    the same risk. On two equiprobable atoms the pair V_A = (1, e^3),
    V_B = e^2, w = 1/2 comes first.
    """
    rng = np.random.default_rng([seed, 8])
    pairs = []
    if space.n == 2 and space.is_equiprobable():
        pairs.append(WealthPair(PositivePosition(space, np.array([1.0, math.exp(3.0)])),
                                PositivePosition(space, np.full(2, math.exp(2.0))), 0.5))
    for i in range(n):
        va = PositivePosition(space, np.exp(rng.uniform(-3.0, 3.0, space.n)))
        vb = PositivePosition(space, np.exp(rng.uniform(-3.0, 3.0, space.n)))
        w = float(0.01 + 0.98 * rng.uniform())
        if measure is not None and i % 2 == 1:
            matched = _match_level(measure, va, vb)
            if matched is not None:
                vb = matched
        pairs.append(WealthPair(va, vb, w))
    return pairs


def _terminal_wealth(pair: WealthPair, strategy: str) -> PositivePosition:
    # one period per atom, V itself is the gross return
    w = np.array([pair.w, 1.0 - pair.w])
    values = np.empty(pair.va.space.n)
    for k in range(values.size):
        paths = [[pair.va.values[k]], [pair.vb.values[k]]]
        if strategy == 'buy_and_hold':
            values[k] = wealth_buy_and_hold(w, paths)[-1]
        else:
            values[k] = continuous_limit_wealth(w, paths)[-1]
    return PositivePosition(pair.va.space, values)


def check_diversification_inequalities(measure: RiskFunctional, instances: Iterable[WealthPair],
                                       strategies: Sequence[str] = STRATEGIES,
                                       config: Optional[SamplerConfig] = None) -> PropertyReport:
    """
    rho(W) <= max(rho(V_A), rho(V_B)) for the terminal wealth W of each strategy

    Buy-and-hold wealth is the arithmetic mix wV_A + (1-w)V_B, so its inequality
    is quasi-convexity; continuously rebalanced wealth is V_A^w V_B^(1-w), so
    its inequality is quasi-logconvexity.
    """
    config = config or SamplerConfig()
    unknown = [s for s in strategies if s not in STRATEGIES]
    if unknown:
        raise InvalidInputError(f"unknown strategies {unknown}, expected some of {STRATEGIES}")
    instances = list(instances)
    report = PropertyReport()
    for strategy in strategies:
        rows = []
        for k, pair in enumerate(instances):
            check_same_space(pair.va, measure)
            lhs = measure(_terminal_wealth(pair, strategy))
            rhs = max(measure(pair.va), measure(pair.vb))
            rows.append((lhs - rhs, {'instance': k, **pair.to_dict()}, lhs, rhs))
        result = grid_result(strategy, rows, config.tolerance, config.confirm_margin)
        report.add(result)
        status = "✓" if result.holds else "✗"
        logger.info(f"{status} {measure.name} on {strategy} wealth: max margin {result.max_margin:.3g}")
    return report
