"""
Orlicz functions and Orlicz (Luxemburg) premia.

H_{Phi,alpha}[X] = inf{k > 0 : E[Phi(X/k)] <= 1 - alpha}
"""

import math
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from georisk.errors import BracketError, DomainError, InvalidInputError
from georisk.prob_core import Position, Scenario, check_same_space
from georisk.settings import get_settings

logger = logging.getLogger(__name__)

ORLICZ_TAGS = ('power', 'linear', 'canonical_log', 'user_table')


def _as_table(pairs) -> Tuple[Tuple[float, float], ...]:
    table = tuple((float(a), float(b)) for a, b in pairs)
    if len(table) < 2:
        raise InvalidInputError("a function table needs at least two [x, f(x)] pairs")
    xs = np.array([a for a, _ in table])
    if np.any(np.diff(xs) <= 0):
        raise InvalidInputError("table x values must be strictly increasing")
    return table


@dataclass(frozen=True)
class OrliczFunction:
    """Nondecreasing Phi on [0, inf) with Phi(0) < 1 < Phi(inf), plus the level alpha"""

    tag: str
    level_alpha: float = 0.0
    power: float = 1.0
    table: Optional[Tuple[Tuple[float, float], ...]] = None

    def __post_init__(self):
        if self.tag not in ORLICZ_TAGS:
            raise InvalidInputError(f"unknown Orlicz tag '{self.tag}', expected one of {ORLICZ_TAGS}")
        if not 0.0 <= self.level_alpha < 1.0:
            raise InvalidInputError(f"level_alpha must lie in [0,1), got {self.level_alpha}")
        if self.tag == 'power' and not self.power > 0:
            raise InvalidInputError(f"power must be > 0, got {self.power}")
        if self.tag == 'user_table':
            if self.table is None:
                raise InvalidInputError("user_table Orlicz function needs a table")
            table = _as_table(self.table)
            object.__setattr__(self, 'table', table)
            ys = np.array([b for _, b in table])
            if np.any(np.diff(ys) < 0):
                raise InvalidInputError("Orlicz table must be nondecreasing")
            # two test points: the origin and the far end of the table
            lo, hi = float(self(0.0)), float(self(table[-1][0]))
            if not lo < 1.0 < hi:
                raise InvalidInputError(f"Orlicz table violates Phi(0) < 1 < Phi(inf): got {lo} and {hi}")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.tag == 'power':
            return u ** self.power
        if self.tag == 'linear':
            return u
        if self.tag == 'canonical_log':
            with np.errstate(divide='ignore'):
                return 1.0 + np.log(u)
        xs, ys = zip(*self.table)
        return np.interp(u, xs, ys)

    @property
    def target(self) -> float:
        return 1.0 - self.level_alpha

    @property
    def normalized(self) -> bool:
        """H(1) = 1 iff Phi(1) = 1 - alpha"""
        return abs(float(self(1.0)) - self.target) <= 1e-12

    def to_dict(self) -> Dict[str, Any]:
        out = {'tag': self.tag, 'alpha': self.level_alpha}
        if self.tag == 'power':
            out['p'] = self.power
        if self.tag == 'user_table':
            out['table'] = [list(pair) for pair in self.table]
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'OrliczFunction':
        return cls(
            tag=data.get('tag', 'power'),
            level_alpha=float(data.get('alpha', 0.0)),
            power=float(data.get('p', 1.0)),
            table=data.get('table'),
        )


def orlicz_root(values: np.ndarray, weights: np.ndarray, phi: OrliczFunction,
                bracket: Optional[float] = None) -> float:
    """
    Orlicz premium of a nonnegative vector under atom weights.

    Bisection runs on log k so the tolerance is relative.

    Raises:
        BracketError: no sign change after one widening of the bracket
    """
    support = weights > 0
    values = np.asarray(values, dtype=float)[support]
    weights = np.asarray(weights, dtype=float)[support]
    positive = values[values > 0]
    if positive.size == 0:
        return 0.0
    target = phi.target

    def excess(log_k: float) -> float:
        return math.fsum(weights * phi(values / math.exp(log_k))) - target

    factor = get_settings().orlicz_bracket if bracket is None else bracket
    for _ in range(2):
        a = math.log(positive.min() / factor)
        b = math.log(positive.max() * factor)
        fa, fb = excess(a), excess(b)
        if fa > 0 >= fb:
            break
        logger.debug(f"Orlicz bracket [{a:.3g}, {b:.3g}] has no sign change ({fa:.3g}, {fb:.3g}), widening")
        factor = factor * factor
    else:
        raise BracketError(f"no sign change for Orlicz function '{phi.tag}' (growth assumptions violated)")
    if fb == 0.0:
        return math.exp(b)
    return math.exp(optimize.bisect(excess, a, b, xtol=1e-13, maxiter=200))


def orlicz_premium(x: Position, phi: OrliczFunction, q: Optional[Scenario] = None) -> float:
    """
    Orlicz premium H_{Phi,alpha}[X], optionally under a scenario Q instead of P

    Args:
        x: strictly positive position
        phi: Orlicz function and level
        q: expectation measure (defaults to the reference measure)

    Returns:
        float: the premium
    """
    if np.any(x.values <= 0):
        raise DomainError("Orlicz premium requires a strictly positive position")
    if q is None:
        weights = x.space.p
    else:
        check_same_space(x, q)
        weights = q.weights
    return orlicz_root(x.values, weights, phi)
