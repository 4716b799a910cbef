"""
Dual measures rho~(X) = max_k exp(R(E_{Q_k}[log X]; Q_k)) over a finite scenario set.
"""

import math
import logging
import itertools
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from georisk.correspondence.functional import RETURN, RiskFunctional, safe_exp
from georisk.duality.rfunctional import RFunctional
from georisk.errors import DomainError, InvalidInputError
from georisk.measures.zoo import h0_premium
from georisk.prob_core import Position, ScenarioSet, check_same_space

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DualMeasure:
    r: RFunctional
    qs: ScenarioSet

    def __post_init__(self):
        if self.r.penalty is not None and len(self.r.penalty) != len(self.qs):
            raise InvalidInputError(
                f"R family '{self.r.family}' has {len(self.r.penalty)} penalties for {len(self.qs)} scenarios"
            )

    @property
    def space(self):
        return self.qs.space

    def with_midpoints(self) -> 'DualMeasure':
        """Same R over the set augmented with pairwise midpoints; midpoint penalties are averaged"""
        qs = self.qs.with_midpoints()
        r = self.r
        if r.penalty is not None:
            extra = [0.5 * (a + b) for a, b in itertools.combinations(r.penalty, 2)]
            r = replace(r, penalty=tuple(r.penalty) + tuple(extra))
        return DualMeasure(r, qs)

    def as_functional(self, name: str = '') -> RiskFunctional:
        return RiskFunctional(lambda x: dual_eval(self, x), RETURN, self.space, name=name or f"dual[{self.r.family}]")


def _log_expectations(m: DualMeasure, x: Position) -> np.ndarray:
    check_same_space(x, m.qs)
    if np.any(x.values <= 0):
        raise DomainError("dual evaluation needs a strictly positive position")
    logs = np.log(x.values)
    return np.array([math.fsum(q.weights * logs) for q in m.qs])


def dual_eval_with_argmax(m: DualMeasure, x: Position) -> Tuple[float, int]:
    """
    Value and maximizing scenario index

    Returns:
        (rho~(X), k) with the lowest index among ties
    """
    t = _log_expectations(m, x)
    kernel = np.array([m.r.value(float(tk), k) for k, tk in enumerate(t)])
    k = int(np.argmax(kernel))
    return safe_exp(float(kernel[k])), k


def dual_eval(m: DualMeasure, x: Position) -> float:
    return dual_eval_with_argmax(m, x)[0]


def dual_eval_building_block(m: DualMeasure, x: Position) -> float:
    """sup_Q R(H_{0,Q}(X); Q) with R(s; Q) = exp(R(log s; Q))"""
    check_same_space(x, m.qs)
    return max(m.r.multiplicative(h0_premium(x, q), k) for k, q in enumerate(m.qs))
