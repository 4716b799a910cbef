"""
Risk functionals and the arithmetic <-> geometric correspondence.

    rho~(X) = exp(rho(log X))      (to_return)
    rho(Z)  = log(rho~(exp Z))     (to_monetary)

Extended values follow exp(-inf) = 0 and log(0) = -inf.
"""

import math
import logging
from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np

from georisk.errors import DomainError, InvalidInputError
from georisk.prob_core import Position, ProbSpace, check_same_space

logger = logging.getLogger(__name__)

MONETARY = 'monetary'
RETURN = 'return'
SIDES = (MONETARY, RETURN)


def safe_exp(v: float) -> float:
    if v == -math.inf:
        return 0.0
    if v == math.inf:
        return math.inf
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


def safe_log(v: float) -> float:
    if v < 0 or math.isnan(v):
        raise DomainError(f"cannot take the log of risk value {v}")
    if v == 0:
        return -math.inf
    return math.log(v)


@dataclass(frozen=True, eq=False)
class RiskFunctional:
    """
    A risk measure bound to one probability space.

    Monetary functionals take any Position and return an extended real.
    Return functionals take positions above pos_floor and return a value in [0, inf].
    """

    evaluate: Callable[[Position], float]
    side: str
    space: ProbSpace
    name: str = ''
    spec: Optional[Any] = None

    def __post_init__(self):
        if self.side not in SIDES:
            raise InvalidInputError(f"side must be one of {SIDES}, got '{self.side}'")

    def __call__(self, x: Position) -> float:
        check_same_space(x, self)
        if self.side == RETURN:
            x = x.as_positive()
        return float(self.evaluate(x))

    def at(self, values) -> float:
        """Evaluate on raw outcome values"""
        return self(Position(self.space, np.asarray(values, dtype=float)))

    def __repr__(self):
        return f"RiskFunctional({self.name or '<anonymous>'}, side={self.side})"


def to_return(rho: RiskFunctional) -> RiskFunctional:
    """Associated return risk measure of a monetary one"""
    if rho.side != MONETARY:
        raise InvalidInputError(f"to_return expects a monetary functional, got side '{rho.side}'")

    def evaluate(x: Position) -> float:
        return safe_exp(rho(x.log()))

    return RiskFunctional(evaluate, RETURN, rho.space, name=f"exp.{rho.name}.log", spec=rho.spec)


def to_monetary(trho: RiskFunctional) -> RiskFunctional:
    """Associated monetary risk measure of a return one"""
    if trho.side != RETURN:
        raise InvalidInputError(f"to_monetary expects a return functional, got side '{trho.side}'")

    def evaluate(z: Position) -> float:
        return safe_log(trho(z.exp()))

    return RiskFunctional(evaluate, MONETARY, trho.space, name=f"log.{trho.name}.exp", spec=trho.spec)
