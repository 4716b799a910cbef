"""
Closed forms of the parametric dual families, used to cross-check dual_eval.
"""

import math
from typing import Sequence

import numpy as np

from georisk.duality.rfunctional import Q_GRID, RFunctional
from georisk.errors import InvalidInputError
from georisk.measures.zoo import h0_premium
from georisk.prob_core import Position, ScenarioSet


def supq_discounted_premia(x: Position, r: RFunctional, qs: ScenarioSet) -> float:
    """sup over Q and the q-grid of exp(-c(qQ)) * H_{0,Q}(X^q)"""
    if r.family != 'supq_penalty':
        raise InvalidInputError("supq_discounted_premia expects a supq_penalty R family")
    best = 0.0
    for k, q in enumerate(qs):
        for level in Q_GRID:
            c = r.penalty[k] + 0.5 * r.kappa * (1.0 - level) ** 2
            powered = x.with_values(x.values ** level)
            best = max(best, math.exp(-c) * h0_premium(powered, q))
    return best


def log_floor_closed_form(x: Position, a: float, qs: ScenarioSet) -> float:
    """sup_Q E_Q[log X] v a"""
    logs = np.log(x.values)
    return max(a, max(math.fsum(q.weights * logs) for q in qs))


def floor_closed_form(x: Position, C: float, qs: ScenarioSet) -> float:
    """sup_Q H_{0,Q}(X) v e^C"""
    return max(math.exp(C), max(h0_premium(x, q) for q in qs))


def logconvex_closed_form(x: Position, c: Sequence[float], qs: ScenarioSet) -> float:
    """sup_Q exp(-c(Q)) H_{0,Q}(X)"""
    return max(math.exp(-ck) * h0_premium(x, q) for ck, q in zip(c, qs))
