"""
Capital allocation rules for return risk measures in dual form.

All rules are evaluated at the optimal scenario Q_X of the total X, the
lowest-index maximizer of the dual representation.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from georisk.acceptance.family import geometric_levels
from georisk.correspondence.functional import safe_exp
from georisk.duality import DualMeasure, dual_eval_with_argmax
from georisk.errors import ConsistencyError, DomainError, InvalidInputError
from georisk.measures.zoo import h0_premium
from georisk.prob_core import PositivePosition, Scenario, check_same_space
from georisk.settings import get_settings

logger = logging.getLogger(__name__)

RULES = ('acceptance', 'subdifferential', 'proportional')
COMPOSITIONS = ('ratio', 'additive', 'multiplicative')
SCENARIO_TOL = 1e-10
COMPOSITION_TOL = 1e-10

AcceptanceSet = Callable[[PositivePosition], bool]


def allocation_levels() -> np.ndarray:
    """m-grid for acceptance allocations: exp of [-8, 8] in steps of 0.05"""
    return geometric_levels(-8.0, 8.0, 321)


@dataclass(frozen=True, eq=False)
class AllocationResult:
    """
    Allocations of one rule, with the scenario they were computed at

    The scenario is re-checked against the dual supremum of the total at
    construction.
    """

    measure: DualMeasure
    total: PositivePosition
    units: Tuple[PositivePosition, ...]
    allocations: Tuple[float, ...]
    scenario_index: int
    rule: str
    composition: str = 'ratio'
    factors: Optional[Tuple[float, ...]] = None
    total_risk: float = field(init=False, default=math.nan)

    def __post_init__(self):
        if self.rule not in RULES:
            raise InvalidInputError(f"unknown rule '{self.rule}', expected one of {RULES}")
        allocations = tuple(float(a) for a in self.allocations)
        if len(allocations) != len(self.units):
            raise InvalidInputError(f"{len(allocations)} allocations for {len(self.units)} units")
        if not all(math.isfinite(a) for a in allocations):
            raise DomainError(f"non-finite allocation in {allocations}")
        object.__setattr__(self, 'allocations', allocations)
        value, _ = dual_eval_with_argmax(self.measure, self.total)
        q = self.measure.qs[self.scenario_index]
        t = math.fsum(q.weights * np.log(self.total.values))
        attained = safe_exp(self.measure.r.value(t, self.scenario_index))
        if abs(attained - value) > SCENARIO_TOL * max(1.0, abs(value)):
            raise ConsistencyError(f"scenario {self.scenario_index} gives {attained!r}, dual supremum is {value!r}")
        object.__setattr__(self, 'total_risk', value)

    @property
    def optimal_scenario(self) -> Scenario:
        return self.measure.qs[self.scenario_index]

    @property
    def diagnostic_sum(self) -> float:
        """Sum of allocations, reported next to rho~(X) and never enforced"""
        return math.fsum(self.allocations)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'rule': self.rule,
            'composition': self.composition,
            'allocations': list(self.allocations),
            'factors': None if self.factors is None else list(self.factors),
            'scenario_index': self.scenario_index,
            'scenario_density': self.optimal_scenario.density.tolist(),
            'total_risk': self.total_risk,
            'diagnostic_sum': self.diagnostic_sum,
        }


def optimal_scenario_index(m: DualMeasure, x: PositivePosition) -> int:
    return dual_eval_with_argmax(m, x)[1]


def optimal_scenario(m: DualMeasure, x: PositivePosition) -> Scenario:
    """Q_X, the maximizing scenario of the dual representation (lowest index among ties)"""
    return m.qs[optimal_scenario_index(m, x)]


def check_total_composition(units: Sequence[PositivePosition], total: PositivePosition, composition: str):
    """X = sum X_i (additive) or X = prod X_i (multiplicative) within 1e-10 relative"""
    if composition not in COMPOSITIONS:
        raise InvalidInputError(f"unknown composition '{composition}', expected one of {COMPOSITIONS}")
    for u in units:
        check_same_space(u, total)
    if composition == 'ratio':
        return
    stacked = np.vstack([u.values for u in units])
    combined = stacked.sum(axis=0) if composition == 'additive' else stacked.prod(axis=0)
    gap = np.abs(combined - total.values)
    if np.any(gap > COMPOSITION_TOL * np.maximum(1.0, np.abs(total.values))):
        raise InvalidInputError(f"units do not compose to the total ({composition}), max gap {gap.max():.3g}")


def _prepare(m: DualMeasure, units, total, composition: str):
    total = total.as_positive()
    units = tuple(u.as_positive() for u in units)
    if not units:
        raise InvalidInputError("allocation needs at least one unit")
    check_same_space(total, m.qs)
    check_total_composition(units, total, composition)
    return units, total


def car_subdifferential(m: DualMeasure, units: Sequence[PositivePosition], total: PositivePosition,
                        composition: str = 'ratio') -> AllocationResult:
    """Lambda_sub(X_i, X) = exp(E_{Q_X}[log X_i])"""
    units, total = _prepare(m, units, total, composition)
    k = optimal_scenario_index(m, total)
    q = m.qs[k]
    allocations = tuple(h0_premium(u, q) for u in units)
    return AllocationResult(m, total, units, allocations, k, 'subdifferential', composition)


def car_proportional(m: DualMeasure, units: Sequence[PositivePosition], total: PositivePosition,
                     composition: str = 'ratio') -> AllocationResult:
    """
    Lambda(X_i, X) = rho~(X) * Lambda_prop(X_i, X) with
    Lambda_prop(X_i, X) = exp(R(E_{Q_X}[log(X_i / X)]; Q_X))

    Raises:
        DomainError: when a ratio X_i / X falls below pos_floor
    """
    units, total = _prepare(m, units, total, composition)
    value, k = dual_eval_with_argmax(m, total)
    q = m.qs[k]
    floor = get_settings().pos_floor
    factors = []
    for i, u in enumerate(units):
        ratio = u.values / total.values
        if np.any(ratio < floor):
            raise DomainError(f"ratio of unit {i} to the total underflows pos_floor={floor}")
        t = math.fsum(q.weights * np.log(ratio))
        factors.append(safe_exp(m.r.value(t, k)))
    allocations = tuple(value * f for f in factors)
    return AllocationResult(m, total, units, allocations, k, 'proportional', composition, tuple(factors))


def subdifferential_acceptance_set(m: DualMeasure, total: PositivePosition) -> AcceptanceSet:
    """B_X = {Z : exp(E_{Q_X}[log(1/Z)]) <= 1}"""
    q = optimal_scenario(m, total.as_positive())

    def accept(z: PositivePosition) -> bool:
        return h0_premium(z.reciprocal(), q) <= 1.0 + 1e-12

    return accept


def car_acceptance(accept: AcceptanceSet, unit: PositivePosition, total: Optional[PositivePosition] = None,
                   levels: Optional[np.ndarray] = None) -> float:
    """
    Lambda_B(X_i, X) = inf{m : m / X_i in B_X}, scanned over a geometric m-grid

    Args:
        accept: membership predicate of B_X
        unit: the sub-unit X_i
        total: X, only used to check that both live on one space
        levels: ascending m-grid (allocation_levels() by default)

    Returns:
        float: lowest accepted grid level, +inf when none is accepted
    """
    unit = unit.as_positive()
    if total is not None:
        check_same_space(unit, total)
    levels = allocation_levels() if levels is None else levels
    for level in levels:
        if accept(PositivePosition(unit.space, level / unit.values)):
            return float(level)
    logger.debug("No grid level accepts the unit")
    return math.inf


def allocate(m: DualMeasure, units: Sequence[PositivePosition], total: PositivePosition, rule: str,
             composition: str = 'ratio') -> AllocationResult:
    """Dispatch to one allocation rule; acceptance uses the subdifferential acceptance set"""
    if rule == 'subdifferential':
        return car_subdifferential(m, units, total, composition)
    if rule == 'proportional':
        return car_proportional(m, units, total, composition)
    if rule != 'acceptance':
        raise InvalidInputError(f"unknown rule '{rule}', expected one of {RULES}")
    units, total = _prepare(m, units, total, composition)
    accept = subdifferential_acceptance_set(m, total)
    allocations = []
    for i, u in enumerate(units):
        a = car_acceptance(accept, u, total)
        if not math.isfinite(a):
            raise DomainError(f"no grid level accepts unit {i}")
        allocations.append(a)
    return AllocationResult(m, total, units, tuple(allocations), optimal_scenario_index(m, total), 'acceptance',
                            composition)
