"""
Recovery of R(t; Q) from a return risk measure and grid checks on R-functionals.

    R(t; Q) = inf{log rho~(Y) : E_Q[log Y] >= t}

The infimum is searched over log vectors z in the box [-B, B]^n. For a
monotone rho~ the constraint is active at the optimum, so the search stays
on the hyperplane E_Q[z] = t and moves along directions that preserve it.
"""

import math
import logging
import itertools
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from georisk.correspondence.checkers import PropertyReport, grid_result, margin_of
from georisk.correspondence.functional import RETURN, RiskFunctional, safe_log
from georisk.duality.rfunctional import H_GRID, T_GRID, RFunctional
from georisk.errors import InfeasibleError, InvalidInputError
from georisk.prob_core import Scenario, ScenarioSet, check_same_space
from georisk.settings import get_settings

logger = logging.getLogger(__name__)

ORACLE_RESOLUTION = 1.0 / 512


class RecoveryConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    bound: float = Field(default=8.0, gt=0)
    starts: int = Field(default=8, ge=1)
    initial_step: float = Field(default=1.0, gt=0)
    min_step: float = Field(default=1e-6, gt=0)
    seed: int = 0


def _objective(f: RiskFunctional, z: np.ndarray) -> float:
    return safe_log(f.at(np.exp(z)))


def _starts(t: float, w: np.ndarray, active: np.ndarray, config: RecoveryConfig) -> List[np.ndarray]:
    """Constant start plus seeded perturbations scaled back into the box"""
    B = config.bound
    base = np.where(active, t, -B)
    starts = [base]
    rng = np.random.default_rng(config.seed)
    for _ in range(config.starts - 1):
        delta = np.where(active, rng.uniform(-2.0, 2.0, w.size), 0.0)
        delta = np.where(active, delta - math.fsum(w * delta), 0.0)
        scale = 1.0
        for d in delta[active]:
            if d > 0:
                scale = min(scale, (B - t) / d)
            elif d < 0:
                scale = min(scale, (-B - t) / d)
        starts.append(base + scale * delta)
    return starts


def _descend(f: RiskFunctional, z: np.ndarray, w: np.ndarray, active: np.ndarray,
             config: RecoveryConfig) -> float:
    """Pairwise moves z_i += s, z_j -= s * w_i / w_j with dyadic step refinement"""
    B = config.bound
    best = _objective(f, z)
    idx = np.flatnonzero(active)
    step = config.initial_step
    while step >= config.min_step:
        improved = False
        for i, j in itertools.permutations(idx, 2):
            for s in (step, -step):
                trial = z.copy()
                trial[i] += s
                trial[j] -= s * w[i] / w[j]
                if trial[i] > B or trial[i] < -B or trial[j] > B or trial[j] < -B:
                    continue
                value = _objective(f, trial)
                if value < best:
                    z, best, improved = trial, value, True
        if not improved:
            step *= 0.5
    return best


def recover_r(f: RiskFunctional, q: Scenario, t: float, config: Optional[RecoveryConfig] = None) -> float:
    """
    Approximate R(t; Q) by constrained minimization of log rho~

    Args:
        f: monotone return risk measure
        q: scenario Q
        t: level
        config: box bound, number of starts and step schedule

    Returns:
        float: the smallest objective found

    Raises:
        InfeasibleError: t > B, no point of the box satisfies the constraint
    """
    if f.side != RETURN:
        raise InvalidInputError("recover_r expects a return-side functional")
    check_same_space(f, q)
    config = config or RecoveryConfig()
    B = config.bound
    if t > B:
        raise InfeasibleError(f"level t={t} exceeds the search bound B={B}")
    w = q.weights
    active = w > 0
    if t < -B:
        return _objective(f, np.full(w.size, -B))
    best = math.inf
    for k, z0 in enumerate(_starts(t, w, active, config)):
        value = _descend(f, z0, w, active, config)
        logger.debug(f"recover_r t={t:.4g} start {k}: {value:.10g}")
        best = min(best, value)
    return best


def dense_grid_oracle_r(f: RiskFunctional, q: Scenario, t: float, bound: float = 8.0,
                        resolution: float = ORACLE_RESOLUTION) -> float:
    """Brute-force R(t; Q) on two atoms: z1 on a grid, z2 solved from E_Q[z] = t"""
    if f.space.n != 2:
        raise InvalidInputError("the dense-grid oracle is limited to two atoms")
    if t > bound:
        raise InfeasibleError(f"level t={t} exceeds the search bound B={bound}")
    w1, w2 = q.weights
    if w1 == 0 or w2 == 0:
        z = np.array([t, -bound]) if w2 == 0 else np.array([-bound, t])
        return _objective(f, z)
    best = math.inf
    for z1 in np.arange(-bound, bound + 0.5 * resolution, resolution):
        z2 = (t - w1 * z1) / w2
        if -bound <= z2 <= bound:
            best = min(best, _objective(f, np.array([z1, z2])))
    return best


def check_expansive(r: RFunctional, qs: ScenarioSet, tolerance: Optional[float] = None) -> PropertyReport:
    """
    Grid check of expansivity in the three equivalent forms

        additive        R(t + h) >= R(t) + h
        multiplicative  exp R(t + h) >= e^h exp R(t)
        geometric       R(s') >= R(s) * s' / s   for s' = e^(t+h) >= s = e^t
    """
    tolerance = get_settings().tolerance if tolerance is None else tolerance
    rows = {'additive': [], 'multiplicative': [], 'geometric': []}
    for k in range(len(qs)):
        for t in T_GRID:
            t = float(t)
            for h in H_GRID:
                inputs = {'t': t, 'h': h, 'scenario': k}
                lhs, rhs = r.value(t + h, k), r.value(t, k) + h
                rows['additive'].append((margin_of(rhs, lhs), inputs, lhs, rhs))
                big, small = math.exp(r.value(t + h, k)), math.exp(h) * math.exp(r.value(t, k))
                rows['multiplicative'].append((margin_of(1.0, big / small), inputs, big, small))
                s, s_next = math.exp(t), math.exp(t + h)
                geo, bound = r.multiplicative(s_next, k), r.multiplicative(s, k) * s_next / s
                rows['geometric'].append((margin_of(1.0, geo / bound), inputs, geo, bound))
    report = PropertyReport()
    for form, margins in rows.items():
        report.add(grid_result(f"expansive.{form}", margins, tolerance))
    verdicts = {report.holds(f"expansive.{form}") for form in rows}
    report.add(grid_result('formulations_agree', [(0.0 if len(verdicts) == 1 else math.inf, {}, 0.0, 0.0)], tolerance))
    report.add(grid_result('expansive', rows['additive'], tolerance))
    return report


def check_translation_invariant_in_t(r: RFunctional, qs: ScenarioSet,
                                     tolerance: Optional[float] = None) -> PropertyReport:
    """Grid check of R(t + h) = R(t) + h"""
    tolerance = get_settings().tolerance if tolerance is None else tolerance
    rows = []
    for k in range(len(qs)):
        for t in T_GRID:
            t = float(t)
            for h in H_GRID:
                lhs, rhs = r.value(t + h, k), r.value(t, k) + h
                rows.append((margin_of(lhs, rhs, equality=True), {'t': t, 'h': h, 'scenario': k}, lhs, rhs))
    report = PropertyReport()
    report.add(grid_result('translation_invariant_in_t', rows, tolerance))
    if report.holds('translation_invariant_in_t'):
        for k in range(len(qs)):
            report.values[f"penalty[{k}]"] = -r.value(0.0, k)
    return report
