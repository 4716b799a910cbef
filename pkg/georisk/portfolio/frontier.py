"""
Generalized frontier over the log-constraint family
C_r = {w in [eps, W_max]^n : E[sum_i X_i log w_i] <= log r}
with objective F(w) = rho~(G * prod_i w_i^{V_i}).

The search runs in u = log w, where C_r is a box cut by one half-space and
F is quasi-convex whenever rho~ is quasi-logconvex.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from georisk.correspondence.checkers import PropertyReport, grid_result
from georisk.correspondence.functional import RETURN, RiskFunctional
from georisk.errors import InvalidInputError
from georisk.portfolio.choice import INFEASIBLE, OPTIMAL, FrontierPoint, SolverConfig
from georisk.portfolio.search import best_seeds, box_grid, lattice_directions, null_directions, pattern_search
from georisk.prob_core import Position, PositivePosition, check_same_space

logger = logging.getLogger(__name__)

EPSILON = 1e-3
W_MAX = 1.0


@dataclass(frozen=True, eq=False)
class LogConstraintFamily:
    """
    Attributes:
        assets: gross returns Y_i, giving X_i = log Y_i in the constraint
        measure: return risk measure rho~
        exponents: V_i as constants or positions; defaults to X_i
        base: positive position G; defaults to 1
        eps, w_max: weight box
    """

    assets: tuple
    measure: RiskFunctional
    exponents: Optional[tuple] = None
    base: Optional[PositivePosition] = None
    eps: float = EPSILON
    w_max: float = W_MAX

    def __post_init__(self):
        assets = tuple(a.as_positive() for a in self.assets)
        if not assets:
            raise InvalidInputError("the log-constraint family needs at least one asset")
        for a in assets:
            check_same_space(a, self.measure)
        if self.measure.side != RETURN:
            raise InvalidInputError("the generalized frontier expects a return risk measure")
        if not 0 < self.eps < self.w_max:
            raise InvalidInputError("weight box needs 0 < eps < w_max")
        space = assets[0].space
        logs = np.log(np.vstack([a.values for a in assets]))
        if self.exponents is None:
            v = logs
        else:
            if len(self.exponents) != len(assets):
                raise InvalidInputError(f"{len(self.exponents)} exponents for {len(assets)} assets")
            v = np.vstack([e.values if isinstance(e, Position) else np.full(space.n, float(e))
                           for e in self.exponents])
        g = np.zeros(space.n) if self.base is None else np.log(self.base.as_positive().values)
        object.__setattr__(self, 'assets', assets)
        object.__setattr__(self, '_v', v)
        object.__setattr__(self, '_log_base', g)
        object.__setattr__(self, '_slopes', logs @ space.p)

    @property
    def space(self):
        return self.assets[0].space

    @property
    def slopes(self) -> np.ndarray:
        """E[X_i] per asset"""
        return self._slopes

    @property
    def n(self) -> int:
        return len(self.assets)

    @property
    def lower(self) -> np.ndarray:
        return np.full(self.n, math.log(self.eps))

    @property
    def upper(self) -> np.ndarray:
        return np.full(self.n, math.log(self.w_max))

    def constraint_value(self, w: np.ndarray) -> float:
        """E[sum_i X_i log w_i]"""
        return float(self._slopes @ np.log(w))

    def contains(self, w: np.ndarray, r: float) -> bool:
        w = np.asarray(w, dtype=float)
        if np.any(w < self.eps * (1 - 1e-12)) or np.any(w > self.w_max * (1 + 1e-12)):
            return False
        return self.constraint_value(w) <= math.log(r) + 1e-12 * max(1.0, abs(math.log(r)))

    def objective(self, w: np.ndarray) -> float:
        """rho~(G * prod_i w_i^{V_i})"""
        u = np.log(np.asarray(w, dtype=float))
        return self.measure(PositivePosition(self.space, np.exp(self._log_base + u @ self._v)))

    def min_constraint(self) -> float:
        return float(np.sum(np.minimum(self._slopes * self.lower, self._slopes * self.upper)))


def _solve_log(fam: LogConstraintFamily, r: float, config: SolverConfig,
               warm_starts: Sequence[np.ndarray] = ()) -> FrontierPoint:
    if not r > 0:
        raise InvalidInputError(f"generalized frontier levels must be positive, got {r}")
    if fam.min_constraint() > math.log(r) + 1e-12 * max(1.0, abs(math.log(r))):
        logger.warning(f"Log-constraint set is empty for r={r}")
        return FrontierPoint(r, None, math.nan, INFEASIBLE)

    def objective(u):
        return fam.objective(np.exp(u))

    def feasible(u):
        return fam.contains(np.exp(u), r)

    grid, spacing = box_grid(fam.lower, fam.upper)
    values = np.array([objective(u) if feasible(u) else math.inf for u in grid])
    starts = best_seeds(grid, values, config.restarts)
    starts += [np.log(w) for w in warm_starts if fam.contains(w, r)]
    if not starts:
        # corner minimizing the constraint is feasible when the set is nonempty
        starts = [np.where(fam.slopes > 0, fam.lower, fam.upper)]
    directions = np.vstack([lattice_directions(fam.n, sum_zero=False),
                            null_directions([fam.slopes], fam.n)])
    u, value = pattern_search(objective, feasible, starts, directions, step=spacing, min_step=config.min_step)
    w = np.clip(np.exp(u), fam.eps, fam.w_max)
    return FrontierPoint(r, w, fam.objective(w), OPTIMAL)


def generalized_frontier_logconstraint(fam: LogConstraintFamily, r_grid: Sequence[float],
                                       config: Optional[SolverConfig] = None) -> List[FrontierPoint]:
    """
    Minimize F over C_r for every r of an ascending grid of positive levels

    C_r grows with r, so each solve is warm-started with the previous optimum.
    """
    config = config or SolverConfig()
    r_grid = [float(r) for r in r_grid]
    if any(b < a for a, b in zip(r_grid, r_grid[1:])):
        raise InvalidInputError("r grid must be ascending")
    points, previous = [], None
    for r in r_grid:
        point = _solve_log(fam, r, config, [] if previous is None else [previous])
        if point.status == OPTIMAL:
            previous = point.w_star
        points.append(point)
    logger.info(f"Generalized frontier: {sum(pt.status == OPTIMAL for pt in points)}/{len(points)} points optimal")
    return points


def check_generalized_frontier(fam: LogConstraintFamily, points: Sequence[FrontierPoint], n_triples: int = 20,
                               seed: int = 0, tolerance: float = 1e-6,
                               config: Optional[SolverConfig] = None) -> PropertyReport:
    """
    Sampled checks at r_a = r1^a r2^(1-a): the geometric mix w1^a w2^(1-a) lies in
    C_{r_a}, and the frontier value there is at most max(value(r1), value(r2))
    """
    config = config or SolverConfig()
    optimal = [pt for pt in points if pt.status == OPTIMAL]
    rng = np.random.default_rng([seed, 81])
    feasibility, qlc, monotone = [], [], []
    for a, b in zip(optimal, optimal[1:]):
        monotone.append((b.value - a.value, {'r1': a.r, 'r2': b.r}, b.value, a.value))
    if len(optimal) >= 2:
        for _ in range(n_triples):
            i, j = sorted(rng.choice(len(optimal), size=2, replace=False))
            alpha = float(rng.uniform())
            first, second = optimal[i], optimal[j]
            r_mix = first.r ** alpha * second.r ** (1 - alpha)
            mix = first.w_star ** alpha * second.w_star ** (1 - alpha)
            inputs = {'r1': first.r, 'r2': second.r, 'alpha': alpha}
            lhs, rhs = fam.constraint_value(mix), math.log(r_mix)
            feasibility.append((lhs - rhs, inputs, lhs, rhs))
            point = _solve_log(fam, r_mix, config, [first.w_star, second.w_star, mix])
            top = max(first.value, second.value)
            qlc.append((point.value - top, inputs, point.value, top))
    report = PropertyReport()
    report.add(grid_result('nonincreasing', monotone, tolerance))
    report.add(grid_result('geometric_mix_feasible', feasibility, tolerance))
    report.add(grid_result('quasi_logconvex', qlc, tolerance))
    for name, result in report.results.items():
        status = "✓" if result.holds else "✗"
        logger.info(f"{status} generalized frontier {name}: max margin {result.max_margin:.3g}")
    return report
