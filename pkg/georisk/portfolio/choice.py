"""
Multiplicative portfolio choice: minimize rho~(prod_i Y_i^{w_i}) over the
simplex subject to E[sum_i w_i log Y_i] <= r, and its efficient frontier.
"""

import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from georisk.correspondence.checkers import PropertyReport, grid_result
from georisk.correspondence.functional import RETURN, RiskFunctional, to_monetary
from georisk.errors import ConsistencyError, InvalidInputError
from georisk.portfolio.search import (
    best_seeds,
    lattice_directions,
    null_directions,
    pattern_search,
    seed_resolution,
    simplex_grid,
)
from georisk.prob_core import Position, PositivePosition, check_same_space

logger = logging.getLogger(__name__)

OPTIMAL = 'optimal'
INFEASIBLE = 'infeasible'
EQUIVALENCE_TOL = 1e-12
FEASIBILITY_TOL = 1e-12
MAX_ORACLE_ASSETS = 3


class SolverConfig(BaseModel):
    """Grid seeding and refinement parameters"""

    model_config = ConfigDict(frozen=True)

    seed_resolution: int = Field(default=64, ge=1)
    min_step: float = Field(default=1e-5, gt=0)
    restarts: int = Field(default=4, ge=1)
    oracle_resolution: int = Field(default=512, ge=1)


@dataclass(frozen=True, eq=False)
class PortfolioProblem:
    """
    Attributes:
        assets: gross returns Y_i on a common space
        target: upper bound r on E[sum_i w_i log Y_i], +inf for no constraint
        measure: return risk measure rho~
    """

    assets: Tuple[PositivePosition, ...]
    target: float
    measure: RiskFunctional

    def __post_init__(self):
        assets = tuple(a.as_positive() for a in self.assets)
        if len(assets) < 2:
            raise InvalidInputError("a portfolio problem needs at least two assets")
        for a in assets[1:]:
            check_same_space(a, assets[0])
        check_same_space(assets[0], self.measure)
        if self.measure.side != RETURN:
            raise InvalidInputError("portfolio choice expects a return risk measure")
        if math.isnan(self.target):
            raise InvalidInputError("target r must not be nan")
        object.__setattr__(self, 'assets', assets)
        object.__setattr__(self, 'target', float(self.target))

    @property
    def n_assets(self) -> int:
        return len(self.assets)

    @property
    def space(self):
        return self.assets[0].space

    @cached_property
    def log_returns(self) -> np.ndarray:
        """X_i = log Y_i, one row per asset"""
        return np.log(np.vstack([a.values for a in self.assets]))

    @cached_property
    def expected_logs(self) -> np.ndarray:
        return self.log_returns @ self.space.p

    @cached_property
    def _monetary(self) -> RiskFunctional:
        return to_monetary(self.measure)

    def with_target(self, r: float) -> 'PortfolioProblem':
        return replace(self, target=r)

    def log_growth(self, w: np.ndarray) -> float:
        return float(np.asarray(w) @ self.expected_logs)

    def is_feasible(self, w: np.ndarray) -> bool:
        w = np.asarray(w)
        if np.any(w < -1e-15) or abs(w.sum() - 1.0) > 1e-9:
            return False
        if self.target == math.inf:
            return True
        return self.log_growth(w) <= self.target + FEASIBILITY_TOL * max(1.0, abs(self.target))

    def constraint_nonempty(self) -> bool:
        # a linear function attains its minimum over the simplex at a vertex
        return self.is_feasible(np.eye(self.n_assets)[int(np.argmin(self.expected_logs))])

    def portfolio(self, w: np.ndarray) -> PositivePosition:
        """prod_i Y_i^{w_i}"""
        return PositivePosition(self.space, np.exp(np.asarray(w) @ self.log_returns))

    def objective(self, w: np.ndarray) -> float:
        return self.measure(self.portfolio(w))

    def arithmetic_objective(self, w: np.ndarray) -> float:
        """rho(sum_i w_i log Y_i) for rho the monetary counterpart"""
        return self._monetary(Position(self.space, np.asarray(w) @ self.log_returns))

    def check_equivalence(self, w: np.ndarray) -> float:
        """rho~(prod Y_i^{w_i}) against exp(rho(sum w_i log Y_i)); returns the first"""
        geometric = self.objective(w)
        arithmetic = math.exp(self.arithmetic_objective(w))
        if abs(geometric - arithmetic) > EQUIVALENCE_TOL * max(1.0, abs(geometric)):
            raise ConsistencyError(f"objective forms disagree at w={np.asarray(w).tolist()}: "
                                   f"{geometric!r} vs {arithmetic!r}")
        return geometric


@dataclass(frozen=True)
class FrontierPoint:
    r: float
    w_star: Optional[np.ndarray]
    value: float
    status: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            'r': self.r,
            'w_star': None if self.w_star is None else self.w_star.tolist(),
            'value': self.value,
            'status': self.status,
        }


def _infeasible(r: float) -> FrontierPoint:
    logger.warning(f"Constraint set is empty for r={r}")
    return FrontierPoint(r, None, math.nan, INFEASIBLE)


def _sanitize(w: np.ndarray) -> np.ndarray:
    w = np.clip(w, 0.0, None)
    return w / w.sum()


def _directions(p: PortfolioProblem) -> np.ndarray:
    moves = [lattice_directions(p.n_assets, sum_zero=True)]
    if p.target < math.inf:
        moves.append(null_directions([np.ones(p.n_assets), p.expected_logs], p.n_assets))
    return np.vstack(moves)


def solve_portfolio(p: PortfolioProblem, config: Optional[SolverConfig] = None,
                    warm_starts: Sequence[np.ndarray] = ()) -> FrontierPoint:
    """
    Minimize rho~(prod_i Y_i^{w_i}) over the feasible part of the simplex

    Seeds on the simplex grid, then refines the best seeds and any warm starts
    by lattice pattern search down to config.min_step.

    Args:
        p: problem instance
        config: solver parameters
        warm_starts: extra feasible starting weights

    Returns:
        FrontierPoint: optimum, or status 'infeasible' when the constraint set is empty
    """
    config = config or SolverConfig()
    if not p.constraint_nonempty():
        return _infeasible(p.target)

    resolution = seed_resolution(p.n_assets, config.seed_resolution)
    grid = simplex_grid(p.n_assets, resolution)
    values = np.array([p.objective(w) if p.is_feasible(w) else math.inf for w in grid])
    starts = best_seeds(grid, values, config.restarts)
    starts += [np.asarray(w, dtype=float) for w in warm_starts if p.is_feasible(w)]
    if not starts:
        # grid misses a thin feasible set; the best vertex is always feasible
        starts = [np.eye(p.n_assets)[int(np.argmin(p.expected_logs))]]

    w, _ = pattern_search(p.objective, p.is_feasible, starts, _directions(p),
                          step=1.0 / resolution, min_step=config.min_step)
    w = _sanitize(w)
    value = p.check_equivalence(w)
    logger.debug(f"r={p.target}: optimum {value:.12g} at w={w.tolist()}")
    return FrontierPoint(p.target, w, value, OPTIMAL)


def dense_grid_oracle(p: PortfolioProblem, resolution: int = 512) -> FrontierPoint:
    """Brute-force minimum over the simplex grid of the given resolution (at most three assets)"""
    if p.n_assets > MAX_ORACLE_ASSETS:
        raise InvalidInputError(f"the grid oracle handles at most {MAX_ORACLE_ASSETS} assets")
    if not p.constraint_nonempty():
        return _infeasible(p.target)
    best_w, best_v = None, math.inf
    for w in simplex_grid(p.n_assets, resolution):
        if not p.is_feasible(w):
            continue
        v = p.objective(w)
        if v < best_v:
            best_w, best_v = w, v
    if best_w is None:
        return _infeasible(p.target)
    return FrontierPoint(p.target, best_w, p.check_equivalence(best_w), OPTIMAL)


def efficient_frontier(p: PortfolioProblem, r_grid: Sequence[float],
                       config: Optional[SolverConfig] = None) -> List[FrontierPoint]:
    """
    Optimal values along an ascending r grid

    Each solve is warm-started with the previous optimum, which stays
    feasible as r grows, so the values come out nonincreasing.
    """
    r_grid = [float(r) for r in r_grid]
    if any(b < a for a, b in zip(r_grid, r_grid[1:])):
        raise InvalidInputError("r grid must be ascending")
    points, previous = [], None
    for r in r_grid:
        warm = [] if previous is None else [previous]
        point = solve_portfolio(p.with_target(r), config, warm)
        if point.status == OPTIMAL:
            previous = point.w_star
        points.append(point)
    optimal = [pt for pt in points if pt.status == OPTIMAL]
    for a, b in zip(optimal, optimal[1:]):
        if b.value > a.value + 1e-6:
            raise ConsistencyError(f"frontier increases between r={a.r} and r={b.r}: {a.value} -> {b.value}")
    logger.info(f"Frontier: {len(optimal)}/{len(points)} points optimal")
    return points


def check_frontier(p: PortfolioProblem, points: Sequence[FrontierPoint], n_triples: int = 20, seed: int = 0,
                   tolerance: float = 1e-6, config: Optional[SolverConfig] = None) -> PropertyReport:
    """
    Sampled frontier properties: nonincreasing in r, and quasi-convex, i.e.
    value(a r1 + (1-a) r2) <= max(value(r1), value(r2))
    """
    optimal = [pt for pt in points if pt.status == OPTIMAL]
    report = PropertyReport()
    rows = []
    for a, b in zip(optimal, optimal[1:]):
        rows.append((b.value - a.value, {'r1': a.r, 'r2': b.r}, b.value, a.value))
    report.add(grid_result('nonincreasing', rows, tolerance))

    rng = np.random.default_rng([seed, 82])
    rows = []
    if len(optimal) >= 2:
        for _ in range(n_triples):
            i, j = sorted(rng.choice(len(optimal), size=2, replace=False))
            alpha = float(rng.uniform())
            first, second = optimal[i], optimal[j]
            r_mix = alpha * first.r + (1 - alpha) * second.r
            if not math.isfinite(r_mix):
                continue
            mix = alpha * first.w_star + (1 - alpha) * second.w_star
            point = solve_portfolio(p.with_target(r_mix), config, [first.w_star, second.w_star, mix])
            rhs = max(first.value, second.value)
            rows.append((point.value - rhs, {'r1': first.r, 'r2': second.r, 'alpha': alpha},
                         point.value, rhs))
    report.add(grid_result('quasi_convex', rows, tolerance))
    for name, result in report.results.items():
        status = "✓" if result.holds else "✗"
        logger.info(f"{status} frontier {name}: max margin {result.max_margin:.3g}")
    return report
