"""
Log-risk acceptance families B^b = {X : rho~(1/X) <= b} on a geometric level grid.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np
import pandas as pd

from georisk.correspondence.functional import MONETARY, RETURN, RiskFunctional
from georisk.errors import InvalidInputError
from georisk.prob_core import Position, ProbSpace, check_same_space

logger = logging.getLogger(__name__)

MEMBER_SLACK = 1e-12


def geometric_levels(lo: float = -4.0, hi: float = 4.0, steps: int = 161) -> np.ndarray:
    """exp of an equispaced grid on [lo, hi]"""
    if steps < 2 or not hi > lo:
        raise InvalidInputError("level grid needs hi > lo and at least two steps")
    return np.exp(np.linspace(lo, hi, steps))


@dataclass(frozen=True, eq=False)
class LogRiskAcceptanceFamily:
    """
    Level-indexed acceptance sets given by a membership predicate.

    Attributes:
        levels: ascending grid of b > 0
        member: (b, X) -> bool, X in B^b
        space: probability space of the positions
        from_measure: provenance when built from a risk measure
    """

    levels: np.ndarray
    member: Callable[[float, Position], bool]
    space: ProbSpace
    from_measure: Optional[Any] = None

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=float)
        if levels.ndim != 1 or levels.size < 2 or np.any(levels <= 0) or np.any(np.diff(levels) <= 0):
            raise InvalidInputError("levels must be a strictly ascending grid of positive numbers")
        levels.setflags(write=False)
        object.__setattr__(self, 'levels', levels)

    def contains(self, b: float, x: Position) -> bool:
        check_same_space(x, self)
        return bool(self.member(float(b), x.as_positive()))

    def spacing_at(self, value: float) -> float:
        """Width of the grid cell holding value (0 outside the grid)"""
        k = int(np.searchsorted(self.levels, value, side='left'))
        if k == 0 or k >= self.levels.size:
            return 0.0
        return float(self.levels[k] - self.levels[k - 1])


def family_from_measure(trho: RiskFunctional, levels: Optional[np.ndarray] = None) -> LogRiskAcceptanceFamily:
    """B^b = {X : rho~(1/X) <= b}, membership by direct evaluation"""
    if trho.side != RETURN:
        raise InvalidInputError("family_from_measure expects a return-side functional")
    levels = geometric_levels() if levels is None else levels

    def member(b: float, x: Position) -> bool:
        return trho(x.as_positive().reciprocal()) <= b * (1.0 + MEMBER_SLACK)

    provenance = trho.spec if trho.spec is not None else trho.name
    return LogRiskAcceptanceFamily(levels, member, trho.space, from_measure=provenance)


def measure_from_family(fam: LogRiskAcceptanceFamily, x: Position) -> float:
    """
    Grid infimum inf{b in levels : 1/X in B^b}

    Returns +inf when no grid level accepts; values below the first level
    are reported as that level.
    """
    inverse = x.as_positive().reciprocal()
    levels = fam.levels
    if not fam.contains(levels[-1], inverse):
        return math.inf
    lo, hi = -1, levels.size - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fam.contains(levels[mid], inverse):
            hi = mid
        else:
            lo = mid
    return float(levels[hi])


def tight_level(fam: LogRiskAcceptanceFamily, x: Position, rel_tol: float = 1e-13, max_iter: int = 200) -> float:
    """
    b*(X) = inf{b > 0 : X in B^b}, found by bisecting the membership predicate in log b

    Returns +inf (or 0) when membership never (or always) holds within exp(+-700).
    """
    lo, hi = 0.0, 0.0
    if fam.contains(1.0, x):
        while fam.contains(math.exp(lo - 1.0), x):
            lo -= 1.0
            if lo < -700:
                return 0.0
        lo -= 1.0
    else:
        while not fam.contains(math.exp(hi + 1.0), x):
            hi += 1.0
            if hi > 700:
                return math.inf
        lo, hi = hi, hi + 1.0
    for _ in range(max_iter):
        if hi - lo <= rel_tol:
            break
        mid = 0.5 * (lo + hi)
        if fam.contains(math.exp(mid), x):
            hi = mid
        else:
            lo = mid
    return math.exp(hi)


def in_monetary_acceptance(rho: RiskFunctional, a: float, y: Position) -> bool:
    """Y in A^a, i.e. rho(-Y) <= a"""
    if rho.side != MONETARY:
        raise InvalidInputError("in_monetary_acceptance expects a monetary functional")
    return rho(y.with_values(-y.values)) <= a


def export_family_csv(fam: LogRiskAcceptanceFamily, positions: Sequence[Position], path) -> Path:
    """Audit CSV with one row per (level, position): level, sample_position_id, member"""
    rows = []
    for pid, x in enumerate(positions):
        for b in fam.levels:
            rows.append({'level': float(b), 'sample_position_id': pid, 'member': fam.contains(b, x)})
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = pd.DataFrame(rows, columns=['level', 'sample_position_id', 'member'])
    df.to_csv(path, index=False, float_format='%.12g', lineterminator='\n')
    logger.info(f"✓ Exported {len(df)} membership rows to {path}")
    return path
