"""
Parametric R-functionals R(t; Q) of the dual representation

    rho~(X) = sup_Q exp(R(E_Q[log X]; Q))

R must be nondecreasing in t for every scenario. Scenario-dependent
parameters (penalties) are indexed by the scenario position k in the set.
"""

import math
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Optional, Tuple

import numpy as np

from georisk.errors import InvalidInputError
from georisk.measures.kernels import LossKernel
from georisk.measures.orlicz import _as_table
from georisk.prob_core import ScenarioSet

logger = logging.getLogger(__name__)

R_FAMILIES = ('coherent', 'convex_penalty', 'supq_penalty', 'floor', 'log_floor', 'mean_value', 'ph_kink', 'user_table')

Q_GRID = np.linspace(0.0, 1.0, 101)

# t grid and shifts used for grid-based metadata and checks
T_GRID = np.arange(-4.0, 4.0 + 1e-12, 0.25)
H_GRID = (0.01, 0.1, 0.5, 1.0, 2.0)
GRID_TOL = 1e-9


@dataclass(frozen=True)
class RFunctional:
    """R(t; Q) for one of the built-in families"""

    family: str
    penalty: Optional[Tuple[float, ...]] = None
    kappa: float = 1.0
    level: Optional[float] = None
    kernel: Optional[LossKernel] = None
    d_plus: float = 1.0
    d_minus: float = 1.0
    table: Optional[Tuple[Tuple[float, float], ...]] = None

    def __post_init__(self):
        if self.family not in R_FAMILIES:
            raise InvalidInputError(f"unknown R family '{self.family}', expected one of {R_FAMILIES}")
        if self.family in ('convex_penalty', 'supq_penalty'):
            if self.penalty is None:
                raise InvalidInputError(f"R family '{self.family}' needs a penalty vector")
            penalty = tuple(float(c) for c in self.penalty)
            if any(c < 0 or not math.isfinite(c) for c in penalty):
                raise InvalidInputError("penalties must be finite and nonnegative")
            object.__setattr__(self, 'penalty', penalty)
        if self.family == 'supq_penalty' and not self.kappa >= 0:
            raise InvalidInputError(f"kappa must be >= 0, got {self.kappa}")
        if self.family in ('floor', 'log_floor') and self.level is None:
            raise InvalidInputError(f"R family '{self.family}' needs a level")
        if self.family == 'log_floor' and not 0.0 < self.level < 1.0:
            raise InvalidInputError(f"log_floor level a must lie in (0,1), got {self.level}")
        if self.family == 'mean_value' and self.kernel is None:
            object.__setattr__(self, 'kernel', LossKernel('linear_quadratic'))
        if self.family == 'ph_kink' and not (self.d_plus >= 0 and self.d_minus >= 0):
            raise InvalidInputError("ph_kink slopes must be nonnegative")
        if self.family == 'user_table':
            if self.table is None:
                raise InvalidInputError("user_table R family needs a table")
            table = _as_table(self.table)
            if np.any(np.diff([v for _, v in table]) < 0):
                raise InvalidInputError("R table must be nondecreasing in t")
            object.__setattr__(self, 'table', table)

    # ------------------------------------------------------------------
    # evaluation
    # ------------------------------------------------------------------

    def _penalty(self, k: int) -> float:
        if self.penalty is None:
            return 0.0
        if not 0 <= k < len(self.penalty):
            raise InvalidInputError(f"no penalty for scenario {k} ({len(self.penalty)} given)")
        return self.penalty[k]

    def value(self, t: float, k: int = 0) -> float:
        """R(t; Q_k)"""
        family = self.family
        if family == 'coherent':
            return t
        if family == 'convex_penalty':
            return t - self._penalty(k)
        if family == 'supq_penalty':
            if math.isinf(t):
                # q = 0 dominates at -inf
                return t if t > 0 else -(self._penalty(k) + 0.5 * self.kappa)
            c = self._penalty(k) + 0.5 * self.kappa * (1.0 - Q_GRID) ** 2
            return float(np.max(Q_GRID * t - c))
        if family == 'floor':
            return max(t, self.level)
        if family == 'log_floor':
            return math.log(self.level) if t <= self.level else math.log(t)
        if family == 'mean_value':
            return float(self.kernel(t))
        if family == 'ph_kink':
            slope = self.d_plus if t >= 0 else self.d_minus
            return slope * t if slope else 0.0
        xs, ys = zip(*self.table)
        return float(np.interp(t, xs, ys))

    def multiplicative(self, s: float, k: int = 0) -> float:
        """R(s; Q_k) = exp(R(log s; Q_k)) on the return scale"""
        t = -math.inf if s == 0 else math.log(s)
        v = self.value(t, k)
        if v == -math.inf:
            return 0.0
        try:
            return math.exp(v)
        except OverflowError:
            return math.inf

    # ------------------------------------------------------------------
    # metadata
    # ------------------------------------------------------------------

    def _grid_increments(self, k: int = 0):
        for t in T_GRID:
            base = self.value(float(t), k)
            for h in H_GRID:
                yield float(t), h, self.value(float(t) + h, k) - base

    @cached_property
    def expansive(self) -> bool:
        """R(t + h) >= R(t) + h for h >= 0"""
        if self.family in ('coherent', 'convex_penalty'):
            return True
        if self.family in ('supq_penalty', 'floor', 'log_floor'):
            return False
        if self.family == 'ph_kink':
            return self.d_plus >= 1.0 and self.d_minus >= 1.0
        return all(inc >= h - GRID_TOL for _, h, inc in self._grid_increments())

    @cached_property
    def translation_invariant_in_t(self) -> bool:
        """R(t + h) = R(t) + h"""
        if self.family in ('coherent', 'convex_penalty'):
            return True
        if self.family in ('supq_penalty', 'floor', 'log_floor'):
            return False
        if self.family == 'ph_kink':
            return self.d_plus == 1.0 and self.d_minus == 1.0
        return all(abs(inc - h) <= GRID_TOL for _, h, inc in self._grid_increments())

    def is_monotone_on_grid(self, n_scenarios: int = 1) -> bool:
        return all(inc >= -GRID_TOL for k in range(n_scenarios) for _, _, inc in self._grid_increments(k))

    def is_law_invariant(self, qs: ScenarioSet) -> bool:
        """R(.; Q) agrees on scenarios whose densities are permutations of each other"""
        keys = [tuple(np.sort(q.density)) for q in qs]
        for i in range(len(qs)):
            for j in range(i + 1, len(qs)):
                if not np.allclose(keys[i], keys[j], rtol=0, atol=1e-12):
                    continue
                if any(abs(self.value(float(t), i) - self.value(float(t), j)) > GRID_TOL for t in T_GRID):
                    return False
        return True

    # ------------------------------------------------------------------
    # JSON
    # ------------------------------------------------------------------

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {'family': self.family}
        if self.family in ('convex_penalty', 'supq_penalty'):
            out['c'] = list(self.penalty)
        if self.family == 'supq_penalty':
            out['kappa'] = self.kappa
        if self.family == 'floor':
            out['C'] = self.level
        if self.family == 'log_floor':
            out['a'] = self.level
        if self.family == 'mean_value':
            out['ell'] = self.kernel.to_dict()
        if self.family == 'ph_kink':
            out['d_plus'] = self.d_plus
            out['d_minus'] = self.d_minus
        if self.family == 'user_table':
            out['table'] = [list(pair) for pair in self.table]
        return out

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> 'RFunctional':
        family = data.get('family')
        level = data.get('C', data.get('a'))
        kernel = LossKernel.from_dict(data['ell']) if 'ell' in data else None
        return cls(
            family=family,
            penalty=data.get('c'),
            kappa=float(data.get('kappa', 1.0)),
            level=None if level is None else float(level),
            kernel=kernel,
            d_plus=float(data.get('d_plus', 1.0)),
            d_minus=float(data.get('d_minus', 1.0)),
            table=data.get('table'),
        )
