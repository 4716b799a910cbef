"""
Loss kernels l used by mean-value certainty equivalents.

l must be strictly increasing and convex with l(0) = 0. The inverse is
always computed by bisection so user tables and closed forms behave alike.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy import optimize

from georisk.errors import BracketError, InvalidInputError
from georisk.measures.orlicz import _as_table

logger = logging.getLogger(__name__)

KERNEL_TAGS = ('identity', 'linear_quadratic', 'exponential', 'user_table')

INVERSE_XTOL = 1e-12
MAX_DOUBLINGS = 200


@dataclass(frozen=True)
class LossKernel:
    """Strictly increasing convex l with l(0) = 0"""

    tag: str = 'identity'
    table: Optional[Tuple[Tuple[float, float], ...]] = None

    def __post_init__(self):
        if self.tag not in KERNEL_TAGS:
            raise InvalidInputError(f"unknown kernel tag '{self.tag}', expected one of {KERNEL_TAGS}")
        if self.tag != 'user_table':
            return
        if self.table is None:
            raise InvalidInputError("user_table kernel needs a table")
        table = _as_table(self.table)
        object.__setattr__(self, 'table', table)
        xs = np.array([a for a, _ in table])
        ys = np.array([b for _, b in table])
        slopes = np.diff(ys) / np.diff(xs)
        if np.any(slopes <= 0):
            raise InvalidInputError("kernel table must be strictly increasing")
        if np.any(np.diff(slopes) < -1e-12):
            raise InvalidInputError("kernel table must be convex")
        if not xs[0] <= 0.0 <= xs[-1] or abs(float(self(0.0))) > 1e-12:
            raise InvalidInputError("kernel table must pass through the origin")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.tag == 'identity':
            return x
        if self.tag == 'linear_quadratic':
            return np.where(x < 0, x, x * x + x)
        if self.tag == 'exponential':
            return np.expm1(x)
        xs, ys = zip(*self.table)
        return np.interp(x, xs, ys)

    def _bracket(self, y: float) -> Tuple[float, float]:
        if self.tag == 'user_table':
            lo, hi = self.table[0][0], self.table[-1][0]
            if not float(self(lo)) <= y <= float(self(hi)):
                raise BracketError(f"value {y} outside the kernel table range")
            return lo, hi
        lo, hi = -1.0, 1.0
        for _ in range(MAX_DOUBLINGS):
            if float(self(lo)) <= y:
                break
            lo *= 2.0
        else:
            raise BracketError(f"value {y} below the range of kernel '{self.tag}'")
        for _ in range(MAX_DOUBLINGS):
            if float(self(hi)) >= y:
                break
            hi *= 2.0
        else:
            raise BracketError(f"value {y} above the range of kernel '{self.tag}'")
        return lo, hi

    def inverse(self, y: float) -> float:
        """l^{-1}(y) by monotone bisection"""
        y = float(y)
        lo, hi = self._bracket(y)
        if float(self(lo)) == y:
            return lo
        if float(self(hi)) == y:
            return hi
        return optimize.bisect(lambda s: float(self(s)) - y, lo, hi, xtol=INVERSE_XTOL, maxiter=500)

    def to_dict(self) -> Dict[str, Any]:
        out = {'tag': self.tag}
        if self.table is not None:
            out['table'] = [list(pair) for pair in self.table]
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'LossKernel':
        return cls(tag=data.get('tag', 'identity'), table=data.get('table'))
