"""
Expectations, smallest quantiles and rearrangement integrals on finite spaces.
"""

import math
import logging
import itertools
from typing import Tuple

import numpy as np

from georisk.errors import DomainError, InvalidInputError
from georisk.prob_core.space import Position, Scenario, check_same_space
from georisk.settings import get_settings

logger = logging.getLogger(__name__)

# slack used when locating a probability level among cumulative sums
QUANTILE_TOL = 1e-12


def expect(x: Position, q: Scenario) -> float:
    """E_Q[X] = sum_i p_i * density_i * x_i"""
    check_same_space(x, q)
    return math.fsum(q.weights * x.values)


def quantile_steps(values: np.ndarray, p: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Piecewise-constant smallest quantile function of a discrete law.

    Returns:
        (sorted values, right end of the probability interval on which each value is the quantile)
    """
    order = np.argsort(values, kind='mergesort')
    v = np.asarray(values, dtype=float)[order]
    cum = np.cumsum(np.asarray(p, dtype=float)[order])
    cum[-1] = 1.0
    return v, cum


def _lookup(v: np.ndarray, cum: np.ndarray, levels: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(cum, levels - QUANTILE_TOL, side='left')
    return v[np.minimum(idx, v.size - 1)]


def quantile(x: Position, alpha: float) -> float:
    """Smallest alpha-quantile inf{x : P[X <= x] >= alpha}"""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0,1), got {alpha}")
    v, cum = quantile_steps(x.values, x.space.p)
    return float(_lookup(v, cum, np.array([alpha]))[0])


def tail_integral(x: Position, alpha: float) -> float:
    """Exact integral of the quantile function of X over (alpha, 1]"""
    if not 0.0 <= alpha < 1.0:
        raise DomainError(f"alpha must lie in [0,1), got {alpha}")
    v, cum = quantile_steps(x.values, x.space.p)
    left = np.concatenate(([0.0], cum[:-1]))
    widths = np.clip(cum - np.maximum(left, alpha), 0.0, None)
    return math.fsum(widths * v)


def comonotone_integral(x: Position, q: Scenario) -> float:
    """
    Integral over (0,1) of q_X(b) * q_D(b) with D = dQ/dP.

    Both quantile functions are step functions; the product is integrated
    exactly on the merged breakpoint grid.
    """
    check_same_space(x, q)
    p = x.space.p
    xv, xcum = quantile_steps(x.values, p)
    dv, dcum = quantile_steps(q.density, p)
    grid = np.union1d(xcum, dcum)
    left = np.concatenate(([0.0], grid[:-1]))
    widths = grid - left
    mids = 0.5 * (left + grid)
    keep = widths > 0
    product = _lookup(xv, xcum, mids[keep]) * _lookup(dv, dcum, mids[keep])
    return math.fsum(widths[keep] * product)


def law_equivalent_sup(x: Position, q: Scenario) -> float:
    """
    Max of E_Q'[X] over scenarios Q' whose density is a permutation of dQ/dP.

    Raises:
        NotEquiprobableError: permutations preserve the law only on equiprobable atoms
    """
    check_same_space(x, q)
    space = x.space
    space.require_equiprobable()
    limit = get_settings().max_permutation_atoms
    if space.n > limit:
        raise InvalidInputError(f"exhaustive permutation search limited to {limit} atoms, got {space.n}")
    best = -math.inf
    for perm in set(itertools.permutations(q.density)):
        best = max(best, math.fsum(space.p * np.asarray(perm) * x.values))
    return best
