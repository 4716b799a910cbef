"""
Grid seeding and lattice pattern search for quasi-convex objectives over
polyhedral weight domains.
"""

import itertools
import logging
import math
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

MAX_SEED_POINTS = 50_000
MAX_BOX_POINTS = 5_000
MAX_MOVES = 20_000


def simplex_grid(n: int, resolution: int) -> np.ndarray:
    """All points of the simplex with coordinates in {0, 1/N, ..., 1}, vertices included"""
    if n == 1:
        return np.ones((1, 1))
    slots = resolution + n - 1
    bars = np.array(list(itertools.combinations(range(slots), n - 1)), dtype=int)
    edges = np.hstack([np.full((bars.shape[0], 1), -1), bars, np.full((bars.shape[0], 1), slots)])
    return (np.diff(edges, axis=1) - 1).astype(float) / resolution


def seed_resolution(n: int, resolution: int = 64, cap: int = MAX_SEED_POINTS) -> int:
    """Largest N <= resolution whose simplex grid stays below cap points"""
    while resolution > 1 and math.comb(resolution + n - 1, n - 1) > cap:
        resolution //= 2
    return resolution


def box_grid(lower: np.ndarray, upper: np.ndarray, cap: int = MAX_BOX_POINTS) -> Tuple[np.ndarray, float]:
    """Regular grid on a box with the same spacing per axis, and that spacing"""
    n = lower.size
    per_axis = max(3, int(math.floor(cap ** (1.0 / n))))
    per_axis = min(per_axis, 65)
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(lower, upper)]
    mesh = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, n)
    return mesh, float(np.max(upper - lower)) / (per_axis - 1)


def lattice_directions(dim: int, sum_zero: bool) -> np.ndarray:
    """
    Unit lattice moves {-1,0,1}^k minus the origin

    With sum_zero the last coordinate absorbs the others so every move stays
    on the hyperplane sum(w) = 1. Above five free coordinates only pair
    transfers are used.
    """
    free = dim - 1 if sum_zero else dim
    if free > 5:
        moves = []
        if sum_zero:
            for i, j in itertools.permutations(range(dim), 2):
                d = np.zeros(dim)
                d[i], d[j] = 1.0, -1.0
                moves.append(d)
        else:
            for i in range(dim):
                d = np.zeros(dim)
                d[i] = 1.0
                moves += [d, -d]
        return np.array(moves)
    offsets = np.array([o for o in itertools.product((-1, 0, 1), repeat=free) if any(o)], dtype=float)
    if sum_zero:
        offsets = np.hstack([offsets, -offsets.sum(axis=1, keepdims=True)])
    return offsets


def null_directions(normals: Sequence[np.ndarray], dim: int) -> np.ndarray:
    """
    Moves along the intersection of the hyperplanes orthogonal to normals,
    restricted to a few coordinates at a time

    Lets the search slide along an active linear constraint.
    """
    normals = [np.asarray(v, dtype=float) for v in normals]
    width = len(normals) + 1
    moves = []
    for idx in itertools.combinations(range(dim), min(width, dim)):
        block = np.array([v[list(idx)] for v in normals])
        _, s, vt = np.linalg.svd(block)
        rank = int(np.sum(s > 1e-12 * max(1.0, s.max(initial=0.0))))
        if rank == len(idx):
            continue
        d = np.zeros(dim)
        d[list(idx)] = vt[-1]
        d /= np.max(np.abs(d))
        moves += [d, -d]
    if not moves:
        return np.zeros((0, dim))
    return np.array(moves)


def pattern_search(objective: Callable[[np.ndarray], float],
                   feasible: Callable[[np.ndarray], bool],
                   starts: Iterable[np.ndarray],
                   directions: np.ndarray,
                   step: float,
                   min_step: float) -> Tuple[Optional[np.ndarray], float]:
    """
    Best-neighbour lattice descent from each start, halving the step when no
    neighbour improves

    Args:
        objective: function to minimize
        feasible: domain and constraint test for a candidate point
        starts: feasible starting points, searched in order
        directions: unit moves, one per row
        step: initial lattice step
        min_step: stop once the step falls below this

    Returns:
        (point, value): the best point over all starts; (None, inf) without starts
    """
    best_x, best_v = None, math.inf
    for start in starts:
        x = np.asarray(start, dtype=float)
        v = objective(x)
        h, moves = step, 0
        while h >= min_step and moves < MAX_MOVES:
            candidate, cand_v = None, v
            for d in directions:
                y = x + h * d
                if not feasible(y):
                    continue
                fy = objective(y)
                if fy < cand_v:
                    candidate, cand_v = y, fy
            if candidate is None:
                h *= 0.5
            else:
                x, v = candidate, cand_v
            moves += 1
        logger.debug(f"Pattern search stopped at step {h:.3g} after {moves} moves, value {v:.12g}")
        if v < best_v:
            best_x, best_v = x, v
    return best_x, best_v


def best_seeds(points: np.ndarray, values: np.ndarray, k: int) -> List[np.ndarray]:
    """The k lowest-valued points, earliest first among ties"""
    order = np.argsort(values, kind='stable')[:k]
    return [points[i] for i in order if np.isfinite(values[i])]
