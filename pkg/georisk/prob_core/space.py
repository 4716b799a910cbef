"""
Finite probability spaces, positions and scenarios.

All objects are frozen after construction; numpy buffers are marked
read-only so nothing downstream can mutate them in place.
"""

import math
import logging
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from georisk.errors import InvalidInputError, NotEquiprobableError, SpaceMismatchError
from georisk.settings import get_settings

logger = logging.getLogger(__name__)


def _frozen_array(values, name: str) -> np.ndarray:
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"{name} must be numeric: {e}") from e
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty vector")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProbSpace:
    """Finite outcome set with a strictly positive reference measure P"""

    outcomes: Tuple[str, ...]
    p: np.ndarray

    def __post_init__(self):
        p = _frozen_array(self.p, 'p')
        outcomes = tuple(str(o) for o in self.outcomes)
        if len(outcomes) != p.size:
            raise InvalidInputError(f"{len(outcomes)} outcomes but {p.size} probabilities")
        if len(set(outcomes)) != len(outcomes):
            raise InvalidInputError("outcome identifiers must be unique")
        if not np.all(np.isfinite(p)):
            raise InvalidInputError("probabilities must be finite")
        bad = np.flatnonzero(p <= 0)
        if bad.size:
            raise InvalidInputError(f"probability of outcome '{outcomes[bad[0]]}' is {p[bad[0]]}, must be > 0")
        total = math.fsum(p)
        if abs(total - 1.0) > get_settings().prob_tol:
            raise InvalidInputError(f"probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, 'outcomes', outcomes)
        object.__setattr__(self, 'p', p)

    @classmethod
    def uniform(cls, n: int, prefix: str = 'w') -> 'ProbSpace':
        if n < 1:
            raise InvalidInputError("a space needs at least one outcome")
        return cls(tuple(f"{prefix}{i + 1}" for i in range(n)), np.full(n, 1.0 / n))

    @property
    def n(self) -> int:
        return self.p.size

    def is_equiprobable(self, tol: Optional[float] = None) -> bool:
        tol = get_settings().prob_tol if tol is None else tol
        return float(np.ptp(self.p)) <= tol

    def same_as(self, other: 'ProbSpace') -> bool:
        if self is other:
            return True
        return (isinstance(other, ProbSpace)
                and self.outcomes == other.outcomes
                and np.array_equal(self.p, other.p))

    def require_equiprobable(self):
        if not self.is_equiprobable():
            raise NotEquiprobableError("operation requires equiprobable atoms")

    def equal_weight_groups(self) -> list:
        """Index groups of atoms sharing the same probability (law-preserving permutations)"""
        groups = {}
        for i, w in enumerate(self.p):
            groups.setdefault(round(float(w) / get_settings().prob_tol), []).append(i)
        return [g for g in groups.values() if len(g) > 1]


def check_same_space(a, b):
    if not a.space.same_as(b.space):
        raise SpaceMismatchError("objects live on different probability spaces")


@dataclass(frozen=True, eq=False)
class Position:
    """Real random variable on a finite space (monetary units or log-returns)"""

    space: ProbSpace
    values: np.ndarray

    def __post_init__(self):
        values = _frozen_array(self.values, 'values')
        if values.size != self.space.n:
            raise InvalidInputError(f"position has {values.size} values for {self.space.n} outcomes")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("position values must be finite")
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return self.values.size

    def with_values(self, values) -> 'Position':
        return type(self)(self.space, values)

    def log(self) -> 'Position':
        if np.any(self.values <= 0):
            raise InvalidInputError("log requires strictly positive values")
        return Position(self.space, np.log(self.values))

    def exp(self) -> 'PositivePosition':
        return PositivePosition(self.space, np.exp(self.values))

    def as_positive(self) -> 'PositivePosition':
        if isinstance(self, PositivePosition):
            return self
        return PositivePosition(self.space, self.values)

    @classmethod
    def constant(cls, space: ProbSpace, c: float):
        return cls(space, np.full(space.n, float(c)))


class PositivePosition(Position):
    """Position bounded below by pos_floor (domain of return risk measures)"""

    def __post_init__(self):
        super().__post_init__()
        floor = get_settings().pos_floor
        if np.any(self.values < floor):
            raise InvalidInputError(f"positive position has values below pos_floor={floor}")

    def reciprocal(self) -> 'PositivePosition':
        return PositivePosition(self.space, 1.0 / self.values)


@dataclass(frozen=True, eq=False)
class Scenario:
    """Probability measure Q << P stored as its density dQ/dP"""

    space: ProbSpace
    density: np.ndarray
    label: str = ''

    def __post_init__(self):
        density = _frozen_array(self.density, 'density')
        if density.size != self.space.n:
            raise InvalidInputError(f"density has {density.size} entries for {self.space.n} outcomes")
        if not np.all(np.isfinite(density)) or np.any(density < 0):
            raise InvalidInputError("density must be finite and nonnegative")
        mass = math.fsum(self.space.p * density)
        if abs(mass - 1.0) > get_settings().prob_tol:
            raise InvalidInputError(f"scenario '{self.label}' has total mass {mass!r}, expected 1")
        object.__setattr__(self, 'density', density)

    @classmethod
    def reference(cls, space: ProbSpace) -> 'Scenario':
        return cls(space, np.ones(space.n), label='P')

    @classmethod
    def from_weights(cls, space: ProbSpace, q, label: str = '') -> 'Scenario':
        q = np.asarray(q, dtype=float)
        return cls(space, q / space.p, label=label)

    @property
    def weights(self) -> np.ndarray:
        """Atom probabilities under Q"""
        return self.space.p * self.density

    def permuted(self, perm: Sequence[int]) -> 'Scenario':
        return Scenario(self.space, self.density[list(perm)], label=f"{self.label}~")


@dataclass(frozen=True, eq=False)
class ScenarioSet:
    """Finite family of scenarios over one space"""

    scenarios: Tuple[Scenario, ...]
    space: ProbSpace = field(init=False)

    def __post_init__(self):
        scenarios = tuple(self.scenarios)
        if not scenarios:
            raise InvalidInputError("scenario set must be nonempty")
        space = scenarios[0].space
        for q in scenarios[1:]:
            if not q.space.same_as(space):
                raise SpaceMismatchError("all scenarios must share one space")
        object.__setattr__(self, 'scenarios', scenarios)
        object.__setattr__(self, 'space', space)

    @classmethod
    def of(cls, *scenarios: Scenario) -> 'ScenarioSet':
        return cls(tuple(scenarios))

    def __len__(self):
        return len(self.scenarios)

    def __iter__(self) -> Iterator[Scenario]:
        return iter(self.scenarios)

    def __getitem__(self, k: int) -> Scenario:
        return self.scenarios[k]

    @property
    def densities(self) -> np.ndarray:
        return np.vstack([q.density for q in self.scenarios])

    def with_midpoints(self) -> 'ScenarioSet':
        """Augment with pairwise midpoint densities (cheap convex-hull stand-in)"""
        extra = [
            Scenario(self.space, 0.5 * (a.density + b.density), label=f"mid({a.label},{b.label})")
            for a, b in itertools.combinations(self.scenarios, 2)
        ]
        logger.debug(f"Added {len(extra)} midpoint scenarios")
        return ScenarioSet(self.scenarios + tuple(extra))

    def permutation_closure(self) -> Tuple['ScenarioSet', Tuple[int, ...]]:
        """
        All distinct density permutations of every scenario.

        Returns:
            (closed set, origin index of each member in self)
        """
        self.space.require_equiprobable()
        members, origins, seen = [], [], set()
        for k, q in enumerate(self.scenarios):
            for perm in itertools.permutations(range(self.space.n)):
                key = (k, tuple(q.density[list(perm)]))
                if key in seen:
                    continue
                seen.add(key)
                members.append(q.permuted(perm))
                origins.append(k)
        return ScenarioSet(tuple(members)), tuple(origins)
