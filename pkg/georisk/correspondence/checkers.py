"""
Sampled property checkers for risk functionals.

Every property is tested on n_samples tuples drawn from a generator seeded by
(seed, key). Properties that correspond under the monetary <-> return
bijection share a key, so a monetary rho and its return counterpart see the
same tuples in log coordinates: Z on the monetary side, X = exp(Z) on the
return side. Multiplicative properties of return functionals are compared in
log scale, which makes paired verdicts agree up to rounding.

A margin is positive when the defining inequality is violated.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import optimize

from georisk.correspondence.functional import MONETARY, RETURN, RiskFunctional, safe_log
from georisk.errors import BracketError, InvalidInputError
from georisk.prob_core import Position
from georisk.settings import get_settings

logger = logging.getLogger(__name__)

PROPERTIES = (
    'normalized_zero',
    'normalized_one',
    'monotone',
    'translation_invariant',
    'positively_homogeneous',
    'convex',
    'subadditive',
    'quasi_convex',
    'cash_subadditive',
    'cash_superadditive',
    'constant_multiplicative',
    'submultiplicative',
    'logconvex',
    'star_shaped',
    'quasi_logconvex',
    'law_invariant',
    'continuous_from_below',
)

# (monetary property of rho, return property of exp(rho(log .)))
BRIDGES = (
    ('normalized_zero', 'normalized_one'),
    ('monotone', 'monotone'),
    ('translation_invariant', 'positively_homogeneous'),
    ('positively_homogeneous', 'constant_multiplicative'),
    ('subadditive', 'submultiplicative'),
    ('convex', 'logconvex'),
    ('cash_superadditive', 'star_shaped'),
    ('quasi_convex', 'quasi_logconvex'),
    ('law_invariant', 'law_invariant'),
)

RETURN_STYLE = frozenset({
    'normalized_one', 'constant_multiplicative', 'submultiplicative',
    'logconvex', 'star_shaped', 'quasi_logconvex',
})

# compared in log scale when the functional lives on the return side
LOG_SCALE = RETURN_STYLE | {'monotone', 'positively_homogeneous', 'law_invariant'}

EQUALITY = frozenset({
    'normalized_zero', 'normalized_one', 'translation_invariant', 'positively_homogeneous',
    'constant_multiplicative', 'law_invariant', 'continuous_from_below',
})

LEVEL_MATCHED = frozenset({'quasi_convex', 'quasi_logconvex'})

LEVEL_BRACKET = 6.0
CONTINUITY_DEPTH = 40

_SKIPPABLE = (InvalidInputError, BracketError, ArithmeticError)


def _pair_keys() -> Dict[Tuple[str, str], int]:
    keys = {}
    for k, (left, right) in enumerate(BRIDGES):
        keys[(MONETARY, left)] = k
        keys[(RETURN, right)] = k
    return keys


_PAIR_KEYS = _pair_keys()


def property_key(side: str, prop: str) -> int:
    """Generator key: shared by bridged properties, unique otherwise"""
    return _PAIR_KEYS.get((side, prop), 100 + PROPERTIES.index(prop))


class SamplerConfig(BaseModel):
    """Sampling parameters; unset values come from the global settings"""

    model_config = ConfigDict(frozen=True)

    n_samples: int = Field(default_factory=lambda: get_settings().samples, ge=1)
    tolerance: float = Field(default_factory=lambda: get_settings().tolerance, gt=0)
    confirm_margin: float = Field(default_factory=lambda: get_settings().confirm_margin, gt=0)
    seed: int = 0
    log_low: float = -3.0
    log_high: float = 3.0
    level_matching: bool = True

    def scaled(self, factor: int) -> 'SamplerConfig':
        return self.model_copy(update={'n_samples': self.n_samples * factor})


@dataclass(frozen=True)
class Draw:
    """One sampled tuple in log coordinates"""

    index: int
    z1: np.ndarray
    z2: np.ndarray
    bump: np.ndarray
    u: float
    perm: np.ndarray
    shift: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'index': self.index,
            'z1': self.z1.tolist(),
            'z2': self.z2.tolist(),
            'bump': self.bump.tolist(),
            'u': self.u,
            'perm': self.perm.tolist(),
            'shift': self.shift,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Draw':
        return cls(
            index=int(data['index']),
            z1=np.asarray(data['z1'], dtype=float),
            z2=np.asarray(data['z2'], dtype=float),
            bump=np.asarray(data['bump'], dtype=float),
            u=float(data['u']),
            perm=np.asarray(data['perm'], dtype=int),
            shift=float(data.get('shift', 0.0)),
        )


def draw_samples(space, config: SamplerConfig, key: int) -> Iterable[Draw]:
    """Yield the tuples for one generator key; the draw order never depends on the property"""
    rng = np.random.default_rng([config.seed, key])
    n = space.n
    groups = space.equal_weight_groups()
    for i in range(config.n_samples):
        z1 = rng.uniform(config.log_low, config.log_high, n)
        z2 = rng.uniform(config.log_low, config.log_high, n)
        bump = rng.uniform(0.0, 1.0, n)
        u = float(rng.uniform())
        perm = np.arange(n)
        for g in groups:
            perm[g] = np.asarray(g)[rng.permutation(len(g))]
        yield Draw(i, z1, z2, bump, u, perm)


@dataclass(frozen=True)
class Counterexample:
    inputs: Dict[str, Any]
    lhs: float
    rhs: float
    margin: float
    sample_index: int
    confirmed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            'inputs': self.inputs,
            'lhs': self.lhs,
            'rhs': self.rhs,
            'margin': self.margin,
            'sample_index': self.sample_index,
            'confirmed': self.confirmed,
        }


@dataclass(frozen=True)
class PropertyResult:
    name: str
    holds: bool
    samples: int
    tolerance: float
    max_margin: float
    counterexample: Optional[Counterexample] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'holds': self.holds,
            'samples': self.samples,
            'tolerance': self.tolerance,
            'max_margin': self.max_margin,
            'counterexample': None if self.counterexample is None else self.counterexample.to_dict(),
        }


@dataclass
class PropertyReport:
    """Per-property verdicts plus any named values computed along the way"""

    results: Dict[str, PropertyResult] = field(default_factory=dict)
    values: Dict[str, float] = field(default_factory=dict)

    def __getitem__(self, name: str) -> PropertyResult:
        return self.results[name]

    def __contains__(self, name: str) -> bool:
        return name in self.results

    def holds(self, name: str) -> bool:
        return self.results[name].holds

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.results.values())

    def add(self, result: PropertyResult):
        self.results[result.name] = result

    def to_dict(self) -> Dict[str, Any]:
        return {
            'properties': {name: r.to_dict() for name, r in self.results.items()},
            'values': dict(self.values),
            'all_hold': self.all_hold,
        }


def _gap(lhs: float, rhs: float, equality: bool) -> float:
    if math.isnan(lhs) or math.isnan(rhs):
        return math.inf
    if lhs == rhs:
        return 0.0
    diff = lhs - rhs
    return abs(diff) if equality else diff


def _pow(base: float, exponent: float) -> float:
    if base < 0:
        return math.nan
    if base == math.inf:
        return math.inf
    return base ** exponent


class _Subject:
    """Evaluation context of one (functional, property) pair"""

    def __init__(self, f: RiskFunctional, prop: str):
        self.f = f
        self.prop = prop
        self.real = f.side == MONETARY and prop not in RETURN_STYLE
        self.log = f.side == RETURN and prop in LOG_SCALE

    def position(self, z: np.ndarray) -> Position:
        return Position(self.f.space, z if self.real else np.exp(z))

    def raw(self, values: np.ndarray) -> float:
        return self.f(Position(self.f.space, values))

    def val(self, values: np.ndarray) -> float:
        v = self.raw(values)
        return safe_log(v) if self.log else v

    def level_shift(self, draw: Draw) -> Optional[float]:
        target = self.val(self.position(draw.z1).values)

        def excess(s: float) -> float:
            return self.val(self.position(draw.z2 + s).values) - target

        lo, hi = excess(-LEVEL_BRACKET), excess(LEVEL_BRACKET)
        if not (np.isfinite(lo) and np.isfinite(hi)) or lo * hi >= 0:
            return None
        return optimize.brentq(excess, -LEVEL_BRACKET, LEVEL_BRACKET, xtol=1e-12)


def _scalar_shift(subject: _Subject, u: float) -> float:
    return -1.0 + 2.0 * u if subject.real else 3.0 * u


def _mix_alpha(u: float) -> float:
    return 0.01 + 0.98 * u


def _evaluate(subject: _Subject, draw: Draw) -> Tuple[float, float]:
    """(lhs, rhs) of the defining inequality lhs <= rhs (or equality) on one draw"""
    prop, f = subject.prop, subject.f
    x = subject.position(draw.z1).values
    y = subject.position(draw.z2 + draw.shift).values
    u = draw.u

    if prop == 'normalized_zero':
        return subject.raw(np.zeros(f.space.n)), 0.0
    if prop == 'normalized_one':
        return subject.val(np.ones(f.space.n)), 0.0
    if prop == 'monotone':
        return subject.val(x), subject.val(subject.position(draw.z1 + draw.bump).values)
    if prop == 'translation_invariant':
        h = _scalar_shift(subject, u)
        return subject.raw(x + h), subject.raw(x) + h
    if prop == 'positively_homogeneous':
        lam = math.exp(-1.0 + 2.0 * u)
        if subject.log:
            return subject.val(lam * x), math.log(lam) + subject.val(x)
        return subject.raw(lam * x), lam * subject.raw(x)
    if prop == 'convex':
        a = _mix_alpha(u)
        return subject.raw(a * x + (1 - a) * y), a * subject.raw(x) + (1 - a) * subject.raw(y)
    if prop == 'subadditive':
        return subject.raw(x + y), subject.raw(x) + subject.raw(y)
    if prop == 'quasi_convex':
        a = _mix_alpha(u)
        return subject.val(a * x + (1 - a) * y), max(subject.val(x), subject.val(y))
    if prop == 'cash_subadditive':
        h = 3.0 * u
        return subject.raw(x + h), subject.raw(x) + h
    if prop == 'cash_superadditive':
        h = 3.0 * u
        return subject.raw(x) + h, subject.raw(x + h)
    if prop == 'constant_multiplicative':
        lam = math.exp(-1.0 + 2.0 * u)
        if subject.log:
            return subject.val(x ** lam), lam * subject.val(x)
        return subject.raw(x ** lam), _pow(subject.raw(x), lam)
    if prop == 'submultiplicative':
        if subject.log:
            return subject.val(x * y), subject.val(x) + subject.val(y)
        return subject.raw(x * y), subject.raw(x) * subject.raw(y)
    if prop == 'logconvex':
        a = _mix_alpha(u)
        geo = x ** a * y ** (1 - a)
        if subject.log:
            return subject.val(geo), a * subject.val(x) + (1 - a) * subject.val(y)
        return subject.raw(geo), _pow(subject.raw(x), a) * _pow(subject.raw(y), 1 - a)
    if prop == 'star_shaped':
        lam = math.exp(3.0 * u)
        if subject.log:
            return math.log(lam) + subject.val(x), subject.val(lam * x)
        return lam * subject.raw(x), subject.raw(lam * x)
    if prop == 'quasi_logconvex':
        a = _mix_alpha(u)
        return subject.val(x ** a * y ** (1 - a)), max(subject.val(x), subject.val(y))
    if prop == 'law_invariant':
        return subject.val(x), subject.val(x[draw.perm])
    if prop == 'continuous_from_below':
        step = 2.0 ** -CONTINUITY_DEPTH
        below = x - step if subject.real else x * (1.0 - step)
        return subject.val(below), subject.val(x)
    raise InvalidInputError(f"unknown property '{prop}', expected one of {PROPERTIES}")


def _prepare(subject: _Subject, draw: Draw, config: SamplerConfig) -> Draw:
    if config.level_matching and subject.prop in LEVEL_MATCHED and draw.index % 2 == 1:
        shift = subject.level_shift(draw)
        if shift is not None:
            return Draw(draw.index, draw.z1, draw.z2, draw.bump, draw.u, draw.perm, shift)
    return draw


def _run(subject: _Subject, draws: Iterable[Draw], config: SamplerConfig, single: bool = False) -> PropertyResult:
    equality = subject.prop in EQUALITY
    worst: Optional[Tuple[float, Draw, float, float]] = None
    evaluated, skipped = 0, 0
    for draw in draws:
        try:
            draw = _prepare(subject, draw, config)
            lhs, rhs = _evaluate(subject, draw)
        except _SKIPPABLE as e:
            skipped += 1
            logger.debug(f"{subject.f.name}/{subject.prop}: sample {draw.index} skipped ({e})")
            continue
        evaluated += 1
        margin = _gap(lhs, rhs, equality)
        if worst is None or margin > worst[0]:
            worst = (margin, draw, lhs, rhs)
        if single:
            break
    if skipped:
        logger.debug(f"{subject.f.name}/{subject.prop}: {skipped} samples outside the evaluation domain")

    if worst is None:
        return PropertyResult(subject.prop, True, 0, config.tolerance, 0.0)
    margin, draw, lhs, rhs = worst
    if margin <= config.tolerance:
        return PropertyResult(subject.prop, True, evaluated, config.tolerance, margin)
    cx = Counterexample(
        inputs=draw.to_dict(),
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        sample_index=draw.index,
        confirmed=margin > config.confirm_margin,
    )
    return PropertyResult(subject.prop, False, evaluated, config.tolerance, margin, cx)


def check_property(f: RiskFunctional, prop: str, config: Optional[SamplerConfig] = None) -> PropertyResult:
    """
    Sampled verdict for one property

    Args:
        f: functional under test
        prop: one of PROPERTIES
        config: sampler parameters (defaults from settings)

    Returns:
        PropertyResult: verdict with the max-margin counterexample on failure
    """
    if prop not in PROPERTIES:
        raise InvalidInputError(f"unknown property '{prop}', expected one of {PROPERTIES}")
    config = config or SamplerConfig()
    if prop == 'normalized_zero' and f.side == RETURN:
        # rho(0) = 0 concerns monetary functionals only
        return PropertyResult(prop, True, 0, config.tolerance, 0.0)
    subject = _Subject(f, prop)
    draws = draw_samples(f.space, config, property_key(f.side, prop))
    single = prop in ('normalized_zero', 'normalized_one')
    return _run(subject, draws, config, single=single)


def check_properties(f: RiskFunctional, props: Optional[Iterable[str]] = None,
                     config: Optional[SamplerConfig] = None) -> PropertyReport:
    config = config or SamplerConfig()
    report = PropertyReport()
    for prop in (props or PROPERTIES):
        report.add(check_property(f, prop, config))
    return report


def replay(f: RiskFunctional, prop: str, counterexample: Counterexample) -> float:
    """Recompute the margin of a stored counterexample"""
    subject = _Subject(f, prop)
    lhs, rhs = _evaluate(subject, Draw.from_dict(counterexample.inputs))
    return _gap(lhs, rhs, prop in EQUALITY)


def inequality_result(name: str, lhs: float, rhs: float, config: Optional[SamplerConfig] = None,
                      inputs: Optional[Dict[str, Any]] = None) -> PropertyResult:
    """Verdict for a single deterministic inequality lhs <= rhs"""
    config = config or SamplerConfig()
    margin = _gap(lhs, rhs, equality=False)
    if margin <= config.tolerance:
        return PropertyResult(name, True, 1, config.tolerance, margin)
    cx = Counterexample(inputs or {}, lhs, rhs, margin, 0, margin > config.confirm_margin)
    return PropertyResult(name, False, 1, config.tolerance, margin, cx)


def grid_result(name: str, margins: List[Tuple[float, Dict[str, Any], float, float]],
                tolerance: float, confirm_margin: Optional[float] = None) -> PropertyResult:
    """
    Verdict from precomputed (margin, inputs, lhs, rhs) rows; the first max-margin row wins
    """
    confirm_margin = get_settings().confirm_margin if confirm_margin is None else confirm_margin
    if not margins:
        return PropertyResult(name, True, 0, tolerance, 0.0)
    k = max(range(len(margins)), key=lambda i: (margins[i][0], -i))
    margin, inputs, lhs, rhs = margins[k]
    if margin <= tolerance:
        return PropertyResult(name, True, len(margins), tolerance, margin)
    cx = Counterexample(inputs, lhs, rhs, margin, k, margin > confirm_margin)
    return PropertyResult(name, False, len(margins), tolerance, margin, cx)


def margin_of(lhs: float, rhs: float, equality: bool = False) -> float:
    return _gap(lhs, rhs, equality)
