"""
Measure specifications: the closed description of a risk measure shared by
the library, the bridge suite and the CLI.

JSON form::

    {"family": "arar", "params": {"alpha": 0.5}, "side": "return"}

Scenario parameters refer to the scenario set passed to build_measure by
position (density column d1 is index 0); "P" denotes the reference measure.
"""

import logging
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from georisk.correspondence.functional import MONETARY, RETURN, SIDES, RiskFunctional, to_monetary, to_return
from georisk.errors import IngestError, InvalidInputError
from georisk.measures import zoo
from georisk.measures.kernels import LossKernel
from georisk.measures.orlicz import OrliczFunction, orlicz_premium
from georisk.prob_core import ProbSpace, Scenario, ScenarioSet

logger = logging.getLogger(__name__)

NATIVE_SIDE = {
    'var': MONETARY,
    'avar': MONETARY,
    'expectation': MONETARY,
    'entropic': MONETARY,
    'hg': MONETARY,
    'arar': RETURN,
    'pnorm': RETURN,
    'robust_pnorm': RETURN,
    'robust_discounted_pnorm': RETURN,
    'orlicz': RETURN,
    'h0': RETURN,
    'logconvex': RETURN,
    'mean_value': RETURN,
    'dual': RETURN,
}

FAMILIES = tuple(NATIVE_SIDE)


class MeasureSpec(BaseModel):
    family: str
    params: Dict[str, Any] = Field(default_factory=dict)
    side: str = RETURN

    @field_validator('family')
    @classmethod
    def _known_family(cls, value):
        if value not in NATIVE_SIDE:
            raise ValueError(f"unknown family '{value}', expected one of {FAMILIES}")
        return value

    @field_validator('side')
    @classmethod
    def _known_side(cls, value):
        if value not in SIDES:
            raise ValueError(f"side must be one of {SIDES}")
        return value

    @model_validator(mode='after')
    def _check_ranges(self):
        p = self.params
        if self.family == 'var' and not 0.0 < float(p.get('alpha', -1)) < 1.0:
            raise ValueError("var needs alpha in (0,1)")
        if self.family in ('avar', 'arar') and not 0.0 <= float(p.get('alpha', -1)) < 1.0:
            raise ValueError(f"{self.family} needs alpha in [0,1)")
        if self.family in ('pnorm', 'robust_pnorm', 'robust_discounted_pnorm', 'entropic'):
            if not float(p.get('gamma', 0)) > 0:
                raise ValueError(f"{self.family} needs gamma > 0")
        penalty = p.get('penalty')
        if penalty is not None:
            if any(float(c) < 0 for c in penalty):
                raise ValueError("penalty values must be nonnegative")
            if p.get('normalized') and min(float(c) for c in penalty) != 0.0:
                raise ValueError("a normalized measure needs inf_Q c(Q) = 0")
        if self.family == 'robust_discounted_pnorm' and penalty is None:
            raise ValueError("robust_discounted_pnorm needs a penalty")
        if self.family in ('orlicz', 'hg') and 'phi' not in p:
            raise ValueError(f"{self.family} needs an Orlicz function 'phi'")
        if self.family == 'dual' and 'r' not in p:
            raise ValueError("dual needs an R-functional 'r'")
        return self

    @property
    def native_side(self) -> str:
        return NATIVE_SIDE[self.family]

    def on_side(self, side: str) -> 'MeasureSpec':
        return self.model_copy(update={'side': side})

    def label(self) -> str:
        keys = ','.join(f"{k}={v}" for k, v in sorted(self.params.items()) if not isinstance(v, (dict, list)))
        return f"{self.family}({keys})" if keys else self.family


def load_measure_spec(data: Dict[str, Any]) -> MeasureSpec:
    """Validate a parsed JSON spec, mapping validation failures to IngestError"""
    try:
        return MeasureSpec(**{k: v for k, v in data.items() if k in ('family', 'params', 'side')})
    except Exception as e:
        raise IngestError(f"invalid measure spec: {e}", column='measure') from e


def _resolve_one(ref, space: ProbSpace, scenarios: Optional[ScenarioSet]) -> Scenario:
    if ref is None or ref == 'P':
        return Scenario.reference(space)
    if scenarios is None:
        raise InvalidInputError(f"scenario {ref} requested but no scenario set was supplied")
    try:
        return scenarios[int(ref)]
    except (IndexError, ValueError, TypeError) as e:
        raise InvalidInputError(f"scenario reference {ref!r} out of range ({len(scenarios)} scenarios)") from e


def _resolve_set(ref, space: ProbSpace, scenarios: Optional[ScenarioSet]) -> ScenarioSet:
    if ref is None or ref == 'all':
        return scenarios if scenarios is not None else ScenarioSet.of(Scenario.reference(space))
    if ref == 'P':
        return ScenarioSet.of(Scenario.reference(space))
    return ScenarioSet(tuple(_resolve_one(r, space, scenarios) for r in ref))


def _native(spec: MeasureSpec, space: ProbSpace, scenarios: Optional[ScenarioSet]):
    p = spec.params
    family = spec.family
    if family == 'var':
        return lambda x: zoo.var(x, float(p['alpha']))
    if family == 'avar':
        return lambda x: zoo.avar(x, float(p['alpha']))
    if family == 'expectation':
        q = _resolve_one(p.get('scenario'), space, scenarios)
        return lambda x: zoo.expectation(x, q)
    if family == 'entropic':
        q = _resolve_one(p.get('scenario'), space, scenarios)
        return lambda x: zoo.entropic(x, float(p['gamma']), q)
    if family == 'hg':
        phi = OrliczFunction.from_dict(p['phi'])
        return lambda x: zoo.hg_premium(x, phi)
    if family == 'arar':
        return lambda x: zoo.arar(x, float(p['alpha']))
    if family == 'pnorm':
        q = _resolve_one(p.get('scenario'), space, scenarios)
        return lambda x: zoo.pnorm(x, float(p['gamma']), q)
    if family == 'robust_pnorm':
        qs = _resolve_set(p.get('scenarios'), space, scenarios)
        return lambda x: zoo.robust_pnorm(x, float(p['gamma']), qs)
    if family == 'robust_discounted_pnorm':
        qs = _resolve_set(p.get('scenarios'), space, scenarios)
        return lambda x: zoo.robust_discounted_pnorm(x, float(p['gamma']), qs, p['penalty'])
    if family == 'orlicz':
        phi = OrliczFunction.from_dict(p['phi'])
        q = _resolve_one(p.get('scenario'), space, scenarios)
        return lambda x: orlicz_premium(x, phi, q)
    if family == 'h0':
        q = _resolve_one(p.get('scenario'), space, scenarios)
        return lambda x: zoo.h0_premium(x, q)
    if family == 'logconvex':
        qs = _resolve_set(p.get('scenarios'), space, scenarios)
        return lambda x: zoo.logconvex_eval(x, qs, p.get('penalty'))
    if family == 'mean_value':
        qs = _resolve_set(p.get('scenarios'), space, scenarios)
        ell = LossKernel.from_dict(p.get('ell', {'tag': 'linear_quadratic'}))
        return lambda x: zoo.mean_value_ce(x, ell, qs)
    from georisk.duality import dual_eval

    m = build_dual_measure(spec, space, scenarios)
    return lambda x: dual_eval(m, x)


def build_dual_measure(spec: MeasureSpec, space: ProbSpace, scenarios: Optional[ScenarioSet] = None):
    """DualMeasure of a 'dual' spec, with the scenario set augmented by midpoints when requested"""
    if spec.family != 'dual':
        raise InvalidInputError(f"expected a dual measure spec, got family '{spec.family}'")
    # imported here, duality builds on this module
    from georisk.duality import DualMeasure, RFunctional

    p = spec.params
    qs = _resolve_set(p.get('scenarios'), space, scenarios)
    m = DualMeasure(RFunctional.from_json(p['r']), qs)
    if p.get('midpoints'):
        m = m.with_midpoints()
    return m


def build_measure(spec: MeasureSpec, space: ProbSpace, scenarios: Optional[ScenarioSet] = None) -> RiskFunctional:
    """
    Build the functional described by spec on the requested side

    Args:
        spec: measure description
        space: probability space
        scenarios: scenario set that scenario indices refer to

    Returns:
        RiskFunctional: native functional, or its image under to_return / to_monetary
    """
    if scenarios is not None and not scenarios.space.same_as(space):
        raise InvalidInputError("scenario set lives on a different space")
    native = RiskFunctional(_native(spec, space, scenarios), spec.native_side, space,
                            name=spec.label(), spec=spec.on_side(spec.native_side))
    if spec.side == native.side:
        return native
    logger.debug(f"Building {spec.label()} on the {spec.side} side from its {native.side} form")
    f = to_return(native) if spec.side == RETURN else to_monetary(native)
    return RiskFunctional(f.evaluate, f.side, space, name=f"{spec.label()}[{spec.side}]", spec=spec)


def builtin_catalog(scenarios: Optional[ScenarioSet] = None) -> List[MeasureSpec]:
    """
    Built-in specs on their native sides, used by the bridge suite

    Penalized families use one penalty per scenario with the first one zero.
    """
    k = 1 if scenarios is None else len(scenarios)
    penalty = [0.0] + [0.25 * (i + 1) for i in range(k - 1)]
    every = 'all'
    specs = [
        MeasureSpec(family='var', params={'alpha': 0.5}, side=MONETARY),
        MeasureSpec(family='var', params={'alpha': 0.9}, side=MONETARY),
        MeasureSpec(family='avar', params={'alpha': 0.5}, side=MONETARY),
        MeasureSpec(family='avar', params={'alpha': 0.9}, side=MONETARY),
        MeasureSpec(family='expectation', side=MONETARY),
        MeasureSpec(family='entropic', params={'gamma': 1.0}, side=MONETARY),
        MeasureSpec(family='arar', params={'alpha': 0.5}),
        MeasureSpec(family='pnorm', params={'gamma': 2.0}),
        MeasureSpec(family='pnorm', params={'gamma': 0.5}),
        MeasureSpec(family='robust_pnorm', params={'gamma': 1.5, 'scenarios': every}),
        MeasureSpec(family='robust_discounted_pnorm', params={'gamma': 1.0, 'scenarios': every, 'penalty': penalty}),
        MeasureSpec(family='orlicz', params={'phi': {'tag': 'power', 'p': 2.0, 'alpha': 0.0}}),
        MeasureSpec(family='orlicz', params={'phi': {'tag': 'linear', 'alpha': 0.25}}),
        MeasureSpec(family='h0', params={'scenario': 'P'}),
        MeasureSpec(family='logconvex', params={'scenarios': every}),
        MeasureSpec(family='logconvex', params={'scenarios': every, 'penalty': penalty, 'normalized': True}),
        MeasureSpec(family='mean_value', params={'scenarios': every, 'ell': {'tag': 'linear_quadratic'}}),
        MeasureSpec(family='mean_value', params={'scenarios': every, 'ell': {'tag': 'exponential'}}),
        MeasureSpec(family='dual', params={'scenarios': every, 'r': {'family': 'floor', 'C': 0.5}}),
        MeasureSpec(family='dual', params={'scenarios': every, 'r': {'family': 'log_floor', 'a': 0.5}}),
        MeasureSpec(family='dual', params={'scenarios': every,
                                           'r': {'family': 'supq_penalty', 'c': penalty, 'kappa': 1.0}}),
    ]
    return specs
