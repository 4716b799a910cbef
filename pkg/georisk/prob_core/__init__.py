"""
Finite probability substrate: spaces, positions, scenarios and quantiles
"""

from georisk.prob_core.space import (
    ProbSpace,
    Position,
    PositivePosition,
    Scenario,
    ScenarioSet,
    check_same_space,
)
from georisk.prob_core.quantiles import (
    expect,
    quantile,
    quantile_steps,
    tail_integral,
    comonotone_integral,
    law_equivalent_sup,
)

__all__ = [
    'ProbSpace',
    'Position',
    'PositivePosition',
    'Scenario',
    'ScenarioSet',
    'check_same_space',
    'expect',
    'quantile',
    'quantile_steps',
    'tail_integral',
    'comonotone_integral',
    'law_equivalent_sup',
]
