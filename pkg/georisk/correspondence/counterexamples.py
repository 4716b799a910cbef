"""
Two hard-coded instances separating quasi-logconvexity from quasi-convexity.

Both live on two equiprobable atoms with X = (1, e^3), Y = e^2 and mixing
weight 1/2:

    logcoherent  rho(X) = exp(E[log X])
    mean value   rho(X) = exp(l^{-1}(E[l(log X)])),  l(x) = x for x < 0, x^2 + x otherwise
"""

import math
import logging
from typing import Dict, Optional

import numpy as np

from georisk.correspondence.checkers import PropertyReport, SamplerConfig, inequality_result
from georisk.measures.kernels import LossKernel
from georisk.measures.zoo import logconvex_eval, mean_value_ce
from georisk.prob_core import Position, ProbSpace, Scenario, ScenarioSet

logger = logging.getLogger(__name__)

MIX = 0.5
SCALE = math.exp(-1.0)

# verdict each entry must reach for the instances to separate the classes
EXPECTED_VERDICTS = {
    'quasi_convex[logcoherent]': False,
    'quasi_logconvex[logcoherent]': True,
    'quasi_convex[mean_value]': False,
    'quasi_logconvex[mean_value]': True,
    'positively_homogeneous[mean_value]': False,
}


def counterexample_instance():
    """(space, scenario set {uniform}, X, Y)"""
    space = ProbSpace.uniform(2)
    qs = ScenarioSet.of(Scenario.reference(space))
    x = Position(space, np.array([1.0, math.exp(3.0)]))
    y = Position.constant(space, math.exp(2.0))
    return space, qs, x, y


def qlc_counterexamples(config: Optional[SamplerConfig] = None) -> PropertyReport:
    """
    Evaluate both instances and report each inequality with its margin.

    quasi_convex entries fail (the mixture is riskier than both inputs),
    quasi_logconvex entries hold, and the mean-value measure fails
    rho(lambda X) <= lambda rho(X) at lambda = 1/e.
    """
    config = config or SamplerConfig()
    space, qs, x, y = counterexample_instance()
    arith = x.with_values(MIX * x.values + (1 - MIX) * y.values)
    geo = x.with_values(x.values ** MIX * y.values ** (1 - MIX))
    scaled = x.with_values(SCALE * x.values)

    def logcoherent(z: Position) -> float:
        return logconvex_eval(z, qs)

    ell = LossKernel('linear_quadratic')

    def mean_value(z: Position) -> float:
        return mean_value_ce(z, ell, qs)

    values: Dict[str, float] = {
        'logcoherent.X': logcoherent(x),
        'logcoherent.Y': logcoherent(y),
        'logcoherent.arithmetic_mix': logcoherent(arith),
        'logcoherent.geometric_mix': logcoherent(geo),
        'mean_value.X': mean_value(x),
        'mean_value.Y': mean_value(y),
        'mean_value.arithmetic_mix': mean_value(arith),
        'mean_value.geometric_mix': mean_value(geo),
        'mean_value.scaled_X': mean_value(scaled),
        'mean_value.lambda_times_X': SCALE * mean_value(x),
    }
    level_lc = max(values['logcoherent.X'], values['logcoherent.Y'])
    level_mv = max(values['mean_value.X'], values['mean_value.Y'])
    inputs = {'X': x.values.tolist(), 'Y': y.values.tolist(), 'alpha': MIX, 'lambda': SCALE}

    report = PropertyReport(values=values)
    report.add(inequality_result('quasi_convex[logcoherent]',
                                 values['logcoherent.arithmetic_mix'], level_lc, config, inputs))
    report.add(inequality_result('quasi_logconvex[logcoherent]',
                                 values['logcoherent.geometric_mix'], level_lc, config, inputs))
    report.add(inequality_result('quasi_convex[mean_value]',
                                 values['mean_value.arithmetic_mix'], level_mv, config, inputs))
    report.add(inequality_result('quasi_logconvex[mean_value]',
                                 values['mean_value.geometric_mix'], level_mv, config, inputs))
    report.add(inequality_result('positively_homogeneous[mean_value]',
                                 values['mean_value.scaled_X'], values['mean_value.lambda_times_X'], config, inputs))

    for name, result in report.results.items():
        mark = '✓' if result.holds == EXPECTED_VERDICTS[name] else '✗'
        logger.info(f"{mark} {name}: holds={result.holds}, margin={result.max_margin:.6g}")
    return report


def counterexamples_confirmed(report: PropertyReport) -> bool:
    """True when every entry reaches its expected verdict and every failure is confirmed"""
    for name, expected in EXPECTED_VERDICTS.items():
        result = report[name]
        if result.holds != expected:
            return False
        if not result.holds and not result.counterexample.confirmed:
            return False
    return True
