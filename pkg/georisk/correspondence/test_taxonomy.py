"""
Taxonomy flags, bridge agreement and the separating instances
"""

import math

import numpy as np
import pytest

from georisk.correspondence import (
    BRIDGES,
    FLAGS,
    MONETARY,
    RETURN,
    RiskFunctional,
    SamplerConfig,
    bridge_equivalences,
    classify,
    counterexamples_confirmed,
    fit_ph_kink,
    qlc_counterexamples,
    to_monetary,
    to_return,
)
from georisk.correspondence.counterexamples import EXPECTED_VERDICTS
from georisk.errors import InvalidInputError
from georisk.measures import avar, build_measure, builtin_catalog, entropic, h0_premium
from georisk.prob_core import ProbSpace, Scenario, ScenarioSet

CONFIG = SamplerConfig(n_samples=100, seed=3)


@pytest.fixture
def space3():
    return ProbSpace.uniform(3)


def test_avar_is_classified_coherent(space3):
    result = classify(RiskFunctional(lambda z: avar(z, 0.5), MONETARY, space3, name='avar'), CONFIG)
    assert set(result.flags) == set(FLAGS)
    for flag in ('monetary', 'coherent', 'convex', 'quasi_convex', 'cash_subadditive',
                 'cash_superadditive', 'law_invariant'):
        assert result[flag], flag
    assert not result.repairs


def test_entropic_is_convex_but_not_coherent(space3):
    result = classify(RiskFunctional(lambda z: entropic(z, 2.0), MONETARY, space3, name='entropic'), CONFIG)
    assert result['convex']
    assert not result['coherent']
    assert not result.report.holds('positively_homogeneous')


def test_h0_flags(space3):
    result = classify(RiskFunctional(h0_premium, RETURN, space3, name='h0'), CONFIG)
    assert result['return']
    assert result['logconvex']
    assert result['quasi_logconvex']
    assert not result['quasi_convex']
    assert result.to_dict()['flags'] == result.flags


@pytest.mark.parametrize('rho', [
    lambda z: avar(z, 0.25),
    lambda z: entropic(z, 1.0),
])
def test_bridges_agree(space3, rho):
    f = RiskFunctional(rho, MONETARY, space3)
    report = bridge_equivalences(f, to_return(f), CONFIG)
    assert len(report.results) == len(BRIDGES)
    assert report.all_hold, [n for n, r in report.results.items() if not r.holds]


def test_bridges_need_both_sides(space3):
    f = RiskFunctional(lambda z: avar(z, 0.5), MONETARY, space3)
    with pytest.raises(InvalidInputError):
        bridge_equivalences(to_return(f), f, CONFIG)


@pytest.mark.slow
def test_bridges_agree_across_the_catalog(space3):
    qs = ScenarioSet.of(Scenario.reference(space3), Scenario(space3, np.array([0.5, 1.0, 1.5])))
    config = SamplerConfig(n_samples=500, seed=1)
    for spec in builtin_catalog(qs):
        native = build_measure(spec, space3, qs)
        if native.side == MONETARY:
            rho, trho = native, to_return(native)
        else:
            rho, trho = to_monetary(native), native
        assert bridge_equivalences(rho, trho, config).all_hold, spec.label()


def test_fit_ph_kink_recovers_slopes():
    t = np.linspace(-1.0, 1.0, 21)
    values = 2.0 * np.maximum(t, 0.0) - 0.5 * np.maximum(-t, 0.0)
    d_plus, d_minus, residual = fit_ph_kink(t, values)
    assert d_plus == pytest.approx(2.0)
    assert d_minus == pytest.approx(0.5)
    assert residual < 1e-12
    with pytest.raises(InvalidInputError):
        fit_ph_kink([0.0], [0.0])


def test_separating_instances():
    report = qlc_counterexamples(CONFIG)
    values = report.values
    mix = math.exp(0.5 * math.log((1 + math.exp(2.0)) / 2) + 0.5 * math.log((math.exp(3.0) + math.exp(2.0)) / 2))
    assert values['logcoherent.arithmetic_mix'] == pytest.approx(mix, abs=1e-9)
    assert values['logcoherent.arithmetic_mix'] > math.exp(2.0)
    assert values['logcoherent.X'] == pytest.approx(math.exp(1.5))
    assert values['mean_value.X'] == pytest.approx(math.exp(2.0), abs=1e-9)
    assert values['mean_value.scaled_X'] == pytest.approx(math.exp((math.sqrt(11.0) - 1) / 2), abs=1e-9)
    for name, expected in EXPECTED_VERDICTS.items():
        assert report.holds(name) == expected, name
    assert counterexamples_confirmed(report)
