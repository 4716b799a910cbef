"""
Measure specs, the spec builder and loss kernels
"""

import math

import numpy as np
import pytest

from georisk.correspondence import MONETARY, RETURN
from georisk.errors import BracketError, IngestError, InvalidInputError
from georisk.measures import (
    FAMILIES,
    LossKernel,
    MeasureSpec,
    build_dual_measure,
    build_measure,
    builtin_catalog,
    h0_premium,
    load_measure_spec,
)
from georisk.prob_core import PositivePosition, ProbSpace, Scenario, ScenarioSet


def test_unknown_family_is_an_ingest_error():
    with pytest.raises(IngestError, match="measure"):
        load_measure_spec({'family': 'nope'})


@pytest.mark.parametrize('data', [
    {'family': 'var', 'params': {'alpha': 1.0}, 'side': 'monetary'},
    {'family': 'pnorm', 'params': {'gamma': 0.0}},
    {'family': 'logconvex', 'params': {'penalty': [0.2, 0.5], 'normalized': True}},
    {'family': 'orlicz', 'params': {}},
    {'family': 'dual', 'params': {}},
    {'family': 'h0', 'side': 'sideways'},
])
def test_parameter_ranges(data):
    with pytest.raises(IngestError):
        load_measure_spec(data)


def test_h0_spec_reproduces_closed_form(x_example):
    f = build_measure(MeasureSpec(family='h0', params={'scenario': 'P'}), x_example.space)
    assert f.side == RETURN
    assert f(x_example) == pytest.approx(math.exp(1.5), rel=1e-14)


def test_scenario_indices_refer_to_density_columns(x_example, two_scenarios):
    spec = MeasureSpec(family='h0', params={'scenario': 1})
    f = build_measure(spec, x_example.space, two_scenarios)
    assert f(x_example) == pytest.approx(h0_premium(x_example, two_scenarios[1]))
    with pytest.raises(InvalidInputError, match="out of range"):
        build_measure(MeasureSpec(family='h0', params={'scenario': 5}), x_example.space, two_scenarios)


def test_other_side_goes_through_the_correspondence(x_example):
    spec = MeasureSpec(family='avar', params={'alpha': 0.5}, side=RETURN)
    f = build_measure(spec, x_example.space)
    assert f.side == RETURN
    arar = build_measure(MeasureSpec(family='arar', params={'alpha': 0.5}), x_example.space)
    assert f(x_example) == pytest.approx(arar(x_example), rel=1e-12)
    back = build_measure(MeasureSpec(family='arar', params={'alpha': 0.5}, side=MONETARY), x_example.space)
    assert back.side == MONETARY
    assert back(x_example.log()) == pytest.approx(3.0, rel=1e-12)


def test_dual_spec_builds_a_dual_measure(x_example, two_scenarios):
    spec = MeasureSpec(family='dual', params={'scenarios': 'all', 'r': {'family': 'coherent'}, 'midpoints': True})
    m = build_dual_measure(spec, x_example.space, two_scenarios)
    assert len(m.qs) == 3
    f = build_measure(spec, x_example.space, two_scenarios)
    assert f(x_example) == pytest.approx(max(h0_premium(x_example, q) for q in m.qs), rel=1e-12)
    with pytest.raises(InvalidInputError):
        build_dual_measure(MeasureSpec(family='h0'), x_example.space)


def test_builtin_catalog_builds_on_every_side(rng):
    space = ProbSpace.uniform(3)
    qs = ScenarioSet.of(Scenario.reference(space), Scenario(space, np.array([0.5, 1.0, 1.5])))
    x = PositivePosition(space, np.exp(rng.normal(size=3)))
    specs = builtin_catalog(qs)
    assert {s.family for s in specs} <= set(FAMILIES)
    for spec in specs:
        for side in (MONETARY, RETURN):
            f = build_measure(spec.on_side(side), space, qs)
            value = f(x if side == RETURN else x.log())
            assert math.isfinite(value), spec.label()


@pytest.mark.parametrize('tag', ['identity', 'linear_quadratic', 'exponential'])
def test_kernel_inverse(tag):
    ell = LossKernel(tag)
    for y in (-0.9, 0.0, 0.5, 6.0, 40.0):
        assert float(ell(ell.inverse(y))) == pytest.approx(y, abs=1e-9)
    assert ell.inverse(6.0) == pytest.approx({'identity': 6.0, 'linear_quadratic': 2.0,
                                              'exponential': math.log(7.0)}[tag], abs=1e-11)


def test_kernel_table():
    ell = LossKernel('user_table', table=((-2.0, -2.0), (0.0, 0.0), (1.0, 2.0), (2.0, 6.0)))
    assert ell.inverse(4.0) == pytest.approx(1.5, abs=1e-11)
    with pytest.raises(BracketError):
        ell.inverse(10.0)
    with pytest.raises(InvalidInputError, match="convex"):
        LossKernel('user_table', table=((-1.0, -2.0), (0.0, 0.0), (1.0, 1.0)))
    with pytest.raises(InvalidInputError, match="origin"):
        LossKernel('user_table', table=((-1.0, -1.0), (0.0, 0.5), (1.0, 2.0)))
