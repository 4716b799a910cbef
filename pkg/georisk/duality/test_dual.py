"""
Dual measures, their closed forms and the law-invariant representation
"""

import math

import numpy as np
import pytest

from georisk.duality import (
    DualMeasure,
    RFunctional,
    arar_mixing_measure,
    arar_mixture_eval,
    arar_mixture_integral,
    dual_eval,
    dual_eval_building_block,
    dual_eval_with_argmax,
    floor_closed_form,
    law_equivalent_dual_sup,
    law_invariant_dual_eval,
    log_floor_closed_form,
    logconvex_closed_form,
    supq_discounted_premia,
)
from georisk.errors import DomainError, InvalidInputError, NotEquiprobableError
from georisk.measures import LossKernel, h0_premium, mean_value_ce
from georisk.prob_core import Position, PositivePosition, ProbSpace, Scenario, ScenarioSet, comonotone_integral

R_CASES = [
    RFunctional('coherent'),
    RFunctional('convex_penalty', penalty=(0.0, 0.4, 1.1)),
    RFunctional('supq_penalty', penalty=(0.0, 0.2, 0.3), kappa=2.0),
    RFunctional('floor', level=0.5),
    RFunctional('log_floor', level=0.3),
    RFunctional('mean_value'),
    RFunctional('ph_kink', d_plus=2.0, d_minus=0.5),
    RFunctional('user_table', table=((-5.0, -6.0), (0.0, 0.0), (5.0, 4.0))),
]


@pytest.fixture
def space3():
    return ProbSpace.uniform(3)


@pytest.fixture
def three_scenarios(space3, rng):
    densities = [np.ones(3)] + [rng.uniform(0.2, 1.8, 3) for _ in range(2)]
    return ScenarioSet(tuple(Scenario(space3, d / d.mean()) for d in densities))


def _positions(space, rng, count=15):
    return [PositivePosition(space, np.exp(rng.normal(scale=1.5, size=space.n))) for _ in range(count)]


@pytest.mark.parametrize('r', R_CASES, ids=lambda r: r.family)
def test_dual_eval_matches_building_block(r, space3, three_scenarios, rng):
    m = DualMeasure(r, three_scenarios)
    for x in _positions(space3, rng):
        assert dual_eval(m, x) == pytest.approx(dual_eval_building_block(m, x), rel=1e-12)


def test_coherent_dual_is_sup_of_h0(x_example, two_scenarios):
    m = DualMeasure(RFunctional('coherent'), two_scenarios)
    value, k = dual_eval_with_argmax(m, x_example)
    assert value == pytest.approx(max(h0_premium(x_example, q) for q in two_scenarios))
    # d1 tilts toward the e^3 atom
    assert k == 0


def test_argmax_takes_the_lowest_tied_index(two_atoms):
    qs = ScenarioSet.of(Scenario.reference(two_atoms), Scenario.reference(two_atoms))
    _, k = dual_eval_with_argmax(DualMeasure(RFunctional('coherent'), qs), PositivePosition(two_atoms, [1.0, 2.0]))
    assert k == 0


def test_closed_forms(space3, three_scenarios, rng):
    logconvex = RFunctional('convex_penalty', penalty=(0.0, 0.4, 1.1))
    supq = RFunctional('supq_penalty', penalty=(0.0, 0.2, 0.3), kappa=2.0)
    for x in _positions(space3, rng):
        assert dual_eval(DualMeasure(logconvex, three_scenarios), x) == \
            pytest.approx(logconvex_closed_form(x, logconvex.penalty, three_scenarios), rel=1e-12)
        assert dual_eval(DualMeasure(RFunctional('floor', level=0.5), three_scenarios), x) == \
            pytest.approx(floor_closed_form(x, 0.5, three_scenarios), rel=1e-12)
        assert dual_eval(DualMeasure(RFunctional('log_floor', level=0.3), three_scenarios), x) == \
            pytest.approx(log_floor_closed_form(x, 0.3, three_scenarios), rel=1e-12)
        assert dual_eval(DualMeasure(supq, three_scenarios), x) == \
            pytest.approx(supq_discounted_premia(x, supq, three_scenarios), rel=1e-12)


def test_mean_value_dual_applies_the_kernel_to_the_log_mean(x_example, two_scenarios):
    ell = LossKernel('linear_quadratic')
    m = DualMeasure(RFunctional('mean_value', kernel=ell), two_scenarios)
    by_hand = max(math.exp(float(ell(math.fsum(q.weights * np.log(x_example.values))))) for q in two_scenarios)
    assert dual_eval(m, x_example) == pytest.approx(by_hand, rel=1e-12)
    # exp(l(E log X)) rather than exp(l^{-1}(E l(log X)))
    assert dual_eval(m, x_example) != pytest.approx(mean_value_ce(x_example, ell, two_scenarios))


def test_supq_at_the_floor_of_zero():
    r = RFunctional('supq_penalty', penalty=(0.25,), kappa=1.0)
    assert r.value(-math.inf) == -(0.25 + 0.5)
    assert r.multiplicative(0.0) == pytest.approx(math.exp(-0.75))


def test_dual_needs_positive_positions(two_scenarios, two_atoms):
    m = DualMeasure(RFunctional('coherent'), two_scenarios)
    with pytest.raises(DomainError):
        dual_eval(m, Position(two_atoms, [-1.0, 1.0]))


def test_penalty_count_must_match(two_scenarios):
    with pytest.raises(InvalidInputError):
        DualMeasure(RFunctional('convex_penalty', penalty=(0.0,)), two_scenarios)


@pytest.mark.parametrize('kwargs', [
    {'family': 'exotic'},
    {'family': 'convex_penalty'},
    {'family': 'convex_penalty', 'penalty': (-0.1,)},
    {'family': 'floor'},
    {'family': 'log_floor', 'level': 1.5},
    {'family': 'ph_kink', 'd_plus': -1.0},
    {'family': 'user_table', 'table': ((0.0, 1.0), (1.0, 0.0))},
])
def test_r_functional_validation(kwargs):
    with pytest.raises(InvalidInputError):
        RFunctional(**kwargs)


def test_r_functional_json():
    r = RFunctional('supq_penalty', penalty=(0.0, 0.5), kappa=0.75)
    assert r.to_json() == {'family': 'supq_penalty', 'c': [0.0, 0.5], 'kappa': 0.75}
    assert RFunctional.from_json(r.to_json()) == r
    assert RFunctional.from_json({'family': 'log_floor', 'a': 0.2}).level == 0.2


def test_midpoints_average_penalties(two_scenarios):
    m = DualMeasure(RFunctional('convex_penalty', penalty=(0.0, 1.0)), two_scenarios).with_midpoints()
    assert len(m.qs) == 3
    assert m.r.penalty == (0.0, 1.0, 0.5)


def test_law_invariant_form_matches_permutation_sup(space3, three_scenarios, rng):
    m = DualMeasure(RFunctional('floor', level=-0.5), three_scenarios)
    for x in _positions(space3, rng):
        assert law_invariant_dual_eval(m, x) == pytest.approx(law_equivalent_dual_sup(m, x), rel=1e-10)
        assert arar_mixture_eval(m, x) == pytest.approx(law_invariant_dual_eval(m, x), rel=1e-9)


def test_law_invariance_needs_consistent_penalties(two_atoms, tilted):
    swapped = Scenario(two_atoms, np.array([1.2, 0.8]))
    qs = ScenarioSet.of(tilted, swapped)
    ok = DualMeasure(RFunctional('convex_penalty', penalty=(0.3, 0.3)), qs)
    law_invariant_dual_eval(ok, PositivePosition(two_atoms, [1.0, 2.0]))
    bad = DualMeasure(RFunctional('convex_penalty', penalty=(0.0, 0.3)), qs)
    with pytest.raises(InvalidInputError):
        law_invariant_dual_eval(bad, PositivePosition(two_atoms, [1.0, 2.0]))


def test_law_invariance_needs_equiprobable_atoms():
    space = ProbSpace(('a', 'b'), np.array([0.25, 0.75]))
    m = DualMeasure(RFunctional('coherent'), ScenarioSet.of(Scenario.reference(space)))
    with pytest.raises(NotEquiprobableError):
        law_invariant_dual_eval(m, PositivePosition(space, [1.0, 2.0]))


def test_arar_mixing_measure(space3, three_scenarios, rng):
    for q in three_scenarios:
        levels, masses = arar_mixing_measure(q)
        assert math.fsum(masses) == pytest.approx(1.0, abs=1e-10)
        assert np.all(masses > 0)
        assert np.all((levels >= 0) & (levels < 1))
        for x in _positions(space3, rng, count=5):
            assert arar_mixture_integral(x, q) == pytest.approx(comonotone_integral(x.log(), q), abs=1e-9)


def test_reference_scenario_mixes_only_at_zero(two_atoms):
    levels, masses = arar_mixing_measure(Scenario.reference(two_atoms))
    assert levels.tolist() == [0.0]
    assert masses.tolist() == [1.0]
