"""
Recovery of R from a return risk measure and grid checks on R
"""

import math

import numpy as np
import pytest

from georisk.correspondence import MONETARY, RETURN, RiskFunctional
from georisk.duality import (
    DualMeasure,
    RecoveryConfig,
    RFunctional,
    check_expansive,
    check_translation_invariant_in_t,
    dense_grid_oracle_r,
    recover_r,
)
from georisk.errors import InfeasibleError, InvalidInputError
from georisk.measures import avar, pnorm
from georisk.prob_core import ProbSpace, Scenario, ScenarioSet

T_LEVELS = (-2.0, -0.5, 0.0, 0.75, 2.0)


@pytest.fixture
def pnorm_one(two_atoms):
    return RiskFunctional(lambda x: pnorm(x, 1.0), RETURN, two_atoms, name='pnorm1')


def _relative_entropy(q):
    return math.fsum(q.weights * np.log(q.density))


@pytest.mark.parametrize('t', T_LEVELS)
def test_recovers_the_entropy_shifted_identity(pnorm_one, tilted, t):
    # log E[X] over E_Q[log X] >= t is minimized at X proportional to dQ/dP
    assert recover_r(pnorm_one, tilted, t) == pytest.approx(t - _relative_entropy(tilted), abs=1e-8)


def test_reference_scenario_gives_the_identity(pnorm_one, two_atoms):
    assert recover_r(pnorm_one, Scenario.reference(two_atoms), 0.3) == pytest.approx(0.3, abs=1e-8)


@pytest.mark.slow
@pytest.mark.parametrize('t', T_LEVELS)
def test_matches_the_dense_grid_oracle(pnorm_one, tilted, t):
    recovered = recover_r(pnorm_one, tilted, t)
    oracle = dense_grid_oracle_r(pnorm_one, tilted, t)
    assert recovered <= oracle + 1e-9
    assert oracle - recovered < 1e-5


def test_recovered_r_bounds_the_dual_r_from_above(two_scenarios):
    r = RFunctional('convex_penalty', penalty=(0.0, 0.6))
    f = DualMeasure(r, two_scenarios).as_functional()
    config = RecoveryConfig(starts=4, seed=5)
    for t in T_LEVELS:
        for k, q in enumerate(two_scenarios):
            assert recover_r(f, q, t, config) >= r.value(t, k) - 1e-9


DUAL_FAMILIES = [
    RFunctional('coherent'),
    RFunctional('convex_penalty', penalty=(0.0, 0.6)),
    RFunctional('floor', level=0.0),
]
T_GRID = np.linspace(-2.0, 2.0, 21)


@pytest.mark.parametrize('r', DUAL_FAMILIES, ids=lambda r: r.family)
@pytest.mark.parametrize('k', [0, 1])
def test_recovery_reproduces_the_dual_r(two_scenarios, r, k):
    f = DualMeasure(r, two_scenarios).as_functional()
    q = two_scenarios[k]
    worst = max(abs(recover_r(f, q, float(t)) - r.value(float(t), k)) for t in T_GRID)
    assert worst <= 2e-4


@pytest.mark.slow
@pytest.mark.parametrize('r', DUAL_FAMILIES, ids=lambda r: r.family)
@pytest.mark.parametrize('k', [0, 1])
def test_dual_r_recovery_matches_the_oracle(two_scenarios, r, k):
    f = DualMeasure(r, two_scenarios).as_functional()
    q = two_scenarios[k]
    for t in T_GRID[::4]:
        t = float(t)
        recovered = recover_r(f, q, t)
        oracle = dense_grid_oracle_r(f, q, t)
        assert recovered <= oracle + 1e-9
        assert abs(oracle - r.value(t, k)) <= 2e-4


def test_levels_outside_the_box(pnorm_one, tilted):
    with pytest.raises(InfeasibleError):
        recover_r(pnorm_one, tilted, 9.0)
    with pytest.raises(InfeasibleError):
        dense_grid_oracle_r(pnorm_one, tilted, 9.0)
    assert recover_r(pnorm_one, tilted, -9.0) == pytest.approx(-8.0)


def test_recovery_rejects_monetary_functionals(two_atoms, tilted):
    f = RiskFunctional(lambda z: avar(z, 0.5), MONETARY, two_atoms)
    with pytest.raises(InvalidInputError):
        recover_r(f, tilted, 0.0)


def test_oracle_is_limited_to_two_atoms():
    space = ProbSpace.uniform(3)
    f = RiskFunctional(lambda x: pnorm(x, 1.0), RETURN, space)
    with pytest.raises(InvalidInputError):
        dense_grid_oracle_r(f, Scenario.reference(space), 0.0)


@pytest.mark.parametrize('r, expected', [
    (RFunctional('coherent'), True),
    (RFunctional('convex_penalty', penalty=(0.2, 1.0)), True),
    (RFunctional('ph_kink', d_plus=2.0, d_minus=2.0), True),
    (RFunctional('floor', level=0.0), False),
    (RFunctional('log_floor', level=0.5), False),
    (RFunctional('ph_kink', d_plus=0.5, d_minus=0.5), False),
], ids=lambda v: v.family if isinstance(v, RFunctional) else str(v))
def test_expansive_grid_check(two_scenarios, r, expected):
    report = check_expansive(r, two_scenarios)
    assert report.holds('expansive') is expected
    assert report.holds('formulations_agree')
    assert r.expansive is expected


def test_translation_invariance_reads_off_penalties(two_scenarios):
    report = check_translation_invariant_in_t(RFunctional('convex_penalty', penalty=(0.0, 0.7)), two_scenarios)
    assert report.holds('translation_invariant_in_t')
    assert report.values['penalty[1]'] == pytest.approx(0.7)
    single = ScenarioSet.of(two_scenarios[0])
    assert not check_translation_invariant_in_t(RFunctional('floor', level=0.0), single).all_hold
