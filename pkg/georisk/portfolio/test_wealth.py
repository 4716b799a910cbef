"""
Wealth paths and the diversification inequalities
"""

import math

import numpy as np
import pytest

from georisk.correspondence import RETURN, RiskFunctional, SamplerConfig
from georisk.errors import InvalidInputError
from georisk.measures import h0_premium, pnorm
from georisk.portfolio import (
    check_diversification_inequalities,
    continuous_limit_wealth,
    sample_wealth_pairs,
    wealth_buy_and_hold,
    wealth_rebalanced,
)

W = [0.5, 0.5]
PATHS = [[1.1, 1.2], [0.9, 1.0]]


def test_buy_and_hold():
    assert wealth_buy_and_hold(W, PATHS) == pytest.approx([1.0, 1.0, 1.11])
    assert wealth_buy_and_hold(W, PATHS, w0=100.0)[-1] == pytest.approx(111.0)


def test_rebalanced_once_per_period():
    assert wealth_rebalanced(W, PATHS) == pytest.approx([1.0, 1.0, 1.1])


def test_continuous_limit():
    expected = math.exp(0.5 * (math.log(1.1) + math.log(0.9) + math.log(1.2) + math.log(1.0)))
    assert continuous_limit_wealth(W, PATHS)[-1] == pytest.approx(expected)


def test_rebalancing_converges_at_rate_one_over_k():
    limit = continuous_limit_wealth(W, PATHS)[-1]
    errors = [abs(wealth_rebalanced(W, PATHS, steps_per_period=k)[-1] - limit) for k in (10, 100, 1000)]
    assert errors[0] > errors[1] > errors[2]
    assert 9.0 < errors[0] / errors[1] < 11.0


def test_single_asset_paths_accept_a_flat_array():
    assert wealth_buy_and_hold([1.0], [1.5, 2.0]) == pytest.approx([1.0, 1.5, 3.0])


@pytest.mark.parametrize('w, paths', [
    ([0.7, 0.7], PATHS),
    ([1.5, -0.5], PATHS),
    (W, [[1.1, 1.2]]),
    (W, [[1.1, 0.0], [1.0, 1.0]]),
    (W, [[1.1, math.nan], [1.0, 1.0]]),
])
def test_invalid_inputs(w, paths):
    with pytest.raises(InvalidInputError):
        wealth_buy_and_hold(w, paths)


def test_rebalancing_needs_a_positive_step_count():
    with pytest.raises(InvalidInputError):
        wealth_rebalanced(W, PATHS, steps_per_period=0)


def test_wealth_pairs_start_with_the_separating_instance(two_atoms):
    pairs = sample_wealth_pairs(two_atoms, 5, seed=3)
    assert len(pairs) == 6
    assert pairs[0].va.values.tolist() == [1.0, math.exp(3.0)]
    assert pairs[0].w == 0.5
    again = sample_wealth_pairs(two_atoms, 5, seed=3)
    assert [p.to_dict() for p in pairs] == [p.to_dict() for p in again]


def test_level_matched_pairs_carry_equal_risk(two_atoms):
    h0 = RiskFunctional(h0_premium, RETURN, two_atoms, name='h0')
    pairs = sample_wealth_pairs(two_atoms, 6, seed=1, measure=h0)
    for pair in pairs[2::2]:
        assert h0(pair.va) == pytest.approx(h0(pair.vb), rel=1e-9)


def test_h0_diversifies_only_under_rebalancing(two_atoms):
    h0 = RiskFunctional(h0_premium, RETURN, two_atoms, name='h0')
    pairs = sample_wealth_pairs(two_atoms, 20, measure=h0)
    report = check_diversification_inequalities(h0, pairs, config=SamplerConfig(n_samples=1))
    assert report.holds('rebalanced')
    assert not report.holds('buy_and_hold')
    assert report['buy_and_hold'].counterexample.confirmed


def test_expected_value_diversifies_under_both(two_atoms):
    mean = RiskFunctional(lambda x: pnorm(x, 1.0), RETURN, two_atoms, name='mean')
    report = check_diversification_inequalities(mean, sample_wealth_pairs(two_atoms, 20, measure=mean))
    assert report.all_hold


def test_unknown_strategy(two_atoms):
    h0 = RiskFunctional(h0_premium, RETURN, two_atoms)
    with pytest.raises(InvalidInputError):
        check_diversification_inequalities(h0, [], strategies=('hodl',))
