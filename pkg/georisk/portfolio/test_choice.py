"""
Multiplicative portfolio choice, efficient and generalized frontiers
"""

import math

import numpy as np
import pytest

from georisk.correspondence import MONETARY, RETURN, RiskFunctional
from georisk.errors import InvalidInputError
from georisk.measures import arar, avar, h0_premium, pnorm
from georisk.portfolio import (
    INFEASIBLE,
    OPTIMAL,
    LogConstraintFamily,
    PortfolioProblem,
    SolverConfig,
    check_frontier,
    check_generalized_frontier,
    dense_grid_oracle,
    efficient_frontier,
    generalized_frontier_logconstraint,
    solve_portfolio,
)
from georisk.portfolio.search import lattice_directions, null_directions, simplex_grid
from georisk.prob_core import PositivePosition, ProbSpace


@pytest.fixture
def assets(two_atoms):
    return (PositivePosition(two_atoms, [0.8, 1.5]), PositivePosition(two_atoms, [1.4, 0.9]))


@pytest.fixture
def second_moment(two_atoms):
    return RiskFunctional(lambda x: pnorm(x, 2.0), RETURN, two_atoms, name='pnorm2')


@pytest.fixture
def problem(assets, second_moment):
    return PortfolioProblem(assets, math.inf, second_moment)


def test_simplex_grid():
    grid = simplex_grid(3, 4)
    assert grid.shape == (math.comb(6, 2), 3)
    assert np.allclose(grid.sum(axis=1), 1.0)
    assert [1.0, 0.0, 0.0] in grid.tolist()


def test_lattice_moves_stay_on_the_simplex_plane():
    moves = lattice_directions(4, sum_zero=True)
    assert len(moves) == 3 ** 3 - 1
    assert np.allclose(moves.sum(axis=1), 0.0)
    d = null_directions([np.ones(3), np.array([1.0, 2.0, 4.0])], 3)
    assert np.allclose(d @ np.ones(3), 0.0)
    assert np.allclose(d @ np.array([1.0, 2.0, 4.0]), 0.0)


def test_objective_forms_agree(problem):
    w = np.array([0.3, 0.7])
    assert problem.check_equivalence(w) == pytest.approx(math.exp(problem.arithmetic_objective(w)), rel=1e-12)


def test_unconstrained_optimum_matches_the_grid_oracle(problem):
    point = solve_portfolio(problem)
    oracle = dense_grid_oracle(problem)
    assert point.status == OPTIMAL
    assert point.value <= oracle.value + 1e-8
    assert oracle.value - point.value < 1e-5
    assert point.w_star.sum() == pytest.approx(1.0)
    assert 0.0 < point.w_star[0] < 1.0


@pytest.mark.slow
def test_three_asset_optimum_matches_the_grid_oracle(rng):
    space = ProbSpace.uniform(3)
    assets = tuple(PositivePosition(space, np.exp(rng.normal(scale=0.3, size=3))) for _ in range(3))
    p = PortfolioProblem(assets, math.inf, RiskFunctional(lambda x: pnorm(x, 2.0), RETURN, space))
    point = solve_portfolio(p)
    oracle = dense_grid_oracle(p, resolution=128)
    assert point.value <= oracle.value + 1e-8


@pytest.mark.slow
@pytest.mark.parametrize('instance', range(10))
def test_regression_instances_match_the_fine_oracle(instance):
    rng = np.random.default_rng(700 + instance)
    space = ProbSpace.uniform(4)
    n_assets = 2 if instance < 5 else 3
    assets = tuple(PositivePosition(space, np.exp(rng.normal(scale=0.4, size=4))) for _ in range(n_assets))
    if instance % 2:
        f = RiskFunctional(lambda x: pnorm(x, 2.0), RETURN, space, name='pnorm2')
    else:
        f = RiskFunctional(lambda x: arar(x, 0.5), RETURN, space, name='arar')
    p = PortfolioProblem(assets, math.inf, f)
    point = solve_portfolio(p)
    oracle = dense_grid_oracle(p, resolution=512)
    assert point.status == OPTIMAL
    assert point.value - oracle.value <= 1e-4


def test_constraint_binds(problem):
    free = solve_portfolio(problem)
    r = problem.log_growth(free.w_star) - 0.01
    point = solve_portfolio(problem.with_target(r))
    assert point.status == OPTIMAL
    assert problem.log_growth(point.w_star) <= r + 1e-12
    assert point.value >= free.value


def test_empty_constraint_set(problem):
    point = solve_portfolio(problem.with_target(-1.0))
    assert point.status == INFEASIBLE
    assert point.w_star is None
    assert math.isnan(point.value)
    assert point.to_dict()['w_star'] is None


def test_problem_validation(assets, second_moment, two_atoms):
    with pytest.raises(InvalidInputError):
        PortfolioProblem(assets[:1], math.inf, second_moment)
    with pytest.raises(InvalidInputError):
        PortfolioProblem(assets, math.nan, second_moment)
    with pytest.raises(InvalidInputError):
        PortfolioProblem(assets, math.inf, RiskFunctional(lambda z: avar(z, 0.5), MONETARY, two_atoms))
    with pytest.raises(InvalidInputError):
        dense_grid_oracle(PortfolioProblem(assets * 2, math.inf, second_moment))


def test_efficient_frontier_is_nonincreasing_and_quasi_convex(problem):
    logs = problem.expected_logs
    r_grid = [logs.min() - 0.05] + list(np.linspace(logs.min(), logs.max() + 0.02, 6))
    points = efficient_frontier(problem, r_grid)
    assert points[0].status == INFEASIBLE
    optimal = [pt for pt in points if pt.status == OPTIMAL]
    assert len(optimal) >= 5
    assert all(b.value <= a.value + 1e-9 for a, b in zip(optimal, optimal[1:]))
    assert check_frontier(problem, points, n_triples=6, seed=4).all_hold
    with pytest.raises(InvalidInputError):
        efficient_frontier(problem, [0.1, 0.0])


@pytest.fixture
def log_family(assets, second_moment):
    return LogConstraintFamily(assets, second_moment)


def test_log_constraint_family(log_family, assets):
    slopes = np.array([math.fsum(0.5 * np.log(a.values)) for a in assets])
    assert log_family.slopes == pytest.approx(slopes)
    w = np.array([0.5, 0.25])
    assert log_family.constraint_value(w) == pytest.approx(slopes @ np.log(w))
    assert log_family.contains(w, 1.0)
    assert not log_family.contains(np.array([2.0, 0.5]), 1.0)
    assert log_family.min_constraint() == pytest.approx(slopes.sum() * math.log(1e-3))
    # V = X, G = 1: prod_i w_i^{X_i}
    by_hand = pnorm(PositivePosition(assets[0].space, w[0] ** np.log(assets[0].values) *
                                     w[1] ** np.log(assets[1].values)), 2.0)
    assert log_family.objective(w) == pytest.approx(by_hand)


def test_log_constraint_family_validation(assets, second_moment):
    with pytest.raises(InvalidInputError):
        LogConstraintFamily(assets, second_moment, eps=1.0, w_max=0.5)
    with pytest.raises(InvalidInputError):
        LogConstraintFamily(assets, second_moment, exponents=(1.0,))


def test_generalized_frontier(log_family):
    r_grid = [0.1] + list(np.exp(np.linspace(-1.2, 0.0, 5)))
    points = generalized_frontier_logconstraint(log_family, r_grid, SolverConfig(restarts=2))
    assert points[0].status == INFEASIBLE
    optimal = points[1:]
    assert all(pt.status == OPTIMAL for pt in optimal)
    for pt in optimal:
        assert log_family.contains(pt.w_star, pt.r)
    report = check_generalized_frontier(log_family, points, n_triples=5, config=SolverConfig(restarts=2))
    assert report.all_hold, {n: r.max_margin for n, r in report.results.items()}
    with pytest.raises(InvalidInputError):
        generalized_frontier_logconstraint(log_family, [0.0])


def test_generalized_frontier_with_constant_exponents(assets, two_atoms):
    h0 = RiskFunctional(h0_premium, RETURN, two_atoms, name='h0')
    fam = LogConstraintFamily(assets, h0, exponents=(1.0, 1.0))
    point = generalized_frontier_logconstraint(fam, [1.0])[0]
    # F(w) = w_1 w_2 is smallest at the lower corner
    assert point.w_star == pytest.approx([1e-3, 1e-3])
    assert point.value == pytest.approx(1e-6)
