"""
Wealth dynamics, multiplicative portfolio choice and frontiers
"""

from georisk.portfolio.wealth import (
    STRATEGIES,
    WealthPair,
    wealth_buy_and_hold,
    wealth_rebalanced,
    continuous_limit_wealth,
    sample_wealth_pairs,
    check_diversification_inequalities,
)
from georisk.portfolio.choice import (
    OPTIMAL,
    INFEASIBLE,
    SolverConfig,
    PortfolioProblem,
    FrontierPoint,
    solve_portfolio,
    dense_grid_oracle,
    efficient_frontier,
    check_frontier,
)
from georisk.portfolio.frontier import (
    LogConstraintFamily,
    generalized_frontier_logconstraint,
    check_generalized_frontier,
)

__all__ = [
    'STRATEGIES',
    'WealthPair',
    'wealth_buy_and_hold',
    'wealth_rebalanced',
    'continuous_limit_wealth',
    'sample_wealth_pairs',
    'check_diversification_inequalities',
    'OPTIMAL',
    'INFEASIBLE',
    'SolverConfig',
    'PortfolioProblem',
    'FrontierPoint',
    'solve_portfolio',
    'dense_grid_oracle',
    'efficient_frontier',
    'check_frontier',
    'LogConstraintFamily',
    'generalized_frontier_logconstraint',
    'check_generalized_frontier',
]
