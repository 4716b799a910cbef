"""
Capital allocation rules: acceptance-based, subdifferential and proportional
"""

from georisk.allocation.rules import (
    RULES,
    COMPOSITIONS,
    AllocationResult,
    allocation_levels,
    optimal_scenario,
    optimal_scenario_index,
    check_total_composition,
    car_subdifferential,
    car_proportional,
    subdifferential_acceptance_set,
    car_acceptance,
    allocate,
)

__all__ = [
    'RULES',
    'COMPOSITIONS',
    'AllocationResult',
    'allocation_levels',
    'optimal_scenario',
    'optimal_scenario_index',
    'check_total_composition',
    'car_subdifferential',
    'car_proportional',
    'subdifferential_acceptance_set',
    'car_acceptance',
    'allocate',
]
