"""
Log-risk acceptance families and their axioms
"""

from georisk.acceptance.family import (
    LogRiskAcceptanceFamily,
    geometric_levels,
    family_from_measure,
    measure_from_family,
    tight_level,
    in_monetary_acceptance,
    export_family_csv,
)
from georisk.acceptance.axioms import (
    FAMILY_AXIOMS,
    check_B_star_shaped,
    check_B_positively_homogeneous,
    check_family_axioms,
    check_monetary_correspondence,
)

__all__ = [
    'LogRiskAcceptanceFamily',
    'geometric_levels',
    'family_from_measure',
    'measure_from_family',
    'tight_level',
    'in_monetary_acceptance',
    'export_family_csv',
    'FAMILY_AXIOMS',
    'check_B_star_shaped',
    'check_B_positively_homogeneous',
    'check_family_axioms',
    'check_monetary_correspondence',
]
