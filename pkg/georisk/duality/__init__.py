"""
Dual representations: R-functionals, dual measures, R recovery and law invariance
"""

from georisk.duality.rfunctional import R_FAMILIES, RFunctional
from georisk.duality.dual_measure import (
    DualMeasure,
    dual_eval,
    dual_eval_with_argmax,
    dual_eval_building_block,
)
from georisk.duality.recovery import (
    RecoveryConfig,
    recover_r,
    dense_grid_oracle_r,
    check_expansive,
    check_translation_invariant_in_t,
)
from georisk.duality.law_invariant import (
    law_invariant_dual_eval,
    law_equivalent_dual_sup,
    arar_mixing_measure,
    arar_mixture_integral,
    arar_mixture_eval,
)
from georisk.duality.examples import (
    supq_discounted_premia,
    log_floor_closed_form,
    floor_closed_form,
    logconvex_closed_form,
)

__all__ = [
    'R_FAMILIES',
    'RFunctional',
    'DualMeasure',
    'dual_eval',
    'dual_eval_with_argmax',
    'dual_eval_building_block',
    'RecoveryConfig',
    'recover_r',
    'dense_grid_oracle_r',
    'check_expansive',
    'check_translation_invariant_in_t',
    'law_invariant_dual_eval',
    'law_equivalent_dual_sup',
    'arar_mixing_measure',
    'arar_mixture_integral',
    'arar_mixture_eval',
    'supq_discounted_premia',
    'log_floor_closed_form',
    'floor_closed_form',
    'logconvex_closed_form',
]
