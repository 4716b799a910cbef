"""
Risk-measure zoo, Orlicz premia, loss kernels and measure specifications
"""

from georisk.measures.orlicz import ORLICZ_TAGS, OrliczFunction, orlicz_premium, orlicz_root
from georisk.measures.kernels import KERNEL_TAGS, LossKernel
from georisk.measures.zoo import (
    var,
    avar,
    expectation,
    entropic,
    hg_premium,
    arar,
    arar_geometric,
    h0_premium,
    h0_premium_bisection,
    pnorm,
    robust_pnorm,
    robust_discounted_pnorm,
    logconvex_eval,
    mean_value_ce,
)
# spec depends on the correspondence layer, keep it last
from georisk.measures.spec import (
    FAMILIES,
    NATIVE_SIDE,
    MeasureSpec,
    load_measure_spec,
    build_measure,
    build_dual_measure,
    builtin_catalog,
)

__all__ = [
    'ORLICZ_TAGS',
    'OrliczFunction',
    'orlicz_premium',
    'orlicz_root',
    'KERNEL_TAGS',
    'LossKernel',
    'var',
    'avar',
    'expectation',
    'entropic',
    'hg_premium',
    'arar',
    'arar_geometric',
    'h0_premium',
    'h0_premium_bisection',
    'pnorm',
    'robust_pnorm',
    'robust_discounted_pnorm',
    'logconvex_eval',
    'mean_value_ce',
    'FAMILIES',
    'NATIVE_SIDE',
    'MeasureSpec',
    'load_measure_spec',
    'build_measure',
    'build_dual_measure',
    'builtin_catalog',
]
