"""
Monetary <-> return correspondence, sampled property checkers and taxonomy
"""

from georisk.correspondence.functional import (
    MONETARY,
    RETURN,
    RiskFunctional,
    to_return,
    to_monetary,
)
from georisk.correspondence.checkers import (
    PROPERTIES,
    BRIDGES,
    SamplerConfig,
    Counterexample,
    PropertyResult,
    PropertyReport,
    check_property,
    check_properties,
    replay,
)
from georisk.correspondence.taxonomy import (
    FLAGS,
    TaxonomyClass,
    classify,
    bridge_equivalences,
    fit_ph_kink,
)
from georisk.correspondence.counterexamples import (
    qlc_counterexamples,
    counterexamples_confirmed,
)

__all__ = [
    'MONETARY',
    'RETURN',
    'RiskFunctional',
    'to_return',
    'to_monetary',
    'PROPERTIES',
    'BRIDGES',
    'SamplerConfig',
    'Counterexample',
    'PropertyResult',
    'PropertyReport',
    'check_property',
    'check_properties',
    'replay',
    'FLAGS',
    'TaxonomyClass',
    'classify',
    'bridge_equivalences',
    'fit_ph_kink',
    'qlc_counterexamples',
    'counterexamples_confirmed',
]
