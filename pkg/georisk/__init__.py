"""
georisk - geometric (return) risk measurement on finite probability spaces

Subpackages:
    prob_core       spaces, positions, scenarios, quantiles
    measures        risk-measure zoo, Orlicz premia, measure specs
    correspondence  monetary <-> return bijection, property checkers, taxonomy
    duality         R-functionals, dual and law-invariant representations
    acceptance      log-risk acceptance families
    portfolio       wealth dynamics, portfolio choice, frontiers
    allocation      capital allocation rules
    cli             scenario ingestion and batch runs
    database        SQLite run archive
"""

__version__ = '0.1.0'
