"""
Exception hierarchy for georisk.

Every error derives from GeoRiskError and from the builtin it refines,
so callers can catch either.
"""

from typing import Optional


class GeoRiskError(Exception):
    """Base class for all georisk errors"""


class InvalidInputError(GeoRiskError, ValueError):
    """Construction-time validation failure"""


class SpaceMismatchError(InvalidInputError):
    """Objects defined on different probability spaces were combined"""


class DomainError(InvalidInputError):
    """Argument outside the domain of an operation"""


class NotEquiprobableError(InvalidInputError):
    """Law-invariance routines require equiprobable atoms"""


class BracketError(GeoRiskError, ArithmeticError):
    """No sign change inside a bisection bracket"""


class InfeasibleError(GeoRiskError, ValueError):
    """Constraint cannot be met inside the search box"""


class ConsistencyError(GeoRiskError, AssertionError):
    """An internally asserted identity failed beyond tolerance"""


class ConfigurationError(GeoRiskError, ValueError):
    """Invalid environment or command-line configuration"""


class IngestError(InvalidInputError):
    """Malformed scenario CSV or measure spec, with location diagnostics"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column '{column}'")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
