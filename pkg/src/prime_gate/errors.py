"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: ``DomainError`` and ``ValueError`` are
usage problems (2), ``CapacityError`` and ``PrecisionError`` are resource
problems (3).
"""


class PrimeGateError(Exception):
    pass


class DomainError(PrimeGateError, ValueError):
    """Arguments fall outside the region where a bound or formula is stated."""


class CapacityError(PrimeGateError):
    """The request exceeds the configured sieve / counting limits."""


class PrecisionError(PrimeGateError):
    """Cancellation consumed the working precision; retry with more digits."""
