"""Exact prime counting and machine checks of explicit prime-counting inequalities."""
from .errors import CapacityError, DomainError, PrecisionError, PrimeGateError
from .highprec import GEvaluation, g_asymptotic, g_exact, monotonicity_scan, pnt5, table_emit, verify_eq31
from .primes import (PrimeBlock, PrimeEngine, PiSnapshot, nth_prime, pi_exact_sieve, pi_exact_sublinear,
                     sieve_range, theta_exact)
from .reports import InequalityReport
from .scanner import ScanResult, check_point, scan_exhaustive
from .splitting import SplitThresholds, derive_x0, optimize_a, thresholds
from .widereal import WideReal

__version__ = "0.1.0"
