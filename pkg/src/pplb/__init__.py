"""Generalized Bertrand-postulate inequalities over sums of consecutive primes."""

from .analytic_bounds import (
    CrossoverCertificate,
    bound_gap,
    certified_least_n,
    certify_persistence,
    check_rs_bounds,
    find_crossover,
)
from .errors import (
    CertificationFailedError,
    ConfigError,
    CoverageError,
    InvalidSpecError,
    PPLBError,
    RangeError,
    SearchExhaustedError,
)
from .postulate_core import (
    DeltaSeries,
    Mode,
    OffsetSpec,
    ThresholdResult,
    delta,
    delta_series,
    empirical_threshold,
    evaluate,
    threshold_table,
)
from .prime_engine import PrimeTable, PrimeWindow, SieveConfig, count_primes_below, stream_primes, windows
from .sequence_lab import (
    delta_runs,
    export_sequence,
    max_run_survey,
    monotonicity_probe,
    verify_loo,
    verify_shevelev,
    verify_theorem2,
)

__version__ = "0.1.0"
