"""Entrywise powers and the Loewner order on rank-constrained PSD cones.

Closed-form classification of which powers preserve positivity,
monotonicity, convexity and super/sub-additivity, together with explicit
counterexample constructions and a seeded numerical verifier.
"""

__version__ = "0.1.0"

from .classifier import Cone, Membership, PowerSet, bhatia_elsner_min_n, contains, critical_exponent, power_set
from .exceptions import (
    InconclusiveError,
    InputError,
    LoewnerLabError,
    PowerDomainError,
    PowerRangeError,
    SearchFailure,
    UnsupportedQueryError,
)
from .linalg import eigen_sym, gram, hadamard, is_psd, loewner_geq, numeric_rank, pad_direct_sum
from .powers import PowerMap, apply_entrywise, derivative, eval_scalar
from .properties import LoewnerProperty, defect_matrix
from .verifier import Verdict, ViolationCertificate, check_property, empirical_critical_exponent, sample_psd, scan_alpha

__all__ = [
    "Cone",
    "InconclusiveError",
    "InputError",
    "LoewnerLabError",
    "LoewnerProperty",
    "Membership",
    "PowerDomainError",
    "PowerMap",
    "PowerRangeError",
    "PowerSet",
    "SearchFailure",
    "UnsupportedQueryError",
    "Verdict",
    "ViolationCertificate",
    "apply_entrywise",
    "bhatia_elsner_min_n",
    "check_property",
    "contains",
    "critical_exponent",
    "defect_matrix",
    "derivative",
    "eigen_sym",
    "empirical_critical_exponent",
    "eval_scalar",
    "gram",
    "hadamard",
    "is_psd",
    "loewner_geq",
    "numeric_rank",
    "pad_direct_sum",
    "power_set",
    "sample_psd",
    "scan_alpha",
]
