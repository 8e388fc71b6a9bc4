"""Exact continued-fraction toolkit.

Canonical expansions and continuant matrices for rationals, membership and
enumeration of the bounded-partial-quotient sets, congruence-constrained
witness search with exceptional-set scans, and signed decomposition of any
rational in (0, 1) into bounded-quotient pieces with exact-arithmetic
verification throughout.
"""

from .cf_core import (
    CFExpansion,
    ContinuantMatrix,
    continuant_product,
    cost,
    evaluate,
    expand,
    generator,
    reduce,
)
from .decompose import (
    DecomposeConfig,
    DecomposeError,
    PrimeWindowError,
    Representation,
    SignedTerm,
    SplitError,
    SplitTrace,
    StepRecord,
    VerificationError,
    VerificationReport,
    decompose,
    min_cost_oracle,
    select_primes,
    split,
    verify,
)
from .fitting import fit_exponent
from .zaremba import (
    BallElement,
    ExceptionalSetReport,
    OracleQuery,
    OracleResult,
    enumerate_by_denominator,
    enumerate_semigroup_ball,
    find_witness,
    is_member,
    scan_exceptional,
)

__version__ = "0.1.0"

__all__ = [
    "BallElement",
    "CFExpansion",
    "ContinuantMatrix",
    "DecomposeConfig",
    "DecomposeError",
    "ExceptionalSetReport",
    "OracleQuery",
    "OracleResult",
    "PrimeWindowError",
    "Representation",
    "SignedTerm",
    "SplitError",
    "SplitTrace",
    "StepRecord",
    "VerificationError",
    "VerificationReport",
    "continuant_product",
    "cost",
    "decompose",
    "enumerate_by_denominator",
    "enumerate_semigroup_ball",
    "evaluate",
    "expand",
    "find_witness",
    "fit_exponent",
    "generator",
    "is_member",
    "min_cost_oracle",
    "reduce",
    "scan_exceptional",
    "select_primes",
    "split",
    "verify",
]
