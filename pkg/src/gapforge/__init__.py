"""gapforge: order-equivalent objective compression over integer boxes.

Given an integer-valued objective of one of four classes (linear, separable,
separable quadratic, quadratic) on [-N, N]^n, produce an equivalent function
of the same class whose gap (max minus min) is provably small, by either an
exact-LP existence route or a constructive lattice route, with brute-force
verification certificates.
"""

from .model import (
    BoxDomain,
    Certificate,
    DEFAULT_MAX_POINTS,
    FunctionClass,
    FunctionSpec,
    LinearFn,
    QuadFn,
    ReduceMethod,
    SepQuadFn,
    SeparableFn,
    Shape,
    SizeGuardExceeded,
    TableFn,
    canonicalize,
    enumerate_points,
    evaluate,
    gap_of,
    is_integer_valued,
)
from .oracle import (
    Counterexample,
    EquivalenceVerdict,
    ViolationKind,
    check_class,
    check_equivalent,
    min_gap_bruteforce,
    rank_reduce,
)
from .reducelp import BuildMode, Encoding, build_lp, encode, reduce_via_lp
from .liftings import reduce_via_ft

__all__ = [
    "BoxDomain",
    "BuildMode",
    "Certificate",
    "Counterexample",
    "DEFAULT_MAX_POINTS",
    "Encoding",
    "EquivalenceVerdict",
    "FunctionClass",
    "FunctionSpec",
    "LinearFn",
    "QuadFn",
    "ReduceMethod",
    "SepQuadFn",
    "SeparableFn",
    "Shape",
    "SizeGuardExceeded",
    "TableFn",
    "ViolationKind",
    "build_lp",
    "canonicalize",
    "check_class",
    "check_equivalent",
    "encode",
    "enumerate_points",
    "evaluate",
    "gap_of",
    "is_integer_valued",
    "min_gap_bruteforce",
    "rank_reduce",
    "reduce_via_ft",
    "reduce_via_lp",
]

__version__ = "0.1.0"
