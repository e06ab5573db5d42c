"""Exact and high-precision evaluation of every gap-bound formula, plus the
factorial inequalities underlying them as testable claims.

Transcendental factors (pi, e) are evaluated with interval arithmetic and
reported with upward rounding, so every "value <= bound" comparison made
against these numbers is sound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .model import FunctionClass

_PREC_BITS = 160


def factorial(d: int) -> int:
    if d < 0:
        raise ValueError("factorial needs d >= 0")
    return math.factorial(d)


def dfact_bound(d: int, a: int) -> int:
    """The Cramer-rule ceiling d! * a^d on scaled vertex entries."""
    if d < 1 or a < 1:
        raise ValueError("need d >= 1 and a >= 1")
    return factorial(d) * a**d


def lp_dimensions(cls: FunctionClass, n: int, N: int) -> tuple[int, int]:
    """(columns d, coefficient bound a) of the equivalence LP for each class."""
    if n < 1 or N < 1:
        raise ValueError("need n >= 1 and N >= 1")
    if cls is FunctionClass.LINEAR:
        return n + 1, 2 * N
    if cls is FunctionClass.SEPARABLE:
        return 2 * n * N + 1, 1
    if cls is FunctionClass.SEPARABLE_QUADRATIC:
        return 2 * n + 1, 2 * N * N
    if cls is FunctionClass.QUADRATIC:
        return n * (n + 3) // 2 + 1, 2 * N * N
    raise ValueError(f"unknown class {cls!r}")


def mpf_to_fraction(x) -> Fraction:
    """Exact rational value of an mpmath float (they are dyadic rationals)."""
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    if man == 0 and exp == 0:
        return Fraction(0)
    frac = Fraction(man) * Fraction(2) ** exp
    return -frac if sign else frac


def _interval_upper(expr_fn):
    """Evaluate in interval arithmetic and return the upper endpoint as mpf."""
    old = mpmath.iv.prec
    mpmath.iv.prec = _PREC_BITS
    try:
        result = expr_fn(mpmath.iv)
        upper = result._mpi_[1]
    finally:
        mpmath.iv.prec = old
    old_mp = mpmath.mp.prec
    mpmath.mp.prec = _PREC_BITS
    try:
        return mpmath.mpf(upper)
    finally:
        mpmath.mp.prec = old_mp


def stirling_factorial_upper(d: int):
    """Upward-rounded sqrt(2 pi d) (d/e)^d e^(1/(12d)), an upper bound on d!."""
    if d < 1:
        raise ValueError("need d >= 1")

    def expr(iv):
        dd = iv.mpf(d)
        return iv.sqrt(2 * iv.pi * dd) * (dd / iv.exp(1)) ** d * iv.exp(iv.mpf(1) / (12 * d))

    return _interval_upper(expr)


def rho(cls: FunctionClass, n: int, N: int):
    """The class's reducibility ceiling: Stirling form of d! * a^d, rounded up."""
    d, a = lp_dimensions(cls, n, N)

    def expr(iv):
        dd = iv.mpf(d)
        stirling = (
            iv.sqrt(2 * iv.pi * dd)
            * (dd / iv.exp(1)) ** d
            * iv.exp(iv.mpf(1) / (12 * d))
        )
        return stirling * iv.mpf(a) ** d

    return _interval_upper(expr)


def simple_bounds(cls: FunctionClass, n: int, N: int) -> dict[str, Fraction]:
    """Closed-form gap bounds stated without the Stirling factor."""
    if n < 1 or N < 1:
        raise ValueError("need n >= 1 and N >= 1")
    if cls is FunctionClass.LINEAR:
        return {"existence_gap": Fraction(2 * N * ((n + 3) * N) ** n)}
    if cls is FunctionClass.SEPARABLE:
        return {"existence_gap": Fraction(n * N + Fraction(3, 2)) ** (2 * n * N)}
    raise ValueError("simple bounds are stated for LINEAR and SEPARABLE only")


def prior_bounds(n: int, N: int, cls: FunctionClass) -> dict[str, int]:
    """Reference values from earlier constructions, for comparison tables."""
    if n < 1 or N < 1:
        raise ValueError("need n >= 1 and N >= 1")
    if cls is FunctionClass.LINEAR:
        return {
            "prior_existence_upper": (4 * n * N) ** n,
            "prior_lower": N * (n * N) ** (n - 1),
            "frank_tardos": 2 ** (n**3) * N ** (n**2),
        }
    if cls is FunctionClass.SEPARABLE:
        return {
            "prior_existence_upper": (n * n * N) ** (n * (2 * N + 1) + 1),
            "constructive": 2 ** ((2 * n * N) ** 3),
        }
    if cls is FunctionClass.SEPARABLE_QUADRATIC:
        return {"constructive": 2 ** (8 * n**3) * N ** (8 * n**2)}
    if cls is FunctionClass.QUADRATIC:
        m = n * (n + 3) // 2
        return {"constructive": 2 ** (m**3) * N ** (2 * m**2)}
    raise ValueError(f"unknown class {cls!r}")


def constructive_bound(cls: FunctionClass, n: int, N: int) -> int:
    """Gap ceiling of the lattice-based route for each class."""
    if cls is FunctionClass.LINEAR:
        return 2 ** (n**3) * N ** (n**2)
    if cls is FunctionClass.SEPARABLE:
        return 2 ** ((2 * n * N) ** 3)
    return prior_bounds(n, N, cls)["constructive"]


def factorial_inequalities(d: int) -> tuple[bool, bool, bool]:
    """Check d! <= ((d+2)/2)^(d-1), d! <= ((d+1)/2)^d, and the Stirling form.

    The first two are exact rational comparisons; the Stirling right side is
    rounded upward.
    """
    if d < 1:
        raise ValueError("need d >= 1")
    fact = factorial(d)
    first = fact <= Fraction(d + 2, 2) ** (d - 1)
    second = fact <= Fraction(d + 1, 2) ** d
    third = fact <= mpf_to_fraction(stirling_factorial_upper(d))
    return first, second, third


@dataclass(frozen=True)
class BoundReport:
    """All bound values for one (class, n, N) configuration."""

    cls: FunctionClass
    n: int
    N: int
    d: int
    a: int
    exact_dfact_bound: int
    rho: object  # mpmath.mpf, upward-rounded
    simple_bound: dict[str, Fraction]
    prior_bounds: dict[str, int]

    def __post_init__(self):
        if Fraction(self.exact_dfact_bound) > mpf_to_fraction(self.rho):
            raise ValueError("exact bound must be dominated by its Stirling form")


def bound_report(cls: FunctionClass, n: int, N: int) -> BoundReport:
    d, a = lp_dimensions(cls, n, N)
    try:
        simple = simple_bounds(cls, n, N)
    except ValueError:
        simple = {}
    return BoundReport(
        cls=cls,
        n=n,
        N=N,
        d=d,
        a=a,
        exact_dfact_bound=dfact_bound(d, a),
        rho=rho(cls, n, N),
        simple_bound=simple,
        prior_bounds=prior_bounds(n, N, cls),
    )
