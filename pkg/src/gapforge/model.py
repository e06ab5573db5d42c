"""Exact representations of the supported objective classes over integer boxes.

Every function lives on a symmetric box [-N, N]^n and is stored with exact
rational data (``fractions.Fraction``); nothing in this package ever touches
floating point on an evaluation path.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Sequence, Union

DEFAULT_MAX_POINTS = 10**6

Point = tuple[int, ...]


class SizeGuardExceeded(Exception):
    """An operation would enumerate more box points than the configured cap."""


class FunctionClass(Enum):
    LINEAR = "linear"
    SEPARABLE = "separable"
    SEPARABLE_QUADRATIC = "separable_quadratic"
    QUADRATIC = "quadratic"


class Shape(Enum):
    """Per-coordinate curvature flag for the separable classes."""

    FREE = "free"
    CONVEX = "convex"
    CONCAVE = "concave"


class ReduceMethod(Enum):
    LP = "LP"
    FT = "FT"
    RANK = "RANK"


def as_rational(value) -> Fraction:
    """Coerce an exact input (int, Fraction, or 'p/q' string) to Fraction.

    Floats are rejected: they would silently break the exactness contract.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class BoxDomain:
    """The integer box [-N, N]^n."""

    n: int
    N: int

    def __post_init__(self):
        if self.n < 1 or self.N < 1:
            raise ValueError("box requires n >= 1 and N >= 1")

    def point_count(self) -> int:
        return (2 * self.N + 1) ** self.n

    def contains(self, x: Sequence[int]) -> bool:
        return len(x) == self.n and all(
            isinstance(v, int) and -self.N <= v <= self.N for v in x
        )

    def point_index(self, x: Sequence[int]) -> int:
        """Rank of ``x`` in the lexicographic enumeration of the box."""
        width = 2 * self.N + 1
        idx = 0
        for v in x:
            idx = idx * width + (v + self.N)
        return idx


def enumerate_points(box: BoxDomain, max_points: int | None = None) -> Iterator[Point]:
    """Lexicographic enumeration of the box, guarded by a point-count cap."""
    limit = DEFAULT_MAX_POINTS if max_points is None else max_points
    count = box.point_count()
    if count > limit:
        raise SizeGuardExceeded(f"box has {count} points, cap is {limit}")
    return itertools.product(range(-box.N, box.N + 1), repeat=box.n)


def _shape_tuple(shape, n: int) -> tuple[Shape, ...]:
    if not shape:
        return (Shape.FREE,) * n
    out = tuple(Shape(s) if not isinstance(s, Shape) else s for s in shape)
    if len(out) != n:
        raise ValueError(f"shape flags must have length {n}")
    return out


@dataclass(frozen=True)
class LinearFn:
    """f(x) = sum_i coeffs[i] * x_i."""

    box: BoxDomain
    coeffs: tuple[Fraction, ...]

    function_class = FunctionClass.LINEAR

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_rational(c) for c in self.coeffs))
        if len(self.coeffs) != self.box.n:
            raise ValueError("coefficient count must match box dimension")


@dataclass(frozen=True)
class SeparableFn:
    """f(x) = sum_i f_i(x_i), each f_i given as an explicit value table.

    ``tables[i][k + N]`` holds f_i(k) for k in [-N, N].
    """

    box: BoxDomain
    tables: tuple[tuple[Fraction, ...], ...]
    shape: tuple[Shape, ...] = ()

    function_class = FunctionClass.SEPARABLE

    def __post_init__(self):
        rows = tuple(tuple(as_rational(v) for v in row) for row in self.tables)
        object.__setattr__(self, "tables", rows)
        object.__setattr__(self, "shape", _shape_tuple(self.shape, self.box.n))
        if len(rows) != self.box.n:
            raise ValueError("need one table row per coordinate")
        width = 2 * self.box.N + 1
        if any(len(row) != width for row in rows):
            raise ValueError(f"each table row must have {width} entries")

    def table_value(self, i: int, k: int) -> Fraction:
        return self.tables[i][k + self.box.N]

    def increment_rows(self) -> tuple[tuple[Fraction, ...], ...]:
        """Per coordinate, the consecutive differences f_i(k) - f_i(k-1)."""
        return tuple(
            tuple(row[j + 1] - row[j] for j in range(len(row) - 1))
            for row in self.tables
        )


@dataclass(frozen=True)
class SepQuadFn:
    """f(x) = sum_i (alpha_i x_i^2 + beta_i x_i + gamma_i)."""

    box: BoxDomain
    alpha: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]
    gamma: tuple[Fraction, ...] = ()
    shape: tuple[Shape, ...] = ()

    function_class = FunctionClass.SEPARABLE_QUADRATIC

    def __post_init__(self):
        n = self.box.n
        object.__setattr__(self, "alpha", tuple(as_rational(v) for v in self.alpha))
        object.__setattr__(self, "beta", tuple(as_rational(v) for v in self.beta))
        gamma = self.gamma if self.gamma else (Fraction(0),) * n
        object.__setattr__(self, "gamma", tuple(as_rational(v) for v in gamma))
        object.__setattr__(self, "shape", _shape_tuple(self.shape, n))
        if not (len(self.alpha) == len(self.beta) == len(self.gamma) == n):
            raise ValueError("alpha/beta/gamma must all have length n")


@dataclass(frozen=True)
class QuadFn:
    """f(x) = sum_{i<=j} alpha[(i,j)] x_i x_j + sum_i beta_i x_i + gamma.

    ``alpha`` stores the upper triangle in lexicographic (i, j) order,
    0-based, so it has n(n+1)/2 entries.
    """

    box: BoxDomain
    alpha: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]
    gamma: Fraction = Fraction(0)

    function_class = FunctionClass.QUADRATIC

    def __post_init__(self):
        n = self.box.n
        object.__setattr__(self, "alpha", tuple(as_rational(v) for v in self.alpha))
        object.__setattr__(self, "beta", tuple(as_rational(v) for v in self.beta))
        object.__setattr__(self, "gamma", as_rational(self.gamma))
        if len(self.alpha) != n * (n + 1) // 2:
            raise ValueError("alpha must hold the upper triangle, n(n+1)/2 entries")
        if len(self.beta) != n:
            raise ValueError("beta must have length n")

    @staticmethod
    def pair_index(i: int, j: int, n: int) -> int:
        """Position of the (i, j) entry, i <= j 0-based, in lexicographic order."""
        if not 0 <= i <= j < n:
            raise ValueError("need 0 <= i <= j < n")
        return i * n - i * (i - 1) // 2 + (j - i)

    def alpha_at(self, i: int, j: int) -> Fraction:
        return self.alpha[self.pair_index(i, j, self.box.n)]


@dataclass(frozen=True)
class TableFn:
    """An arbitrary integer-valued function stored pointwise.

    Produced by the rank baseline; not a member of any of the four classes.
    ``values`` follows the lexicographic point enumeration.
    """

    box: BoxDomain
    values: tuple[int, ...]

    function_class = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if len(self.values) != self.box.point_count():
            raise ValueError("need one value per box point")


FunctionSpec = Union[LinearFn, SeparableFn, SepQuadFn, QuadFn, TableFn]


def _check_point(f: FunctionSpec, x: Sequence[int]) -> Point:
    x = tuple(x)
    if len(x) != f.box.n:
        raise ValueError(f"point has dimension {len(x)}, expected {f.box.n}")
    if not f.box.contains(x):
        raise ValueError(f"point {x} lies outside [-{f.box.N}, {f.box.N}]^{f.box.n}")
    return x


def evaluate(f: FunctionSpec, x: Sequence[int]) -> Fraction:
    """Exact value of ``f`` at a box point."""
    x = _check_point(f, x)
    if isinstance(f, LinearFn):
        return sum((c * v for c, v in zip(f.coeffs, x)), Fraction(0))
    if isinstance(f, SeparableFn):
        return sum((f.table_value(i, v) for i, v in enumerate(x)), Fraction(0))
    if isinstance(f, SepQuadFn):
        total = Fraction(0)
        for a, b, g, v in zip(f.alpha, f.beta, f.gamma, x):
            total += a * v * v + b * v + g
        return total
    if isinstance(f, QuadFn):
        total = Fraction(f.gamma)
        n = f.box.n
        pos = 0
        for i in range(n):
            for j in range(i, n):
                total += f.alpha[pos] * x[i] * x[j]
                pos += 1
        for b, v in zip(f.beta, x):
            total += b * v
        return total
    if isinstance(f, TableFn):
        return Fraction(f.values[f.box.point_index(x)])
    raise TypeError(f"unsupported function spec {type(f).__name__}")


def evaluate_all(f: FunctionSpec, max_points: int | None = None) -> list[Fraction]:
    """Values of ``f`` at every box point, in enumeration order."""
    if isinstance(f, TableFn):
        if f.box.point_count() > (DEFAULT_MAX_POINTS if max_points is None else max_points):
            raise SizeGuardExceeded("table too large for enumeration cap")
        return [Fraction(v) for v in f.values]
    return [evaluate(f, x) for x in enumerate_points(f.box, max_points)]


def gap_of(f: FunctionSpec, max_points: int | None = None) -> Fraction:
    """max f - min f over the box, by full enumeration."""
    lo = hi = None
    for v in evaluate_all(f, max_points):
        if lo is None or v < lo:
            lo = v
        if hi is None or v > hi:
            hi = v
    return hi - lo


def is_integer_valued(f: FunctionSpec, max_points: int | None = None) -> bool:
    """True iff every box point evaluates to an integer."""
    return all(v.denominator == 1 for v in evaluate_all(f, max_points))


def _lcm_denominator(values) -> int:
    lcm = 1
    for v in values:
        d = v.denominator
        if d != 1:
            lcm = lcm * d // math.gcd(lcm, d)
    return lcm


def canonicalize(f: FunctionSpec) -> FunctionSpec:
    """Order-equivalent integer-valued normal form of ``f``.

    Scales every coefficient by the lcm of the denominators (a positive
    factor, so the ordering of values is untouched) and then applies the
    class's normalization shift: separable tables get f_i(-N) = 0, the
    quadratic classes drop their constant terms.
    """
    if isinstance(f, LinearFn):
        scale_by = _lcm_denominator(f.coeffs)
        return LinearFn(f.box, tuple(c * scale_by for c in f.coeffs))
    if isinstance(f, SeparableFn):
        flat = [v for row in f.tables for v in row]
        scale_by = _lcm_denominator(flat)
        rows = tuple(
            tuple(v * scale_by - row[0] * scale_by for v in row) for row in f.tables
        )
        return SeparableFn(f.box, rows, f.shape)
    if isinstance(f, SepQuadFn):
        scale_by = _lcm_denominator(f.alpha + f.beta + f.gamma)
        return SepQuadFn(
            f.box,
            tuple(a * scale_by for a in f.alpha),
            tuple(b * scale_by for b in f.beta),
            (Fraction(0),) * f.box.n,
            f.shape,
        )
    if isinstance(f, QuadFn):
        scale_by = _lcm_denominator(f.alpha + f.beta + (f.gamma,))
        return QuadFn(
            f.box,
            tuple(a * scale_by for a in f.alpha),
            tuple(b * scale_by for b in f.beta),
            Fraction(0),
        )
    if isinstance(f, TableFn):
        return f
    raise TypeError(f"unsupported function spec {type(f).__name__}")


def scale(f: FunctionSpec, c) -> FunctionSpec:
    """The function c * f, same class (c must be a positive rational)."""
    c = as_rational(c)
    if c <= 0:
        raise ValueError("scaling factor must be positive")
    if isinstance(f, LinearFn):
        return LinearFn(f.box, tuple(v * c for v in f.coeffs))
    if isinstance(f, SeparableFn):
        return SeparableFn(
            f.box, tuple(tuple(v * c for v in row) for row in f.tables), f.shape
        )
    if isinstance(f, SepQuadFn):
        return SepQuadFn(
            f.box,
            tuple(v * c for v in f.alpha),
            tuple(v * c for v in f.beta),
            tuple(v * c for v in f.gamma),
            f.shape,
        )
    if isinstance(f, QuadFn):
        return QuadFn(
            f.box,
            tuple(v * c for v in f.alpha),
            tuple(v * c for v in f.beta),
            f.gamma * c,
        )
    raise TypeError(f"cannot scale {type(f).__name__}")


@dataclass(frozen=True)
class Certificate:
    """Outcome record for one reduction: achieved gap vs. the theoretical cap."""

    method: ReduceMethod
    gap: int
    bound: int | Fraction
    verified: bool
    counterexample: tuple[Point, Point] | None = None

    def __post_init__(self):
        if self.verified and self.counterexample is not None:
            raise ValueError("a verified certificate cannot carry a counterexample")
        if self.verified and self.gap > self.bound:
            raise ValueError(
                f"verified certificate violates its bound: gap {self.gap} > {self.bound}"
            )
