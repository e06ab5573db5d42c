"""Brute-force ground truth: equivalence checking, class membership, and
exhaustive minimal-gap search used as an independent test oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .model import (
    BoxDomain,
    Certificate,
    FunctionClass,
    FunctionSpec,
    LinearFn,
    Point,
    QuadFn,
    ReduceMethod,
    SepQuadFn,
    SeparableFn,
    Shape,
    SizeGuardExceeded,
    TableFn,
    enumerate_points,
    evaluate_all,
)

DEFAULT_MAX_SEARCH_OPS = 5 * 10**6


class ViolationKind(Enum):
    ORDER_FLIPPED = "order_flipped"
    TIE_BROKEN = "tie_broken"
    TIE_CREATED = "tie_created"


@dataclass(frozen=True)
class Counterexample:
    x: Point
    y: Point
    reason: ViolationKind


@dataclass(frozen=True)
class EquivalenceVerdict:
    counterexample: Counterexample | None = None

    @property
    def equivalent(self) -> bool:
        return self.counterexample is None


def _order_profile(values: Sequence[Fraction]):
    """Indices sorted by (value, index) plus tie flags between neighbours."""
    order = sorted(range(len(values)), key=lambda i: (values[i], i))
    ties = [values[order[t]] == values[order[t + 1]] for t in range(len(order) - 1)]
    return order, ties


def _profiles_match(order, ties, values) -> bool:
    """True iff ``values`` induces the same ordering and tie classes."""
    for t in range(len(order) - 1):
        a, b = values[order[t]], values[order[t + 1]]
        if ties[t]:
            if a != b:
                return False
        elif not a < b:
            return False
    return True


def check_equivalent(
    f: FunctionSpec, g: FunctionSpec, max_points: int | None = None
) -> EquivalenceVerdict:
    """Decide whether f(x) >= f(y) <=> g(x) >= g(y) for all ordered box pairs.

    On failure, the counterexample is the lexicographically first violating
    ordered pair under the point enumeration.
    """
    if f.box != g.box:
        raise ValueError("functions must share the same box domain")
    vf = evaluate_all(f, max_points)
    vg = evaluate_all(g, max_points)

    order, ties = _order_profile(vf)
    if _profiles_match(order, ties, vg):
        return EquivalenceVerdict()

    points = list(enumerate_points(f.box, max_points))
    for i, j in itertools.product(range(len(points)), repeat=2):
        fi, fj = vf[i], vf[j]
        gi, gj = vg[i], vg[j]
        if (fi >= fj) == (gi >= gj):
            continue
        if fi == fj:
            reason = ViolationKind.TIE_BROKEN
        elif gi == gj:
            reason = ViolationKind.TIE_CREATED
        else:
            reason = ViolationKind.ORDER_FLIPPED
        return EquivalenceVerdict(Counterexample(points[i], points[j], reason))
    raise AssertionError("profile mismatch without a violating pair")


def _increments_monotone(row: Sequence[Fraction], nondecreasing: bool) -> bool:
    pairs = zip(row, row[1:])
    if nondecreasing:
        return all(a <= b for a, b in pairs)
    return all(a >= b for a, b in pairs)


def check_class(
    g: FunctionSpec,
    cls: FunctionClass,
    shape: Sequence[Shape] | None = None,
) -> bool:
    """Structural membership of ``g`` in ``cls`` including curvature flags.

    For the separable classes the flags checked are ``shape`` when given,
    otherwise the flags declared on ``g`` itself.
    """
    if cls is FunctionClass.LINEAR:
        return isinstance(g, LinearFn)
    if cls is FunctionClass.QUADRATIC:
        return isinstance(g, QuadFn)
    if cls is FunctionClass.SEPARABLE:
        if not isinstance(g, SeparableFn):
            return False
        flags = tuple(shape) if shape is not None else g.shape
        if len(flags) != g.box.n:
            return False
        for row, flag in zip(g.increment_rows(), flags):
            if flag is Shape.CONVEX and not _increments_monotone(row, True):
                return False
            if flag is Shape.CONCAVE and not _increments_monotone(row, False):
                return False
        return True
    if cls is FunctionClass.SEPARABLE_QUADRATIC:
        if not isinstance(g, SepQuadFn):
            return False
        flags = tuple(shape) if shape is not None else g.shape
        if len(flags) != g.box.n:
            return False
        for a, flag in zip(g.alpha, flags):
            if flag is Shape.CONVEX and a < 0:
                return False
            if flag is Shape.CONCAVE and a > 0:
                return False
        return True
    raise ValueError(f"unknown function class {cls!r}")


def rank_reduce(
    f: FunctionSpec, max_points: int | None = None
) -> tuple[TableFn, Certificate]:
    """Baseline reduction: replace each value by its rank among distinct values.

    The result is equivalent to ``f`` by construction but belongs to no
    structured class, so it is certified under the RANK method.
    """
    values = evaluate_all(f, max_points)
    distinct = sorted(set(values))
    rank = {v: r for r, v in enumerate(distinct)}
    g = TableFn(f.box, tuple(rank[v] for v in values))
    verdict = check_equivalent(f, g, max_points)
    cert = Certificate(
        method=ReduceMethod.RANK,
        gap=len(distinct) - 1,
        bound=f.box.point_count() - 1,
        verified=verdict.equivalent,
        counterexample=None,
    )
    return g, cert


def min_gap_bruteforce(
    cls: FunctionClass,
    f: FunctionSpec,
    box: BoxDomain | None = None,
    radius: int = 1,
    max_ops: int | None = None,
) -> int | None:
    """Minimal gap over all integer coefficient vectors with inf-norm <= radius
    whose induced function is equivalent to ``f``; None when no candidate is.

    Only the finitely-parameterized classes are supported: LINEAR and
    SEPARABLE_QUADRATIC.
    """
    box = box or f.box
    if box != f.box:
        raise ValueError("box must match the function's box")
    if cls is FunctionClass.LINEAR:
        n_params = box.n
    elif cls is FunctionClass.SEPARABLE_QUADRATIC:
        n_params = 2 * box.n
    else:
        raise ValueError("brute-force search supports LINEAR and SEPARABLE_QUADRATIC only")

    points = list(enumerate_points(box))
    candidates = (2 * radius + 1) ** n_params
    cap = DEFAULT_MAX_SEARCH_OPS if max_ops is None else max_ops
    if candidates * len(points) > cap:
        raise SizeGuardExceeded(
            f"search space {candidates} x {len(points)} exceeds cap {cap}"
        )

    vf = evaluate_all(f)
    order, ties = _order_profile(vf)

    best: int | None = None
    for coeffs in itertools.product(range(-radius, radius + 1), repeat=n_params):
        if cls is FunctionClass.LINEAR:
            values = [sum(c * v for c, v in zip(coeffs, x)) for x in points]
        else:
            alpha, beta = coeffs[: box.n], coeffs[box.n :]
            values = [
                sum(a * v * v + b * v for a, b, v in zip(alpha, beta, x))
                for x in points
            ]
        if not _profiles_match(order, ties, values):
            continue
        gap = values[order[-1]] - values[order[0]]
        if best is None or gap < best:
            best = gap
    return best
