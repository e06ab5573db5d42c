"""Class-specific liftings to linear objectives over larger boxes, their
pullbacks, and the constructive lattice-route reduction built on them."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import bounds as bounds_mod
from .franktardos import ft_weights, ft_weights_for_box
from .model import (
    BoxDomain,
    Certificate,
    FunctionClass,
    FunctionSpec,
    LinearFn,
    QuadFn,
    ReduceMethod,
    SepQuadFn,
    SeparableFn,
    Shape,
    canonicalize,
    evaluate_all,
    gap_of,
)
from .oracle import check_class, check_equivalent


@dataclass(frozen=True)
class QuadIndexMap:
    """Bijection between lifted components beyond n and index pairs i <= j."""

    n: int

    def pair_of(self, k: int) -> tuple[int, int]:
        if not self.n <= k < self.n * (self.n + 3) // 2:
            raise ValueError("component index out of the monomial range")
        rem = k - self.n
        for i in range(self.n):
            block = self.n - i
            if rem < block:
                return i, i + rem
            rem -= block
        raise AssertionError

    def index_of(self, i: int, j: int) -> int:
        return self.n + QuadFn.pair_index(i, j, self.n)


@dataclass(frozen=True)
class LiftedLinear:
    """A linear objective in the lifted dimension, with the box radius and
    l1 sign budget that transfers of equivalence rely on."""

    coeffs: tuple[Fraction, ...]
    Ntilde: int
    budget: int
    cls: FunctionClass

    @property
    def dim(self) -> int:
        return len(self.coeffs)


def lift_separable(f: SeparableFn) -> LiftedLinear:
    """Increments as linear coefficients over the unit cube in dim 2nN."""
    if any(row[0] != 0 for row in f.tables):
        raise ValueError("lift requires the canonical form with f_i(-N) = 0")
    n, N = f.box.n, f.box.N
    coeffs = tuple(v for row in f.increment_rows() for v in row)
    return LiftedLinear(coeffs, Ntilde=1, budget=2 * n * N, cls=FunctionClass.SEPARABLE)


def embed_separable(x: Sequence[int], box: BoxDomain) -> tuple[int, ...]:
    """0/1 prefix indicators: slot (i, k) is 1 iff k <= x_i."""
    out = []
    for v in x:
        out.extend([1] * (v + box.N) + [0] * (box.N - v))
    return tuple(out)


def pullback_separable(
    wbar: Sequence[int], box: BoxDomain, shape: Sequence[Shape] | None = None
) -> SeparableFn:
    """Prefix sums of the weights, anchored at g_i(-N) = 0."""
    n, N = box.n, box.N
    if len(wbar) != 2 * n * N:
        raise ValueError(f"expected {2 * n * N} weights")
    rows = []
    for i in range(n):
        row = [Fraction(0)]
        for h in wbar[i * 2 * N : (i + 1) * 2 * N]:
            row.append(row[-1] + Fraction(h))
        rows.append(tuple(row))
    g = SeparableFn(box, tuple(rows), tuple(shape) if shape else ())
    if shape and not check_class(g, FunctionClass.SEPARABLE, shape):
        raise ValueError("pulled-back tables violate the requested shape flags")
    return g


def lift_sepquad(f: SepQuadFn) -> LiftedLinear:
    """Coefficients (alpha_i, beta_i) interleaved, over [-N^2, N^2]^(2n)."""
    if any(gi != 0 for gi in f.gamma):
        raise ValueError("lift requires the canonical form with f_i(0) = 0")
    n, N = f.box.n, f.box.N
    coeffs = []
    for a, b in zip(f.alpha, f.beta):
        coeffs.extend((a, b))
    return LiftedLinear(
        tuple(coeffs),
        Ntilde=N * N,
        budget=2 * (2 * n) * N * N,
        cls=FunctionClass.SEPARABLE_QUADRATIC,
    )


def embed_sepquad(x: Sequence[int]) -> tuple[int, ...]:
    """(x_i^2, x_i) per coordinate."""
    out = []
    for v in x:
        out.extend((v * v, v))
    return tuple(out)


def pullback_sepquad(
    wbar: Sequence[int], box: BoxDomain, shape: Sequence[Shape] | None = None
) -> SepQuadFn:
    n = box.n
    if len(wbar) != 2 * n:
        raise ValueError(f"expected {2 * n} weights")
    alpha = tuple(Fraction(wbar[2 * i]) for i in range(n))
    beta = tuple(Fraction(wbar[2 * i + 1]) for i in range(n))
    g = SepQuadFn(box, alpha, beta, (Fraction(0),) * n, tuple(shape) if shape else ())
    if shape and not check_class(g, FunctionClass.SEPARABLE_QUADRATIC, shape):
        raise ValueError("pulled-back multipliers violate the requested shape flags")
    return g


def lift_quad(f: QuadFn) -> tuple[LiftedLinear, QuadIndexMap]:
    """First n components carry beta, the rest the upper-triangle alphas."""
    if f.gamma != 0:
        raise ValueError("lift requires the canonical form with gamma = 0")
    n, N = f.box.n, f.box.N
    dim = n * (n + 3) // 2
    lifted = LiftedLinear(
        tuple(f.beta) + tuple(f.alpha),
        Ntilde=N * N,
        budget=2 * dim * N * N,
        cls=FunctionClass.QUADRATIC,
    )
    return lifted, QuadIndexMap(n)


def embed_quad(x: Sequence[int], index_map: QuadIndexMap) -> tuple[int, ...]:
    """x itself followed by the monomials x_i * x_j in pair order."""
    n = index_map.n
    if len(x) != n:
        raise ValueError("point dimension mismatch")
    out = list(x)
    for i in range(n):
        for j in range(i, n):
            out.append(x[i] * x[j])
    return tuple(out)


def pullback_quad(
    wbar: Sequence[int], index_map: QuadIndexMap, box: BoxDomain
) -> QuadFn:
    n = index_map.n
    if box.n != n or len(wbar) != n * (n + 3) // 2:
        raise ValueError("weight vector does not match the index map")
    beta = tuple(Fraction(v) for v in wbar[:n])
    alpha = tuple(Fraction(v) for v in wbar[n:])
    return QuadFn(box, alpha, beta, Fraction(0))


def _sepquad_coord_extrema(a: Fraction, b: Fraction, g: Fraction, N: int):
    """Exact min and max of a k^2 + b k + g over integer k in [-N, N]."""
    candidates = {-N, N}
    if a != 0:
        apex = -b / (2 * a)
        lo = max(-N, min(N, int(apex.__floor__())))
        hi = max(-N, min(N, int(apex.__ceil__())))
        candidates.update((lo, hi))
    vals = [a * k * k + b * k + g for k in candidates]
    return min(vals), max(vals)


def exact_gap(g: FunctionSpec, max_points: int | None = None) -> Fraction:
    """Gap of g, via closed forms where the class admits one.

    LINEAR, SEPARABLE and SEPARABLE_QUADRATIC gaps decompose per coordinate
    and need no box enumeration; QUADRATIC falls back to gap_of.
    """
    if isinstance(g, LinearFn):
        N = g.box.N
        return 2 * N * sum((abs(c) for c in g.coeffs), Fraction(0))
    if isinstance(g, SeparableFn):
        return sum((max(row) - min(row) for row in g.tables), Fraction(0))
    if isinstance(g, SepQuadFn):
        total = Fraction(0)
        for a, b, gm in zip(g.alpha, g.beta, g.gamma):
            lo, hi = _sepquad_coord_extrema(a, b, gm, g.box.N)
            total += hi - lo
        return total
    return gap_of(g, max_points)


def reduce_via_ft(
    f: FunctionSpec, verify: bool = True, max_points: int | None = None
) -> tuple[FunctionSpec, Certificate]:
    """Constructive reduction: lift to a linear objective, reduce the weights
    sign-preservingly, and pull the result back into the class.

    Equivalence transfers because embedded point differences stay inside the
    lift's l1 sign budget.  Verification is the only step that enumerates the
    box; with ``verify=False`` the certificate is marked unverified.
    """
    fc = canonicalize(f)
    cls = fc.function_class
    if cls is None:
        raise ValueError("table functions cannot be reduced class-preservingly")
    shape = getattr(fc, "shape", None)
    if shape and not check_class(fc, cls, shape):
        raise ValueError("function violates its own shape flags")
    n, N = fc.box.n, fc.box.N

    if cls is FunctionClass.LINEAR:
        wbar = ft_weights_for_box(fc.coeffs, N)
        g: FunctionSpec = LinearFn(fc.box, tuple(Fraction(v) for v in wbar))
        lifted_gap = 2 * N * sum(abs(v) for v in wbar)
    elif cls is FunctionClass.SEPARABLE:
        lifted = lift_separable(fc)
        wbar = ft_weights(lifted.coeffs, lifted.budget).wbar
        g = pullback_separable(wbar, fc.box, shape)
        lifted_gap = 2 * lifted.Ntilde * sum(abs(v) for v in wbar)
    elif cls is FunctionClass.SEPARABLE_QUADRATIC:
        lifted = lift_sepquad(fc)
        wbar = ft_weights(lifted.coeffs, lifted.budget).wbar
        g = pullback_sepquad(wbar, fc.box, shape)
        lifted_gap = 2 * lifted.Ntilde * sum(abs(v) for v in wbar)
    elif cls is FunctionClass.QUADRATIC:
        lifted, index_map = lift_quad(fc)
        wbar = ft_weights(lifted.coeffs, lifted.budget).wbar
        g = pullback_quad(wbar, index_map, fc.box)
        lifted_gap = 2 * lifted.Ntilde * sum(abs(v) for v in wbar)
    else:
        raise ValueError(f"unsupported class {cls!r}")

    gap = exact_gap(g, max_points)
    assert gap.denominator == 1
    if gap > lifted_gap:
        raise ArithmeticError("pulled-back gap exceeds the lifted gap; fault")

    verified = False
    counterexample = None
    if verify:
        verdict = check_equivalent(f, g, max_points)
        verified = verdict.equivalent
        if not verified:
            counterexample = (verdict.counterexample.x, verdict.counterexample.y)

    cert = Certificate(
        method=ReduceMethod.FT,
        gap=int(gap),
        bound=bounds_mod.constructive_bound(cls, n, N),
        verified=verified,
        counterexample=counterexample,
    )
    return g, cert
