"""Equivalence-enforcing scalable LPs for each function class, and the
existence-route reduction built on top of them."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from . import bounds as bounds_mod
from .lp import Constraint, LPProblem, Rel, Vertex, simplex_min, vertex_to_integer
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
    enumerate_points,
    evaluate,
    gap_of,
)
from .oracle import check_class, check_equivalent


class BuildMode(Enum):
    FULL = "full"
    PRUNED = "pruned"


@dataclass(frozen=True)
class Encoding:
    """Column layout translating a function class into LP decision variables.

    The non-gap columns carry the class parameters (coefficients, increments,
    or monomial multipliers); the last column is the gap variable.
    """

    cls: FunctionClass
    box: BoxDomain

    @property
    def coeff_cols(self) -> int:
        n, N = self.box.n, self.box.N
        if self.cls is FunctionClass.LINEAR:
            return n
        if self.cls is FunctionClass.SEPARABLE:
            return 2 * n * N
        if self.cls is FunctionClass.SEPARABLE_QUADRATIC:
            return 2 * n
        if self.cls is FunctionClass.QUADRATIC:
            return n * (n + 3) // 2
        raise ValueError(f"unsupported class {self.cls!r}")

    @property
    def d(self) -> int:
        return self.coeff_cols + 1

    @property
    def gap_col(self) -> int:
        return self.coeff_cols

    @property
    def meta_a(self) -> int:
        N = self.box.N
        if self.cls is FunctionClass.LINEAR:
            return 2 * N
        if self.cls is FunctionClass.SEPARABLE:
            return 1
        return 2 * N * N

    def increment_col(self, i: int, k: int) -> int:
        """Column of the separable increment variable for step k-1 -> k."""
        N = self.box.N
        if not (-N + 1 <= k <= N):
            raise ValueError("increment index out of range")
        return i * 2 * N + (k + N - 1)

    def row_of(self, x: Sequence[int]) -> dict[int, Fraction]:
        """Sparse coefficients expressing g(x) as a linear form in the columns."""
        n, N = self.box.n, self.box.N
        row: dict[int, Fraction] = {}
        if self.cls is FunctionClass.LINEAR:
            for i, v in enumerate(x):
                if v:
                    row[i] = Fraction(v)
        elif self.cls is FunctionClass.SEPARABLE:
            for i, v in enumerate(x):
                for k in range(-N + 1, v + 1):
                    row[self.increment_col(i, k)] = Fraction(1)
        elif self.cls is FunctionClass.SEPARABLE_QUADRATIC:
            for i, v in enumerate(x):
                if v:
                    row[2 * i] = Fraction(v * v)
                    row[2 * i + 1] = Fraction(v)
        elif self.cls is FunctionClass.QUADRATIC:
            for i, v in enumerate(x):
                if v:
                    row[i] = Fraction(v)
            pos = n
            for i in range(n):
                for j in range(i, n):
                    prod = x[i] * x[j]
                    if prod:
                        row[pos] = Fraction(prod)
                    pos += 1
        else:
            raise ValueError(f"unsupported class {self.cls!r}")
        return row

    def encode_function(self, f: FunctionSpec) -> list[Fraction]:
        """The coefficient vector that makes row_of(x) reproduce f's values.

        For separable f the encoding drops the per-coordinate offsets
        f_i(-N); differences g(x) - g(y) are unaffected.
        """
        if f.function_class is not self.cls or f.box != self.box:
            raise ValueError("function does not match this encoding")
        if isinstance(f, LinearFn):
            return list(f.coeffs)
        if isinstance(f, SeparableFn):
            return [v for row in f.increment_rows() for v in row]
        if isinstance(f, SepQuadFn):
            out = []
            for a, b in zip(f.alpha, f.beta):
                out.extend((a, b))
            return out
        if isinstance(f, QuadFn):
            return list(f.beta) + list(f.alpha)
        raise ValueError(f"unsupported function {type(f).__name__}")

    def decode(
        self, solution: Sequence, shape: Sequence[Shape] | None = None
    ) -> FunctionSpec:
        """Rebuild a canonical FunctionSpec from an integer solution vector."""
        vals = [Fraction(v) for v in solution[: self.coeff_cols]]
        if len(vals) != self.coeff_cols:
            raise ValueError("solution vector too short for this encoding")
        n, N = self.box.n, self.box.N
        if self.cls is FunctionClass.LINEAR:
            return LinearFn(self.box, tuple(vals))
        if self.cls is FunctionClass.SEPARABLE:
            rows = []
            for i in range(n):
                incs = vals[i * 2 * N : (i + 1) * 2 * N]
                row = [Fraction(0)]
                for h in incs:
                    row.append(row[-1] + h)
                rows.append(tuple(row))
            g = SeparableFn(self.box, tuple(rows), shape or ())
            if shape and not check_class(g, FunctionClass.SEPARABLE, shape):
                raise ValueError("decoded tables violate the requested shape flags")
            return g
        if self.cls is FunctionClass.SEPARABLE_QUADRATIC:
            alpha = tuple(vals[2 * i] for i in range(n))
            beta = tuple(vals[2 * i + 1] for i in range(n))
            g = SepQuadFn(self.box, alpha, beta, (Fraction(0),) * n, shape or ())
            if shape and not check_class(g, FunctionClass.SEPARABLE_QUADRATIC, shape):
                raise ValueError("decoded multipliers violate the requested shape flags")
            return g
        if self.cls is FunctionClass.QUADRATIC:
            return QuadFn(self.box, tuple(vals[n:]), tuple(vals[:n]), Fraction(0))
        raise ValueError(f"unsupported class {self.cls!r}")


def encode(cls: FunctionClass, box: BoxDomain) -> Encoding:
    if cls is None:
        raise ValueError("table functions have no LP encoding")
    return Encoding(cls, box)


def _sub(a: dict[int, Fraction], b: dict[int, Fraction]) -> dict[int, Fraction]:
    out = dict(a)
    for j, v in b.items():
        out[j] = out.get(j, Fraction(0)) - v
        if out[j] == 0:
            del out[j]
    return out


def _gap_row(enc: Encoding, hi: dict[int, Fraction], lo: dict[int, Fraction]) -> Constraint:
    """g_gap - [g(x_hi) - g(x_lo)] >= 0."""
    row = _sub({enc.gap_col: Fraction(1)}, _sub(hi, lo))
    return Constraint(row, Rel.GE, 0)


def _shape_rows(enc: Encoding, shape: Sequence[Shape]) -> list[Constraint]:
    rows: list[Constraint] = []
    N = enc.box.N
    for i, flag in enumerate(shape):
        if flag is Shape.FREE:
            continue
        if enc.cls is FunctionClass.SEPARABLE:
            for k in range(-N + 1, N):
                lo, hi = enc.increment_col(i, k), enc.increment_col(i, k + 1)
                if flag is Shape.CONVEX:
                    rows.append(Constraint({hi: 1, lo: -1}, Rel.GE, 0))
                else:
                    rows.append(Constraint({lo: 1, hi: -1}, Rel.GE, 0))
        elif enc.cls is FunctionClass.SEPARABLE_QUADRATIC:
            sign = 1 if flag is Shape.CONVEX else -1
            rows.append(Constraint({2 * i: sign}, Rel.GE, 0))
        else:
            raise ValueError("shape flags only apply to the separable classes")
    return rows


def build_lp(
    f: FunctionSpec,
    box: BoxDomain | None = None,
    enc: Encoding | None = None,
    mode: BuildMode = BuildMode.PRUNED,
    max_points: int | None = None,
) -> LPProblem:
    """Build the scalable feasibility LP whose integer points are equivalent
    functions; minimizing the gap column.

    PRUNED sorts the box by f-value and emits one equivalence row per
    consecutive pair plus a single top-minus-bottom gap row; FULL emits the
    whole quadratic family.  Both describe the same polyhedron.
    """
    box = box or f.box
    if box != f.box:
        raise ValueError("box must match the function's box")
    enc = enc or encode(f.function_class, box)
    if enc.cls is not f.function_class or enc.box != box:
        raise ValueError("encoding does not match the function")

    shape = getattr(f, "shape", ())
    if shape and not check_class(f, f.function_class, shape):
        raise ValueError("function violates its own shape flags")

    points = list(enumerate_points(box, max_points))
    values = []
    for p in points:
        v = evaluate(f, p)
        if v.denominator != 1:
            raise ValueError("build_lp requires an integer-valued (canonical) function")
        values.append(v)
    coeff_rows = [enc.row_of(p) for p in points]

    constraints: list[Constraint] = []
    if mode is BuildMode.PRUNED:
        order = sorted(range(len(points)), key=lambda i: (values[i], points[i]))
        for t in range(len(order) - 1):
            i, j = order[t], order[t + 1]
            diff = _sub(coeff_rows[j], coeff_rows[i])
            if values[i] == values[j]:
                constraints.append(Constraint(diff, Rel.EQ, 0))
            else:
                constraints.append(Constraint(diff, Rel.GE, 1))
        top, bottom = order[-1], order[0]
        constraints.append(_gap_row(enc, coeff_rows[top], coeff_rows[bottom]))
    elif mode is BuildMode.FULL:
        for i in range(len(points)):
            for j in range(len(points)):
                if i != j:
                    constraints.append(_gap_row(enc, coeff_rows[i], coeff_rows[j]))
        for i in range(len(points)):
            for j in range(i + 1, len(points)):
                if values[i] > values[j]:
                    constraints.append(
                        Constraint(_sub(coeff_rows[i], coeff_rows[j]), Rel.GE, 1)
                    )
                elif values[i] < values[j]:
                    constraints.append(
                        Constraint(_sub(coeff_rows[j], coeff_rows[i]), Rel.GE, 1)
                    )
                else:
                    constraints.append(
                        Constraint(_sub(coeff_rows[i], coeff_rows[j]), Rel.EQ, 0)
                    )
    else:
        raise ValueError(f"unknown build mode {mode!r}")

    constraints.extend(_shape_rows(enc, shape))
    return LPProblem(
        d=enc.d,
        constraints=tuple(constraints),
        objective=enc.gap_col,
        meta_a=enc.meta_a,
    )


def reduce_via_lp(
    f: FunctionSpec,
    mode: BuildMode = BuildMode.PRUNED,
    max_points: int | None = None,
) -> tuple[FunctionSpec, Certificate]:
    """Existence-route reduction: solve the equivalence LP to an optimal
    vertex, scale it to integers, and decode a same-class equivalent function.
    """
    fc = canonicalize(f)
    enc = encode(fc.function_class, fc.box)
    lp = build_lp(fc, fc.box, enc, mode, max_points)

    values = [evaluate(fc, p) for p in enumerate_points(fc.box, max_points)]
    f_gap = max(values) - min(values)
    start = [Fraction(v) for v in enc.encode_function(fc)] + [f_gap]

    result = simplex_min(lp, start=start)
    if not isinstance(result, Vertex):
        raise RuntimeError(
            f"equivalence LP must be solvable (f itself is feasible); got {result}"
        )
    solution = vertex_to_integer(result, lp)
    shape = getattr(fc, "shape", None)
    g = enc.decode(solution[: enc.coeff_cols], shape)

    verdict = check_equivalent(f, g, max_points)
    gap = gap_of(g, max_points)
    assert gap.denominator == 1
    cert = Certificate(
        method=ReduceMethod.LP,
        gap=int(gap),
        bound=bounds_mod.dfact_bound(enc.d, enc.meta_a),
        verified=verdict.equivalent,
        counterexample=(
            None
            if verdict.equivalent
            else (verdict.counterexample.x, verdict.counterexample.y)
        ),
    )
    return g, cert
