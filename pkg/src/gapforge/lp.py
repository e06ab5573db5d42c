"""Exact rational feasibility/optimization LPs in row form (A x >= b, A x = b).

The solver returns optimal basic feasible solutions ("vertices") with the
tight rows recorded, computed entirely in exact rational arithmetic with
anti-cycling pivoting.  gmpy2's mpq is used internally when available; the
public surface speaks fractions.Fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .model import as_rational

try:  # pragma: no cover - exercised implicitly
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

_ZERO = _Q(0)
_ONE = _Q(1)

# Switch to Bland's rule after this many consecutive degenerate pivots.
_STALL_LIMIT = 30
_MAX_PIVOTS = 10**6


class Rel(Enum):
    GE = ">="
    EQ = "="


class LPOutcome(Enum):
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


INFEASIBLE = LPOutcome.INFEASIBLE
UNBOUNDED = LPOutcome.UNBOUNDED


@dataclass(frozen=True)
class Constraint:
    """One row: sum_j coeffs[j] * x_j  rel  rhs, with a sparse coefficient map."""

    coeffs: Mapping[int, Fraction]
    rel: Rel
    rhs: Fraction

    def __post_init__(self):
        clean = {
            int(j): as_rational(c) for j, c in self.coeffs.items() if as_rational(c) != 0
        }
        if any(j < 0 for j in clean):
            raise ValueError("column indices must be nonnegative")
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "rhs", as_rational(self.rhs))

    def key(self) -> tuple:
        return (self.rel, self.rhs, tuple(sorted(self.coeffs.items())))


@dataclass(frozen=True)
class LPProblem:
    """Row-form LP: minimize the objective over {x : constraints hold}.

    ``objective`` is normally the index of the column to minimize; a sparse
    cost map is also accepted for general objectives.  ``meta_a`` declares the
    bound on integer-cleared coefficient magnitudes used by the vertex-scaling
    guarantees.
    """

    d: int
    constraints: tuple[Constraint, ...]
    objective: Union[int, Mapping[int, Fraction]]
    meta_a: int

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.d < 1:
            raise ValueError("need at least one column")
        if self.meta_a < 1:
            raise ValueError("meta_a must be a positive integer")
        if isinstance(self.objective, int):
            if not 0 <= self.objective < self.d:
                raise ValueError("objective column out of range")
        else:
            if any(not 0 <= j < self.d for j in self.objective):
                raise ValueError("objective column out of range")
        for row in self.constraints:
            if any(j >= self.d for j in row.coeffs):
                raise ValueError("constraint column out of range")
            scale = 1
            for v in list(row.coeffs.values()) + [row.rhs]:
                scale = scale * v.denominator // math.gcd(scale, v.denominator)
            entries = [abs(v * scale) for v in row.coeffs.values()]
            entries.append(abs(row.rhs * scale))
            if entries and max(entries) > self.meta_a:
                raise ValueError(
                    f"integer-cleared coefficient exceeds declared bound a={self.meta_a}"
                )

    def objective_vector(self) -> list[Fraction]:
        c = [Fraction(0)] * self.d
        if isinstance(self.objective, int):
            c[self.objective] = Fraction(1)
        else:
            for j, v in self.objective.items():
                c[j] = as_rational(v)
        return c


@dataclass(frozen=True)
class Vertex:
    """A basic feasible solution: coordinates plus d independent tight rows."""

    coords: tuple[Fraction, ...]
    tight_rows: tuple[int, ...]


def check_scalable(lp: LPProblem) -> bool:
    """Sufficient structural test: alpha*x stays feasible for every alpha >= 1.

    Holds when every equality row has zero right hand side and every
    inequality is >= with nonnegative right hand side.
    """
    for row in lp.constraints:
        if row.rel is Rel.EQ and row.rhs != 0:
            return False
        if row.rel is Rel.GE and row.rhs < 0:
            return False
    return True


# ---------------------------------------------------------------------------
# internal exact linear algebra (dense, small dimension)


def _dot(a: Sequence, b: Sequence):
    total = _ZERO
    for u, v in zip(a, b):
        total += u * v
    return total


def _solve_square(mat: Sequence[Sequence], rhs: Sequence):
    """Solve mat @ x = rhs exactly; None if the matrix is singular."""
    d = len(mat)
    aug = [list(row) + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(d):
        pivot = next((r for r in range(col, d) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        for r in range(d):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col] / pv
                arow, prow = aug[r], aug[col]
                for k in range(col, d + 1):
                    arow[k] -= factor * prow[k]
    return [aug[i][d] / aug[i][i] for i in range(d)]


def _echelon(rows: Sequence[Sequence], d: int):
    """Row echelon over given rows; returns (reduced rows, pivot cols, source idx)."""
    ech: list[list] = []
    pivot_cols: list[int] = []
    sources: list[int] = []
    for src, row in enumerate(rows):
        r = list(row)
        for er, pc in zip(ech, pivot_cols):
            if r[pc] != 0:
                factor = r[pc] / er[pc]
                for k in range(d):
                    r[k] -= factor * er[k]
        for c in range(d):
            if r[c] != 0:
                ech.append(r)
                pivot_cols.append(c)
                sources.append(src)
                break
    return ech, pivot_cols, sources


def _null_vector(ech, pivot_cols, d):
    """A nonzero vector in the null space of the echelon rows; None if full rank."""
    free = next((c for c in range(d) if c not in pivot_cols), None)
    if free is None:
        return None
    z = [_ZERO] * d
    z[free] = _ONE
    for row, pc in zip(reversed(ech), reversed(pivot_cols)):
        s = _dot(row, z)
        z[pc] -= s / row[pc]
    return z


# ---------------------------------------------------------------------------
# solver core


class _Rows:
    """Dense, deduplicated view of an LPProblem in kernel arithmetic."""

    def __init__(self, lp: LPProblem):
        self.d = lp.d
        self.a: list[list] = []
        self.b: list = []
        self.rel: list[Rel] = []
        self.orig: list[int] = []  # representative original row index
        seen: dict[tuple, int] = {}
        for idx, row in enumerate(lp.constraints):
            key = row.key()
            if key in seen:
                continue
            seen[key] = idx
            dense = [_ZERO] * lp.d
            for j, v in row.coeffs.items():
                dense[j] = _Q(v)
            self.a.append(dense)
            self.b.append(_Q(row.rhs))
            self.rel.append(row.rel)
            self.orig.append(idx)
        self.m = len(self.a)
        self.c = [_Q(v) for v in lp.objective_vector()]

    def slack(self, i: int, x) -> object:
        return _dot(self.a[i], x) - self.b[i]

    def is_feasible(self, x) -> bool:
        for i in range(self.m):
            s = self.slack(i, x)
            if self.rel[i] is Rel.EQ:
                if s != 0:
                    return False
            elif s < 0:
                return False
        return True


def _phase1_feasible_point(rows: _Rows):
    """Feasibility via a standard phase-1 tableau (split free variables).

    Returns a feasible point (list of kernel rationals) or None.
    """
    d, m = rows.d, rows.m
    n_ge = sum(1 for r in rows.rel if r is Rel.GE)
    # columns: u+ (d), u- (d), one slack/surplus per GE row, artificials
    cols = 2 * d + n_ge
    art_of_row: dict[int, int] = {}
    body: list[list] = []
    rhs: list = []
    ge_seen = 0
    for i in range(m):
        a, b = rows.a[i], rows.b[i]
        flip = False
        if rows.rel[i] is Rel.GE:
            if b <= 0:
                flip = True  # becomes (-a) x + s = -b with slack basic
        else:
            if b < 0:
                flip = True
        sign = -1 if flip else 1
        row = [sign * v for v in a] + [-sign * v for v in a] + [_ZERO] * n_ge
        if rows.rel[i] is Rel.GE:
            row[2 * d + ge_seen] = _ONE if flip else -_ONE
            ge_seen += 1
        if not (rows.rel[i] is Rel.GE and flip):
            art_of_row[i] = cols
            cols += 1
        body.append(row)
        rhs.append(sign * b)
    n_art = cols - (2 * d + n_ge)
    if n_art:
        for i in range(m):
            body[i].extend([_ZERO] * n_art)
            if i in art_of_row:
                body[i][art_of_row[i]] = _ONE

    basis = []
    ge_seen = 0
    for i in range(m):
        if rows.rel[i] is Rel.GE and rows.b[i] <= 0:
            basis.append(2 * d + ge_seen)
        if rows.rel[i] is Rel.GE:
            ge_seen += 1
        if i in art_of_row:
            basis.append(art_of_row[i])

    # objective: minimize the sum of artificial columns
    obj = [_ZERO] * cols
    for col in art_of_row.values():
        obj[col] = _ONE
    obj_val = _ZERO
    for i, bv in enumerate(basis):
        if obj[bv] != 0:
            coeff = obj[bv]
            for k in range(cols):
                obj[k] -= coeff * body[i][k]
            obj_val -= coeff * rhs[i]

    stall = 0
    for _ in range(_MAX_PIVOTS):
        use_bland = stall > _STALL_LIMIT
        enter = None
        if use_bland:
            enter = next((j for j in range(cols) if obj[j] < 0), None)
        else:
            best = _ZERO
            for j in range(cols):
                if obj[j] < best:
                    best = obj[j]
                    enter = j
        if enter is None:
            break
        leave = None
        best_ratio = None
        for i in range(m):
            aij = body[i][enter]
            if aij > 0:
                ratio = rhs[i] / aij
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave is None:
            raise ArithmeticError("phase-1 objective is bounded below; no pivot row")
        stall = stall + 1 if best_ratio == 0 else 0
        pv = body[leave][enter]
        lrow = body[leave]
        for k in range(cols):
            lrow[k] /= pv
        rhs[leave] /= pv
        for i in range(m):
            if i != leave and body[i][enter] != 0:
                f = body[i][enter]
                irow = body[i]
                for k in range(cols):
                    irow[k] -= f * lrow[k]
                rhs[i] -= f * rhs[leave]
        if obj[enter] != 0:
            f = obj[enter]
            for k in range(cols):
                obj[k] -= f * lrow[k]
            obj_val -= f * rhs[leave]
        basis[leave] = enter
    else:
        raise ArithmeticError("phase-1 pivot limit exceeded")

    if obj_val != 0:  # residual infeasibility (obj_val is the negated optimum)
        return None
    x = [_ZERO] * d
    for i, bv in enumerate(basis):
        if bv < d:
            x[bv] += rhs[i]
        elif bv < 2 * d:
            x[bv - d] -= rhs[i]
    return x


def _tight_set(rows: _Rows, x) -> list[int]:
    return [i for i in range(rows.m) if rows.slack(i, x) == 0]


def _basis_order(rows: _Rows, tight: list[int]) -> list[int]:
    # equality rows first so the basis keeps a maximal independent EQ subset
    return sorted(tight, key=lambda i: (rows.rel[i] is not Rel.EQ, i))


def _ratio_step(rows: _Rows, x, z, skip: set[int]):
    """Largest feasible step along z; returns (t, blocking row) or (None, None)."""
    t_best = None
    row_best = None
    for j in range(rows.m):
        if j in skip:
            continue
        az = _dot(rows.a[j], z)
        if az < 0:
            t = -rows.slack(j, x) / az
            if t_best is None or t < t_best or (t == t_best and j < row_best):
                t_best = t
                row_best = j
    return t_best, row_best


def _purify(rows: _Rows, x):
    """Move a feasible point to a vertex without increasing the objective.

    Returns (x, ordered basis rows) or UNBOUNDED when a decreasing feasible
    ray is found on the way.
    """
    for _ in range(rows.d + 1):
        tight = _tight_set(rows, x)
        ordered = _basis_order(rows, tight)
        ech, pivots, sources = _echelon([rows.a[i] for i in ordered], rows.d)
        if len(pivots) == rows.d:
            return x, [ordered[s] for s in sources]
        z = _null_vector(ech, pivots, rows.d)
        cz = _dot(rows.c, z)
        if cz > 0:
            z = [-v for v in z]
            cz = -cz
        tset = set(tight)
        t, _ = _ratio_step(rows, x, z, tset)
        if t is None:
            if cz < 0:
                return UNBOUNDED
            z = [-v for v in z]
            t, _ = _ratio_step(rows, x, z, tset)
            if t is None:
                raise ArithmeticError(
                    "feasible set contains a line; no vertex exists (rank < d)"
                )
        x = [xv + t * zv for xv, zv in zip(x, z)]
    raise AssertionError("purification failed to reach full rank")


def _active_set_min(rows: _Rows, x, basis: list[int]):
    """Vertex-to-vertex descent; Dantzig pricing with a Bland fallback."""
    d = rows.d
    stall = 0
    for _ in range(_MAX_PIVOTS):
        mat = [rows.a[i] for i in basis]
        lam = _solve_square([[mat[r][c] for r in range(d)] for c in range(d)], rows.c)
        if lam is None:
            raise AssertionError("basis matrix became singular")
        use_bland = stall > _STALL_LIMIT
        leave_pos = None
        best = _ZERO
        for pos, i in enumerate(basis):
            if rows.rel[i] is Rel.EQ:
                continue
            if lam[pos] < 0:
                if use_bland:
                    if leave_pos is None or i < basis[leave_pos]:
                        leave_pos = pos
                elif lam[pos] < best:
                    best = lam[pos]
                    leave_pos = pos
        if leave_pos is None:
            coords = tuple(_to_fraction(v) for v in x)
            return coords, sorted(basis)
        rhs_e = [_ZERO] * d
        rhs_e[leave_pos] = _ONE
        z = _solve_square(mat, rhs_e)
        t, enter = _ratio_step(rows, x, z, set(basis))
        if t is None:
            return UNBOUNDED
        stall = stall + 1 if t == 0 else 0
        x = [xv + t * zv for xv, zv in zip(x, z)]
        basis = basis[:leave_pos] + basis[leave_pos + 1 :] + [enter]
    raise ArithmeticError("active-set pivot limit exceeded")


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    return Fraction(int(v.numerator), int(v.denominator))


def simplex_min(
    lp: LPProblem, start: Sequence[Fraction] | None = None
) -> Union[Vertex, LPOutcome]:
    """Minimize the objective; return an optimal Vertex, INFEASIBLE or UNBOUNDED.

    ``start`` may supply a known feasible point, which skips phase 1 (the
    point is first purified to a basic feasible solution).
    """
    rows = _Rows(lp)
    if start is not None:
        x = [_Q(as_rational(v)) for v in start]
        if len(x) != lp.d:
            raise ValueError("start point has wrong dimension")
        if not rows.is_feasible(x):
            raise ValueError("start point is not feasible")
    else:
        x = _phase1_feasible_point(rows)
        if x is None:
            return INFEASIBLE
    purified = _purify(rows, x)
    if purified is UNBOUNDED:
        return UNBOUNDED
    x, basis = purified
    result = _active_set_min(rows, x, basis)
    if result is UNBOUNDED:
        return UNBOUNDED
    coords, basis = result
    tight = tuple(sorted(rows.orig[i] for i in basis))
    return Vertex(coords=coords, tight_rows=tight)


def vertex_to_integer(v: Vertex, lp: LPProblem) -> tuple[int, ...]:
    """Scale a vertex of a scalable LP to an integer feasible solution.

    Multiplies by the lcm of coordinate denominators (which divides the basis
    determinant, so the d! * a^d ceiling of the Cramer bound is preserved) and
    re-verifies feasibility exactly before returning.
    """
    if not check_scalable(lp):
        raise ValueError("integer scaling requires a scalable LP")
    scale = 1
    for c in v.coords:
        scale = scale * c.denominator // math.gcd(scale, c.denominator)
    w = tuple(int(c * scale) for c in v.coords)
    for idx, row in enumerate(lp.constraints):
        total = sum((row.coeffs[j] * w[j] for j in row.coeffs), Fraction(0))
        ok = total == row.rhs if row.rel is Rel.EQ else total >= row.rhs
        if not ok:
            raise ArithmeticError(
                f"scaled vertex violates constraint {idx}; arithmetic fault"
            )
    return w
