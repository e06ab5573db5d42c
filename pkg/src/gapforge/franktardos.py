"""Sign-preserving integer weight reduction in the Frank-Tardos style:
exact LLL lattice reduction, simultaneous Diophantine approximation (SDA),
and the iterative rounding loop combining the per-round approximations.

All lattice work runs on Gram matrices in exact rational arithmetic.  That
matters for the SDA lattice, whose auxiliary last coordinate is irrational
in general but has a rational square, so only inner products are exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .model import SizeGuardExceeded, as_rational

try:  # pragma: no cover
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

# the minimal-denominator scan in sda: only worthwhile in low dimension,
# where the Frank-Tardos output ceilings are tight
_SCAN_DIMS = 3
_SCAN_CAP = 10_000

_SVP_MAX_DIM = 4
_SVP_MAX_COMBOS = 10**6


def _round_nearest(x) -> int:
    """Nearest integer, halves rounded up; exact for any rational type."""
    n, d = x.numerator, x.denominator
    return int((2 * n + d) // (2 * d))


@dataclass(frozen=True)
class LatticeBasis:
    """Square full-rank rational basis, one lattice vector per row."""

    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(as_rational(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        m = len(rows)
        if m == 0 or any(len(r) != m for r in rows):
            raise ValueError("basis must be a nonempty square matrix")
        if _det(rows) == 0:
            raise ValueError("basis rows are linearly dependent")

    @property
    def dim(self) -> int:
        return len(self.rows)


def _det(rows) -> Fraction:
    m = len(rows)
    mat = [list(r) for r in rows]
    det = Fraction(1)
    for col in range(m):
        pivot = next((r for r in range(col, m) if mat[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            mat[col], mat[pivot] = mat[pivot], mat[col]
            det = -det
        det *= mat[col][col]
        for r in range(col + 1, m):
            if mat[r][col] != 0:
                f = mat[r][col] / mat[col][col]
                for k in range(col, m):
                    mat[r][k] -= f * mat[col][k]
    return det


def gram_matrix(rows) -> list[list[Fraction]]:
    return [[sum((a * b for a, b in zip(r1, r2)), Fraction(0)) for r2 in rows] for r1 in rows]


def gram_schmidt_data(gram):
    """(mu, normsq) of the Gram-Schmidt orthogonalization, exactly.

    ``mu[i][j]`` is the projection coefficient for j < i and ``normsq[i]`` the
    squared length of the i-th orthogonalized vector.
    """
    m = len(gram)
    mu = [[Fraction(0)] * m for _ in range(m)]
    normsq = [Fraction(0)] * m
    for i in range(m):
        for j in range(i):
            s = gram[i][j]
            for l in range(j):
                s -= mu[i][l] * mu[j][l] * normsq[l]
            if normsq[j] == 0:
                raise ValueError("rank-deficient input")
            mu[i][j] = s / normsq[j]
        s = gram[i][i]
        for l in range(i):
            s -= mu[i][l] * mu[i][l] * normsq[l]
        normsq[i] = s
    return mu, normsq


def _gram_lll(gram, delta) -> list[list[int]]:
    """LLL on a Gram matrix; returns the unimodular transform, row-wise.

    Incremental mu / normsq updates; the Gram matrix itself is only read once
    for the initial orthogonalization.
    """
    m = len(gram)
    gram = [[_Q(v) for v in row] for row in gram]
    delta = _Q(delta)
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    mu, Bsq = [[_Q(0)] * m for _ in range(m)], [_Q(0)] * m
    for i in range(m):
        for j in range(i):
            s = gram[i][j]
            for l in range(j):
                s -= mu[i][l] * mu[j][l] * Bsq[l]
            mu[i][j] = s / Bsq[j]
        s = gram[i][i]
        for l in range(i):
            s -= mu[i][l] * mu[i][l] * Bsq[l]
        if s <= 0:
            raise ValueError("rank-deficient lattice")
        Bsq[i] = s

    half = _Q(1, 2)

    def reduce_against(k: int, l: int):
        if abs(mu[k][l]) > half:
            q = _round_nearest(mu[k][l])
            U[k] = [a - q * b for a, b in zip(U[k], U[l])]
            for j in range(l):
                mu[k][j] -= q * mu[l][j]
            mu[k][l] -= q

    k = 1
    while k < m:
        reduce_against(k, k - 1)
        if Bsq[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * Bsq[k - 1]:
            U[k], U[k - 1] = U[k - 1], U[k]
            mu_kk = mu[k][k - 1]
            Bnew = Bsq[k] + mu_kk * mu_kk * Bsq[k - 1]
            mu[k][k - 1] = mu_kk * Bsq[k - 1] / Bnew
            Bsq[k] = Bsq[k - 1] * Bsq[k] / Bnew
            Bsq[k - 1] = Bnew
            for j in range(k - 1):
                mu[k][j], mu[k - 1][j] = mu[k - 1][j], mu[k][j]
            for i in range(k + 1, m):
                t = mu[i][k]
                mu[i][k] = mu[i][k - 1] - mu_kk * t
                mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]
            k = max(k - 1, 1)
        else:
            for l in range(k - 2, -1, -1):
                reduce_against(k, l)
            k += 1
    return U


def lll_reduce(basis: LatticeBasis, delta=Fraction(3, 4)) -> LatticeBasis:
    """Exact LLL reduction of a rational basis (same lattice, same order type)."""
    delta = as_rational(delta)
    if not Fraction(1, 4) < delta < 1:
        raise ValueError("delta must lie in (1/4, 1)")
    U = _gram_lll(gram_matrix(basis.rows), delta)
    m = basis.dim
    new_rows = tuple(
        tuple(
            sum((Fraction(U[i][l]) * basis.rows[l][j] for l in range(m)), Fraction(0))
            for j in range(m)
        )
        for i in range(m)
    )
    return LatticeBasis(new_rows)


def is_lll_reduced(basis: LatticeBasis, delta=Fraction(3, 4)) -> bool:
    """Post-hoc exact check of size reduction and the Lovasz condition."""
    delta = as_rational(delta)
    mu, normsq = gram_schmidt_data(gram_matrix(basis.rows))
    m = basis.dim
    for i in range(m):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    for k in range(1, m):
        if normsq[k] < (delta - mu[k][k - 1] ** 2) * normsq[k - 1]:
            return False
    return True


@dataclass(frozen=True)
class SDAResult:
    """One simultaneous approximation: q * w is within eps of the integers p."""

    q: int
    p: tuple[int, ...]
    eps: Fraction

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be a positive integer")


def _sda_scan(w, eps, limit: int):
    for q in range(1, limit + 1):
        p = []
        ok = True
        for v in w:
            target = q * v
            nearest = _round_nearest(target)
            if abs(target - nearest) > eps:
                ok = False
                break
            p.append(nearest)
        if ok:
            return q, p
    return None


def _sda_lattice(w, eps):
    """The classical LLL route: reduce the lattice spanned by the unit rows
    and (-w, t) where t^2 = eps^(2m+2) / 2^(m(m+1)/2), then read (p, q) off
    the first reduced vector.  Only t^2 enters the Gram matrix, so the run is
    exact even when t itself is irrational.
    """
    m = len(w)
    t_sq = _Q(eps) ** (2 * m + 2) / _Q(2) ** (m * (m + 1) // 2)
    gram = [[_Q(int(i == j)) for j in range(m + 1)] for i in range(m + 1)]
    for i in range(m):
        gram[m][i] = gram[i][m] = -_Q(w[i])
    gram[m][m] = sum((_Q(v) * _Q(v) for v in w), _Q(0)) + t_sq
    U = _gram_lll(gram, _Q(3) / 4)
    u = U[0]
    q = u[m]
    if q == 0:
        raise ArithmeticError("LLL returned a q=0 vector; contradicts eps < 1")
    if q < 0:
        u = [-v for v in u]
        q = -q
    p = list(u[:m])
    for i, v in enumerate(w):
        target = q * v
        nearest = _round_nearest(target)
        if abs(target - nearest) < abs(target - p[i]):
            p[i] = nearest
    return q, p


def sda(w: Sequence, eps) -> SDAResult:
    """Find q >= 1 and integers p with |q*w_i - p_i| <= eps for all i and
    q <= 2^(m(m+1)/4) * eps^(-m).

    In low dimension a direct minimal-denominator scan runs first; it can
    only return a q at most the lattice route's, so the ceiling still holds.
    """
    w = [as_rational(v) for v in w]
    eps = as_rational(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    m = len(w)
    support = [i for i, v in enumerate(w) if v != 0]
    if not support:
        return SDAResult(1, (0,) * m, eps)
    sub = [w[i] for i in support]

    found = None
    if len(sub) <= _SCAN_DIMS:
        found = _sda_scan(sub, eps, _SCAN_CAP)
    if found is None:
        found = _sda_lattice(sub, eps)
    q, p_sub = found
    for v, pi in zip(sub, p_sub):
        assert abs(q * v - pi) <= eps, "SDA contract violated; arithmetic fault"
    p = [0] * m
    for slot, val in zip(support, p_sub):
        p[slot] = int(val)
    return SDAResult(int(q), tuple(p), eps)


@dataclass(frozen=True)
class FTResult:
    """Rounds of SDA plus the base-M combination into one integer vector."""

    rounds: tuple[tuple[int, tuple[int, ...]], ...]
    M: int
    wbar: tuple[int, ...]


def ft_weights(w: Sequence, B: int) -> FTResult:
    """Integer weights preserving sign(w . b) for every integer b with
    l1-norm at most B, ties included.

    Each round approximates the inf-norm-normalized residual with accuracy
    1/(B+1), which zeroes at least the maximal coordinate, so there are at
    most dim(w) rounds.  The combination multiplier M dominates the
    contribution of all later rounds: M = 2 B max_{i>=2} |p^(i)|_inf + 1.
    """
    w = [as_rational(v) for v in w]
    if B < 1:
        raise ValueError("B must be a positive integer")
    eps = Fraction(1, B + 1)
    rounds: list[tuple[int, tuple[int, ...]]] = []
    residual = list(w)
    while any(v != 0 for v in residual):
        if len(rounds) == len(w):
            raise ArithmeticError("round count exceeded dimension; arithmetic fault")
        scale = max(abs(v) for v in residual)
        unit = [v / scale for v in residual]
        step = sda(unit, eps)
        rounds.append((step.q, step.p))
        residual = [step.q * u - pi for u, pi in zip(unit, step.p)]

    K = len(rounds)
    tail = max((max(map(abs, p), default=0) for _, p in rounds[1:]), default=0)
    M = 2 * B * tail + 1
    wbar = [0] * len(w)
    for idx, (_, p) in enumerate(rounds):
        weight = M ** (K - 1 - idx)
        for i, pi in enumerate(p):
            wbar[i] += weight * pi
    return FTResult(rounds=tuple(rounds), M=M, wbar=tuple(wbar))


def ft_weights_for_box(w: Sequence, Ntilde: int) -> tuple[int, ...]:
    """Weights equivalent to w as a linear objective on [-Ntilde, Ntilde]^d.

    Differences of box points have l1-norm at most 2 d Ntilde, which is the
    sign budget passed down.  Entries are checked against the normative
    ceiling 2^(d^3) Ntilde^(d^2).
    """
    w = [as_rational(v) for v in w]
    if Ntilde < 1:
        raise ValueError("Ntilde must be a positive integer")
    d = len(w)
    if all(v == 0 for v in w):
        return (0,) * d
    result = ft_weights(w, 2 * d * Ntilde)
    ceiling = 2 ** (d**3) * Ntilde ** (d**2)
    for v in result.wbar:
        if abs(v) > ceiling:
            raise ArithmeticError(
                f"weight {v} exceeds the ceiling {ceiling}; implementation fault"
            )
    return result.wbar


def svp_bruteforce(basis: LatticeBasis, coeff_bound: int) -> tuple[Fraction, ...]:
    """Shortest nonzero vector over integer combinations with bounded
    coefficients; exhaustive test oracle for small bases."""
    m = basis.dim
    if m > _SVP_MAX_DIM:
        raise SizeGuardExceeded(f"svp search limited to dimension {_SVP_MAX_DIM}")
    combos = (2 * coeff_bound + 1) ** m
    if combos > _SVP_MAX_COMBOS:
        raise SizeGuardExceeded(f"{combos} combinations exceed the search cap")
    best = None
    best_norm = None
    for coeffs in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=m):
        if not any(coeffs):
            continue
        vec = tuple(
            sum((c * basis.rows[i][j] for i, c in enumerate(coeffs)), Fraction(0))
            for j in range(m)
        )
        norm = sum((v * v for v in vec), Fraction(0))
        if best_norm is None or norm < best_norm:
            best, best_norm = vec, norm
    return best
