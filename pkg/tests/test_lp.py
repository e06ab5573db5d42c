import random
from fractions import Fraction

import pytest

from gapforge.lp import (
    Constraint,
    INFEASIBLE,
    LPProblem,
    Rel,
    UNBOUNDED,
    Vertex,
    check_scalable,
    simplex_min,
    vertex_to_integer,
)


def ge(coeffs, rhs=0):
    return Constraint(coeffs, Rel.GE, rhs)


def eq(coeffs, rhs=0):
    return Constraint(coeffs, Rel.EQ, rhs)


def test_check_scalable():
    lp = LPProblem(2, (ge({0: 1}, 1), ge({1: 1, 0: -1}, 0)), objective=1, meta_a=1)
    assert check_scalable(lp)
    assert not check_scalable(LPProblem(1, (ge({0: 1}, -1),), objective=0, meta_a=1))
    assert not check_scalable(LPProblem(1, (eq({0: 1}, 1),), objective=0, meta_a=1))


def test_simplex_optimal_vertex():
    # min gap s.t. gap - 2 g1 >= 0, g1 >= 1
    lp = LPProblem(2, (ge({1: 1, 0: -2}, 0), ge({0: 1}, 1)), objective=1, meta_a=2)
    v = simplex_min(lp)
    assert isinstance(v, Vertex)
    assert v.coords == (1, 2)
    assert v.tight_rows == (0, 1)


def test_simplex_infeasible():
    lp = LPProblem(1, (ge({0: 1}, 1), ge({0: -1}, 0)), objective=0, meta_a=1)
    assert simplex_min(lp) is INFEASIBLE


def test_simplex_unbounded():
    lp = LPProblem(1, (ge({0: 1}, 0),), objective={0: -1}, meta_a=1)
    assert simplex_min(lp) is UNBOUNDED


def test_simplex_warm_start_matches_cold():
    lp = LPProblem(
        2,
        (ge({1: 1, 0: -2}, 0), ge({0: 1}, 1), ge({1: 1}, 0)),
        objective=1,
        meta_a=2,
    )
    cold = simplex_min(lp)
    warm = simplex_min(lp, start=(Fraction(5), Fraction(12)))
    assert isinstance(cold, Vertex) and isinstance(warm, Vertex)
    assert cold.coords[1] == warm.coords[1] == 2


def test_simplex_rejects_infeasible_start():
    lp = LPProblem(1, (ge({0: 1}, 1),), objective=0, meta_a=1)
    with pytest.raises(ValueError):
        simplex_min(lp, start=(Fraction(0),))


def test_vertex_satisfies_all_constraints_exactly():
    rng = random.Random(3)
    for _ in range(30):
        d = rng.randint(1, 4)
        x0 = [Fraction(rng.randint(-5, 5)) for _ in range(d)]
        rows = []
        for _ in range(rng.randint(d, 2 * d + 3)):
            coeffs = {j: rng.randint(-3, 3) for j in range(d)}
            coeffs = {j: c for j, c in coeffs.items() if c}
            if not coeffs:
                continue
            val = sum(c * x0[j] for j, c in coeffs.items())
            rows.append(ge(coeffs, val - rng.randint(0, 4)))
        # box rows keep the feasible set a polytope, so an optimal vertex exists
        for j in range(d):
            rows.append(ge({j: 1}, x0[j] - 10))
            rows.append(ge({j: -1}, -x0[j] - 10))
        lp = LPProblem(d, tuple(rows), objective=0, meta_a=100)
        res = simplex_min(lp)
        assert isinstance(res, Vertex)
        for row in lp.constraints:
            total = sum(row.coeffs[j] * res.coords[j] for j in row.coeffs)
            assert total >= row.rhs if row.rel is Rel.GE else total == row.rhs
        assert len(res.tight_rows) == d
        # tight rows are actually tight
        for i in res.tight_rows:
            row = lp.constraints[i]
            assert sum(row.coeffs[j] * res.coords[j] for j in row.coeffs) == row.rhs
        # warm start from the generator point agrees on the optimum value
        warm = simplex_min(lp, start=x0)
        assert isinstance(warm, Vertex)
        assert warm.coords[0] == res.coords[0]


def _tight_matrix_invertible(lp, v):
    d = lp.d
    rows = []
    for i in v.tight_rows:
        dense = [Fraction(0)] * d
        for j, c in lp.constraints[i].coeffs.items():
            dense[j] = c
        rows.append(dense)
    # Gaussian elimination rank
    rank = 0
    for col in range(d):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank == d


def test_tight_rows_form_invertible_basis():
    lp = LPProblem(
        2,
        (ge({1: 1, 0: -2}, 0), ge({0: 1}, 1), ge({0: 1, 1: 1}, 0)),
        objective=1,
        meta_a=2,
    )
    v = simplex_min(lp)
    assert _tight_matrix_invertible(lp, v)


def test_vertex_to_integer_examples():
    # vertex (3/2, 1/2): x0 = 3 x1, x0 + x1 >= 2, minimize x0
    lp = LPProblem(2, (eq({0: 1, 1: -3}, 0), ge({0: 1, 1: 1}, 2)), objective=0, meta_a=3)
    v = simplex_min(lp)
    assert v.coords == (Fraction(3, 2), Fraction(1, 2))
    assert vertex_to_integer(v, lp) == (3, 1)

    # integer vertex stays as is
    lp2 = LPProblem(2, (ge({0: 1}, 2), ge({1: 1}, 4)), objective={0: 1, 1: 1}, meta_a=4)
    v2 = simplex_min(lp2)
    assert v2.coords == (2, 4)
    assert vertex_to_integer(v2, lp2) == (2, 4)

    # vertex (1/3, 1/6): x0 = 2 x1, x0 + x1 >= 1/2
    lp3 = LPProblem(
        2,
        (eq({0: 1, 1: -2}, 0), ge({0: 1, 1: 1}, Fraction(1, 2))),
        objective=0,
        meta_a=2,
    )
    v3 = simplex_min(lp3)
    assert v3.coords == (Fraction(1, 3), Fraction(1, 6))
    assert vertex_to_integer(v3, lp3) == (2, 1)


def test_vertex_to_integer_requires_scalable():
    lp = LPProblem(1, (ge({0: 1}, -1),), objective=0, meta_a=1)
    v = simplex_min(lp)
    assert isinstance(v, Vertex)
    with pytest.raises(ValueError):
        vertex_to_integer(v, lp)


def test_integer_solution_respects_cramer_ceiling():
    import math

    rng = random.Random(5)
    for _ in range(20):
        d = rng.randint(1, 3)
        a = rng.randint(1, 4)
        x0 = [Fraction(rng.randint(0, 3)) for _ in range(d)]
        rows = []
        for _ in range(d + rng.randint(1, 3)):
            coeffs = {j: rng.randint(-a, a) for j in range(d)}
            coeffs = {j: c for j, c in coeffs.items() if c}
            if not coeffs:
                continue
            val = sum(c * x0[j] for j, c in coeffs.items())
            if val < 0:
                coeffs = {j: -c for j, c in coeffs.items()}
                val = -val
            rhs = rng.randint(0, min(a, int(val))) if val >= 1 else 0
            rows.append(ge(coeffs, rhs))
        # x_j >= 0 keeps the polyhedron pointed and the objective bounded
        for j in range(d):
            rows.append(ge({j: 1}, 0))
        lp = LPProblem(d, tuple(rows), objective=0, meta_a=a)
        assert check_scalable(lp)
        res = simplex_min(lp, start=x0)
        assert isinstance(res, Vertex)
        w = vertex_to_integer(res, lp)
        ceiling = math.factorial(d) * a**d
        assert all(abs(entry) <= ceiling for entry in w)


def test_meta_a_invariant_enforced():
    with pytest.raises(ValueError):
        LPProblem(1, (ge({0: 5}, 0),), objective=0, meta_a=2)
    # rational coefficients are measured after clearing to integers
    LPProblem(1, (ge({0: Fraction(1, 2)}, 0),), objective=0, meta_a=1)
    with pytest.raises(ValueError):
        LPProblem(1, (ge({0: Fraction(3, 2)}, 0),), objective=0, meta_a=2)
