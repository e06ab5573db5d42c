import itertools
import random
from fractions import Fraction

import pytest

from gapforge.franktardos import (
    FTResult,
    LatticeBasis,
    SDAResult,
    ft_weights,
    ft_weights_for_box,
    gram_matrix,
    gram_schmidt_data,
    is_lll_reduced,
    lll_reduce,
    sda,
    svp_bruteforce,
)
from gapforge.model import BoxDomain, LinearFn
from gapforge.oracle import check_equivalent


def _sign(v):
    return (v > 0) - (v < 0)


def l1_ball(dim, budget):
    """All nonzero integer vectors with l1-norm at most budget."""
    out = []
    for vec in itertools.product(range(-budget, budget + 1), repeat=dim):
        if any(vec) and sum(abs(v) for v in vec) <= budget:
            out.append(vec)
    return out


# --- LLL -------------------------------------------------------------------


def test_lll_identity_unchanged():
    basis = LatticeBasis(((1, 0), (0, 1)))
    assert lll_reduce(basis).rows == ((1, 0), (0, 1))


def test_lll_small_example_reaches_short_vector():
    basis = LatticeBasis(((1, 1), (2, 1)))
    reduced = lll_reduce(basis)
    shortest = svp_bruteforce(basis, 3)
    lam_sq = sum(v * v for v in shortest)
    assert lam_sq == 1
    first_sq = sum(v * v for v in reduced.rows[0])
    assert first_sq <= 2 * lam_sq
    assert is_lll_reduced(reduced)


def test_lll_preserves_gram_determinant():
    def det(rows):
        (a, b), (c, d) = rows
        return a * d - b * c

    basis = LatticeBasis(((3, 7), (2, 5)))
    reduced = lll_reduce(basis)
    g_before = gram_matrix(basis.rows)
    g_after = gram_matrix(reduced.rows)
    assert det(g_before) == det(g_after)


def test_lll_rejects_rank_deficient():
    with pytest.raises(ValueError):
        LatticeBasis(((1, 2), (2, 4)))


def test_lll_contract_on_seeded_integer_bases():
    rng = random.Random(101)
    done = 0
    while done < 25:
        m = rng.randint(2, 4)
        rows = tuple(
            tuple(rng.randint(-50, 50) for _ in range(m)) for _ in range(m)
        )
        try:
            basis = LatticeBasis(rows)
        except ValueError:
            continue
        done += 1
        reduced = lll_reduce(basis)
        assert is_lll_reduced(reduced)
        # unimodular change of basis: same Gram determinant
        mu, normsq = gram_schmidt_data(gram_matrix(reduced.rows))
        assert all(b > 0 for b in normsq)


def test_lll_rational_input():
    basis = LatticeBasis(
        ((Fraction(1, 3), Fraction(1, 7)), (Fraction(2, 5), Fraction(1, 2)))
    )
    reduced = lll_reduce(basis)
    assert is_lll_reduced(reduced)


# --- SDA -------------------------------------------------------------------


def q_ceiling_holds(res: SDAResult, m: int) -> bool:
    # q <= 2^(m(m+1)/4) eps^(-m), compared exactly via fourth powers
    lhs = Fraction(res.q) ** 4 * Fraction(res.eps) ** (4 * m)
    return lhs <= Fraction(2) ** (m * (m + 1))


def test_sda_one_third():
    res = sda((Fraction(1, 3),), Fraction(1, 4))
    assert abs(res.q * Fraction(1, 3) - res.p[0]) <= Fraction(1, 4)
    assert 1 <= res.q <= 5
    assert q_ceiling_holds(res, 1)
    # brute force: q = 3, p = 1 is the only choice with q <= 3
    assert (res.q, res.p) == (3, (1,))


def test_sda_zero_vector():
    res = sda((0, 0), Fraction(1, 2))
    assert res.p == (0, 0)
    assert res.q >= 1


def test_sda_half_half():
    res = sda((Fraction(1, 2), Fraction(1, 2)), Fraction(1, 2))
    for w, p in zip((Fraction(1, 2), Fraction(1, 2)), res.p):
        assert abs(res.q * w - p) <= Fraction(1, 2)
    assert q_ceiling_holds(res, 2)
    # the pair named in the contract is feasible too
    assert all(abs(2 * w - p) == 0 for w, p in zip((Fraction(1, 2),) * 2, (1, 1)))


def test_sda_contract_randomized():
    rng = random.Random(55)
    for _ in range(40):
        m = rng.randint(1, 5)
        w = tuple(
            Fraction(rng.randint(-99, 99), rng.randint(1, 99)) for _ in range(m)
        )
        eps = Fraction(1, rng.choice((4, 16)))
        res = sda(w, eps)
        for wi, pi in zip(w, res.p):
            assert abs(res.q * wi - pi) <= eps
        assert q_ceiling_holds(res, m)


def test_sda_infnorm_coordinate_has_zero_residual():
    rng = random.Random(56)
    for _ in range(20):
        m = rng.randint(2, 4)
        w = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(m)]
        w[rng.randrange(m)] = Fraction(rng.choice((-1, 1)))
        scale = max(abs(v) for v in w)
        unit = [v / scale for v in w]
        res = sda(unit, Fraction(1, 5))
        for u, p in zip(unit, res.p):
            if abs(u) == 1:
                assert res.q * u - p == 0


# --- weight reduction ------------------------------------------------------


def test_ft_scalar():
    res = ft_weights((Fraction(2, 3),), B=5)
    assert res.wbar == (1,)
    assert len(res.rounds) == 1


def test_ft_example_one_seventh():
    w = (Fraction(1), Fraction(1, 7))
    res = ft_weights(w, B=3)
    ball = l1_ball(2, 3)
    assert len(ball) == 24
    for b in ball:
        lhs = sum(wi * bi for wi, bi in zip(w, b))
        rhs = sum(wi * bi for wi, bi in zip(res.wbar, b))
        assert _sign(lhs) == _sign(rhs)


def test_ft_example_small_tail():
    w = (Fraction(1), Fraction(1, 1024))
    res = ft_weights(w, B=2)
    for b in l1_ball(2, 2):
        lhs = sum(wi * bi for wi, bi in zip(w, b))
        rhs = sum(wi * bi for wi, bi in zip(res.wbar, b))
        assert _sign(lhs) == _sign(rhs)
    # the order forces w1 > w2 > 0
    assert res.wbar[0] > res.wbar[1] > 0


def test_ft_sign_preservation_randomized():
    rng = random.Random(77)
    for _ in range(30):
        d = rng.randint(1, 4)
        B = rng.randint(1, 6)
        w = tuple(
            Fraction(rng.randint(-50, 50), rng.randint(1, 50)) for _ in range(d)
        )
        res = ft_weights(w, B)
        assert len(res.rounds) <= d
        assert res.M > 2 * B * max(
            (max(map(abs, p), default=0) for _, p in res.rounds[1:]), default=0
        )
        for b in l1_ball(d, B):
            lhs = sum(wi * bi for wi, bi in zip(w, b))
            rhs = sum(wi * bi for wi, bi in zip(res.wbar, b))
            assert _sign(lhs) == _sign(rhs)


def test_ft_tie_preservation_back_substitution():
    # all-round zero products must reflect a genuine tie in w
    w = (Fraction(2), Fraction(1), Fraction(1))
    res = ft_weights(w, B=4)
    for b in l1_ball(3, 4):
        prods = [sum(pi * bi for pi, bi in zip(p, b)) for _, p in res.rounds]
        if all(v == 0 for v in prods):
            assert sum(wi * bi for wi, bi in zip(w, b)) == 0


def test_ft_positive_scaling_gives_sign_identical_results():
    w = (Fraction(3), Fraction(1, 3))
    for c in (Fraction(1, 2), 5):
        r1 = ft_weights(w, B=3)
        r2 = ft_weights(tuple(c * v for v in w), B=3)
        for b in l1_ball(2, 3):
            s1 = _sign(sum(wi * bi for wi, bi in zip(r1.wbar, b)))
            s2 = _sign(sum(wi * bi for wi, bi in zip(r2.wbar, b)))
            assert s1 == s2


def test_ft_zero_vector():
    res = ft_weights((Fraction(0), Fraction(0)), B=3)
    assert res.wbar == (0, 0)
    assert res.rounds == ()


def test_ft_weights_for_box_scalar():
    assert ft_weights_for_box((Fraction(5),), 3) == (1,)
    assert 2 ** (1**3) * 3 ** (1**2) == 6


def test_ft_weights_for_box_equivalence():
    box = BoxDomain(2, 1)
    w = (Fraction(10), Fraction(1))
    wbar = ft_weights_for_box(w, 1)
    f = LinearFn(box, w)
    g = LinearFn(box, wbar)
    assert check_equivalent(f, g).equivalent
    ceiling = 2 ** (2**3) * 1
    assert all(abs(v) <= ceiling for v in wbar)


def test_ft_weights_for_box_zero():
    assert ft_weights_for_box((0, 0, 0), 5) == (0, 0, 0)


# --- SVP oracle -------------------------------------------------------------


def test_svp_identity():
    vec = svp_bruteforce(LatticeBasis(((1, 0), (0, 1))), 2)
    assert sum(v * v for v in vec) == 1


def test_svp_rectangular():
    vec = svp_bruteforce(LatticeBasis(((2, 0), (0, 3))), 2)
    assert tuple(map(abs, vec)) == (2, 0)


def test_svp_skewed():
    vec = svp_bruteforce(LatticeBasis(((1, 1), (2, 1))), 3)
    assert sum(v * v for v in vec) == 1
