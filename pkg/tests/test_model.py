from fractions import Fraction

import pytest

from gapforge.model import (
    BoxDomain,
    Certificate,
    LinearFn,
    QuadFn,
    ReduceMethod,
    SepQuadFn,
    SeparableFn,
    Shape,
    SizeGuardExceeded,
    canonicalize,
    enumerate_points,
    evaluate,
    gap_of,
    is_integer_valued,
    scale,
)
from gapforge.oracle import check_equivalent


def test_enumerate_points_small_boxes():
    assert list(enumerate_points(BoxDomain(1, 1))) == [(-1,), (0,), (1,)]
    pts = list(enumerate_points(BoxDomain(2, 1)))
    assert len(pts) == 9
    assert pts[0] == (-1, -1)
    assert pts[-1] == (1, 1)
    assert len(list(enumerate_points(BoxDomain(3, 2)))) == 125


def test_enumerate_points_is_strictly_lexicographic():
    pts = list(enumerate_points(BoxDomain(2, 2)))
    assert all(a < b for a, b in zip(pts, pts[1:]))
    assert len(pts) == BoxDomain(2, 2).point_count()


def test_enumerate_points_guard():
    with pytest.raises(SizeGuardExceeded):
        enumerate_points(BoxDomain(2, 2), max_points=10)
    # explicit cap can also widen
    assert len(list(enumerate_points(BoxDomain(2, 2), max_points=25))) == 25


def test_evaluate_linear():
    f = LinearFn(BoxDomain(2, 2), (3, -2))
    assert evaluate(f, (1, 2)) == -1


def test_evaluate_quadratic():
    f = QuadFn(BoxDomain(2, 3), alpha=(1, 1, 0), beta=(0, 0), gamma=0)
    assert evaluate(f, (2, 3)) == 10


def test_evaluate_separable_table():
    f = SeparableFn(BoxDomain(1, 1), ((0, 5, 7),))
    assert evaluate(f, (1,)) == 7


def test_evaluate_rejects_bad_points():
    f = LinearFn(BoxDomain(2, 1), (1, 1))
    with pytest.raises(ValueError):
        evaluate(f, (1,))
    with pytest.raises(ValueError):
        evaluate(f, (2, 0))


def test_gap_examples():
    assert gap_of(LinearFn(BoxDomain(2, 1), (1, 1))) == 4
    assert gap_of(SeparableFn(BoxDomain(1, 1), ((0, 5, 7),))) == 7
    assert gap_of(QuadFn(BoxDomain(1, 2), alpha=(1,), beta=(0,), gamma=0)) == 4


def test_canonicalize_sepquad_scales_and_drops_gamma():
    f = SepQuadFn(BoxDomain(1, 1), (Fraction(1, 2),), (Fraction(1, 2),), (0,))
    c = canonicalize(f)
    assert c.alpha == (1,)
    assert c.beta == (1,)
    assert c.gamma == (0,)


def test_canonicalize_separable_shifts_left_edge():
    f = SeparableFn(BoxDomain(1, 1), ((3, 8, 10),))
    c = canonicalize(f)
    assert c.tables == ((0, 5, 7),)


def test_canonicalize_quad_drops_gamma_only():
    f = QuadFn(BoxDomain(2, 1), alpha=(1, 2, 3), beta=(4, 5), gamma=7)
    c = canonicalize(f)
    assert c.gamma == 0
    assert c.alpha == (1, 2, 3)
    assert c.beta == (4, 5)


@pytest.mark.parametrize(
    "f",
    [
        LinearFn(BoxDomain(2, 2), (Fraction(1, 3), Fraction(-5, 6))),
        SeparableFn(BoxDomain(2, 1), ((Fraction(1, 2), 2, 3), (0, Fraction(1, 4), 1))),
        SepQuadFn(BoxDomain(2, 2), (Fraction(2, 3), 1), (0, Fraction(1, 6)), (1, 2)),
        QuadFn(BoxDomain(2, 1), (Fraction(1, 2), 1, Fraction(3, 4)), (1, 2), Fraction(5, 2)),
    ],
)
def test_canonicalize_is_integer_valued_and_equivalent(f):
    c = canonicalize(f)
    assert is_integer_valued(c)
    assert check_equivalent(f, c).equivalent


def test_canonicalize_preserves_argmax_argmin_sets():
    f = LinearFn(BoxDomain(2, 1), (Fraction(5, 2), Fraction(-1, 2)))
    c = canonicalize(f)
    pts = list(enumerate_points(f.box))
    vf = [evaluate(f, p) for p in pts]
    vc = [evaluate(c, p) for p in pts]
    argmax_f = {p for p, v in zip(pts, vf) if v == max(vf)}
    argmax_c = {p for p, v in zip(pts, vc) if v == max(vc)}
    argmin_f = {p for p, v in zip(pts, vf) if v == min(vf)}
    argmin_c = {p for p, v in zip(pts, vc) if v == min(vc)}
    assert argmax_f == argmax_c
    assert argmin_f == argmin_c


def test_is_integer_valued():
    assert is_integer_valued(LinearFn(BoxDomain(2, 1), (2, 3)))
    assert not is_integer_valued(LinearFn(BoxDomain(2, 1), (Fraction(1, 2), 0)))
    # x^2/2 + x/2 is integral on the integers even though the coefficients are not
    f = SepQuadFn(BoxDomain(1, 3), (Fraction(1, 2),), (Fraction(1, 2),), (0,))
    assert is_integer_valued(f)


@pytest.mark.parametrize("c", [Fraction(1, 3), 2, Fraction(7, 5)])
def test_positive_scaling_commutes_with_evaluation(c):
    f = QuadFn(BoxDomain(2, 1), (1, -2, 3), (4, -5), 6)
    cf = scale(f, c)
    for x in enumerate_points(f.box):
        assert evaluate(cf, x) == c * evaluate(f, x)


def test_shape_flags_validation():
    with pytest.raises(ValueError):
        SeparableFn(BoxDomain(2, 1), ((0, 1, 2), (0, 0, 0)), (Shape.CONVEX,))


def test_certificate_invariants():
    with pytest.raises(ValueError):
        Certificate(ReduceMethod.LP, gap=10, bound=8, verified=True)
    with pytest.raises(ValueError):
        Certificate(
            ReduceMethod.LP,
            gap=1,
            bound=8,
            verified=True,
            counterexample=(((0,), (1,))),
        )
    Certificate(ReduceMethod.LP, gap=8, bound=8, verified=True)
