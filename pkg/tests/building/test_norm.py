import math
import random
from fractions import Fraction

import pytest
import sympy
from sympy import ZZ, multiplicity
from sympy.matrices.normalforms import invariant_factors

from isobuild.building import (
    Norm,
    canonicalize,
    denominator_cap,
    det_component,
    distance_squared,
    fb_act,
    geodesic_point,
    group_act,
    levi_adapt,
    norm_eval,
    norms_equal,
    rel_position,
    restrict_norm,
    scale_by_power,
    sigma_act,
)
from isobuild.core.exceptions import DenominatorCapExceeded, InvalidParams
from isobuild.crystals import isocline_decomposition
from isobuild.minset import random_unimodular
from isobuild.padic import Matrix, elementary_divisors, make_field


def integer_unimodular(n: int, rng: random.Random) -> sympy.Matrix:
    """A random integer matrix of determinant +-1."""
    lower = sympy.Matrix(n, n, lambda i, j: 1 if i == j else rng.randint(-3, 3) if i > j else 0)
    upper = sympy.Matrix(n, n, lambda i, j: 1 if i == j else rng.randint(-3, 3) if i < j else 0)
    order = list(range(n))
    rng.shuffle(order)
    return sympy.Matrix(n, n, lambda i, j: 1 if order[i] == j else 0) * lower * upper


def as_ints(M: sympy.Matrix) -> list[list[int]]:
    return [[int(x) for x in row] for row in M.tolist()]


def random_norm(ctx, n: int, rng: random.Random) -> Norm:
    exponents = tuple(rng.randint(-2, 2) for _ in range(n))
    return Norm(random_unimodular(ctx, n, rng), exponents)


class TestNorm:
    def test_validation(self, qp):
        with pytest.raises(InvalidParams):
            Norm(Matrix.identity(qp, 2), (0,))
        with pytest.raises(InvalidParams):
            Norm(Matrix.from_rows(qp, [[1, 1], [1, 1]]), (0, 0))

    def test_denominator_cap(self, qp):
        with denominator_cap(2):
            Norm.standard(qp, (0, Fraction(1, 2)))
            with pytest.raises(DenominatorCapExceeded):
                Norm.standard(qp, (0, Fraction(1, 3)))
        Norm.standard(qp, (0, Fraction(1, 3)))

    def test_canonicalize(self, qp):
        want = canonicalize(Norm.standard(qp, (0, 1)))
        swapped = canonicalize(Norm(Matrix.from_rows(qp, [[0, 1], [1, 0]]), (1, 0)))
        scaled = canonicalize(Norm(Matrix.diagonal(qp, [3, 10]), (0, 2)))
        for got in (swapped, scaled):
            assert got.basis == want.basis
            assert got.exponents == want.exponents
        assert canonicalize(Norm.standard(qp, (0, 0))).exponents == (0, 0)

    def test_norm_eval(self, qp):
        assert norm_eval(Norm.standard(qp, (0, 0)), (qp.one(), qp.from_int(2))) == 0
        assert norm_eval(Norm.standard(qp, (0, Fraction(1, 2))), (qp.zero(), qp.one())) == Fraction(1, 2)


class TestRelPosition:
    def test_examples(self, qp):
        alpha = Norm.standard(qp, (0, 0))
        assert rel_position(alpha, alpha).values == (0, 0)
        assert rel_position(alpha, Norm.standard(qp, (1, 2))).values == (2, 1)

        beta = Norm(Matrix.from_rows(qp, [[4, 1], [0, 1]]), (0, 0))
        assert rel_position(alpha, beta).values == (0, -2)
        assert rel_position(beta, alpha).values == (2, 0)

    def test_distance(self, qp):
        alpha = Norm.standard(qp, (0, 0))
        assert distance_squared(alpha, Norm.standard(qp, (1, 2))) == 5
        assert distance_squared(alpha, Norm(Matrix.from_rows(qp, [[1, 3], [0, 1]]), (0, 0))) == 0

    def test_elementary_divisors(self, q3):
        rng = random.Random(3)
        alpha = Norm.standard(q3, (0, 0, 0))
        for _ in range(10):
            rows = [[rng.choice([1, 3, 9, 2, 6]) * rng.randint(0, 2) for _ in range(3)] for _ in range(3)]
            B = Matrix.from_rows(q3, rows)
            try:
                beta = Norm(B, (0, 0, 0))
            except InvalidParams:
                continue
            want = tuple(sorted((-e for e in elementary_divisors(B)), reverse=True))
            assert rel_position(alpha, beta).values == want

    def test_frame_splits_both(self, qp):
        rng = random.Random(1)
        alpha, beta = random_norm(qp, 3, rng), random_norm(qp, 3, rng)
        rel = rel_position(alpha, beta)
        assert norms_equal(Norm(rel.basis, (0, 0, 0)), alpha)
        assert norms_equal(Norm(rel.basis, rel.offsets), beta)

    @pytest.mark.slow
    def test_invariant_factor_oracle(self):
        rng = random.Random(23)
        for i in range(500):
            p, n = (2, 3)[i % 2], rng.randint(2, 4)
            ctx = make_field(p, 1, 30)
            A = integer_unimodular(n, rng)
            B = sympy.Matrix(n, n, lambda *_: rng.randint(-6, 6) * p ** rng.randint(0, 2))
            if B.det() == 0:
                continue
            factors = invariant_factors(A.inv() * B, domain=ZZ)
            want = tuple(sorted((-multiplicity(p, f) for f in factors), reverse=True))
            alpha = Norm(Matrix.from_rows(ctx, as_ints(A)), (0,) * n)
            beta = Norm(Matrix.from_rows(ctx, as_ints(B)), (0,) * n)
            assert rel_position(alpha, beta).values == want

    @pytest.mark.slow
    def test_triangle_inequality(self, qp, q3):
        rng = random.Random(29)
        for ctx in (qp, q3):
            for _ in range(50):
                n = rng.randint(2, 3)
                a, b, c = (random_norm(ctx, n, rng) for _ in range(3))
                ab, bc, ac = (
                    math.sqrt(distance_squared(x, y)) for x, y in ((a, b), (b, c), (a, c))
                )
                assert ac <= ab + bc + 1e-9


class TestIsometries:
    def test_group_act(self, qp):
        alpha = Norm(Matrix.from_rows(qp, [[1, 1], [0, 1]]), (0, 1))
        assert norms_equal(group_act(Matrix.identity(qp, 2), alpha), alpha)
        assert norms_equal(group_act(Matrix.identity(qp, 2) * 2, alpha), scale_by_power(alpha, 1))

    def test_invariance(self, qp):
        rng = random.Random(2)
        for _ in range(5):
            alpha, beta = random_norm(qp, 2, rng), random_norm(qp, 2, rng)
            g = random_unimodular(qp, 2, rng) @ Matrix.diagonal(qp, [2, 1])
            d = distance_squared(alpha, beta)
            assert distance_squared(group_act(g, alpha), group_act(g, beta)) == d
            assert distance_squared(sigma_act(alpha), sigma_act(beta)) == d

    def test_fb_act(self, qp, trivial, half, split):
        alpha = Norm.standard(qp, (0, 0))
        assert norms_equal(fb_act(trivial, alpha), alpha)

        t = Fraction(1, 3)
        on_min = Norm.standard(qp, (t, t + Fraction(1, 2)))
        assert norms_equal(fb_act(half, on_min), scale_by_power(on_min, Fraction(1, 2)))

        image = fb_act(split, alpha)
        assert norms_equal(image, Norm.standard(qp, (0, -1)))
        assert distance_squared(alpha, image) == 1

    def test_sigma_act(self, q4):
        z = q4.gen()
        alpha = Norm(Matrix.from_rows(q4, [[1, z], [0, 1]]), (0, 1))
        assert not norms_equal(sigma_act(alpha), alpha)
        assert norms_equal(sigma_act(alpha, 2), alpha)

    def test_scale_by_power(self, qp):
        alpha = Norm.standard(qp, (0, 1))
        assert norms_equal(scale_by_power(alpha, 0), alpha)
        assert scale_by_power(alpha, 1).exponents == (-1, 0)


class TestGeodesic:
    def test_apartment(self, qp):
        alpha, beta = Norm.standard(qp, (0, 0)), Norm.standard(qp, (1, 2))
        assert geodesic_point(alpha, beta, 0) is alpha
        mid = geodesic_point(alpha, beta, Fraction(1, 2))
        assert norms_equal(mid, Norm.standard(qp, (Fraction(1, 2), 1)))
        with pytest.raises(InvalidParams):
            geodesic_point(alpha, beta, 2)

    def test_midpoint_distances(self, qp):
        rng = random.Random(4)
        for _ in range(3):
            alpha, beta = random_norm(qp, 2, rng), random_norm(qp, 2, rng)
            mid = geodesic_point(alpha, beta, Fraction(1, 2))
            d = distance_squared(alpha, beta)
            assert distance_squared(alpha, mid) == d / 4
            assert distance_squared(mid, beta) == d / 4

    def test_cat0_convexity(self, qp):
        rng = random.Random(6)
        for _ in range(3):
            a1, b1, a2, b2 = (random_norm(qp, 2, rng) for _ in range(4))
            m1 = geodesic_point(a1, b1, Fraction(1, 2))
            m2 = geodesic_point(a2, b2, Fraction(1, 2))
            lhs = math.sqrt(distance_squared(m1, m2))
            rhs = (math.sqrt(distance_squared(a1, a2)) + math.sqrt(distance_squared(b1, b2))) / 2
            assert lhs <= rhs + 1e-9


class TestLevi:
    def test_restrict_norm(self, qp):
        alpha = Norm.standard(qp, (0, 1))
        assert restrict_norm(alpha, Matrix.from_columns(qp, [(1, 0)], 2)).exponents == (0,)
        assert restrict_norm(alpha, Matrix.from_columns(qp, [(1, 1)], 2)).exponents == (0,)
        assert restrict_norm(alpha, Matrix.from_columns(qp, [(0, 2)], 2)).exponents == (2,)

    def test_levi_adapt(self, qp, split):
        dec = isocline_decomposition(split)
        adapted, ok = levi_adapt(Norm.standard(qp, (0, Fraction(1, 2))), dec)
        assert ok

        alpha = Norm(Matrix.from_rows(qp, [[1, 0], [1, 1]]), (Fraction(1, 2), 0))
        adapted, ok = levi_adapt(alpha, dec)
        assert not ok
        assert norms_equal(adapted, Norm.standard(qp, (0, 0)))
        assert levi_adapt(adapted, dec)[1]


def test_det_component(qp):
    assert det_component(Norm.standard(qp, (0, 0))) == 0
    assert det_component(Norm.standard(qp, (1, 2))) == Fraction(3, 2)
    assert det_component(Norm(Matrix.identity(qp, 2) * 2, (0, 0))) == -1
