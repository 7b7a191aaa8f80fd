import random
from collections import Counter
from fractions import Fraction

import pytest

from isobuild.core.exceptions import PrecisionExhausted, SlopeNotIntegral
from isobuild.padic import Polynomial, make_field, newton_polygon, slope_factorization


class TestPolynomial:
    def test_arithmetic(self, qp):
        f = Polynomial.from_ints(qp, [-1, 1])
        g = Polynomial.from_ints(qp, [-2, 1])
        assert f * g == Polynomial.from_ints(qp, [2, -3, 1])
        assert (f * g).degree == 2
        assert (f - f).is_zero()

    def test_divmod_monic(self, qp):
        f = Polynomial.from_ints(qp, [3, 0, 1, 1])
        g = Polynomial.from_ints(qp, [1, 1])
        q, r = f.divmod_monic(g)
        assert q * g + r == f
        assert r.degree < g.degree

    def test_evaluate(self, qp):
        f = Polynomial.from_ints(qp, [2, -3, 1])
        assert f(qp.from_int(2)).is_zero()
        assert f(qp.from_int(3)) == 2


class TestNewtonPolygon:
    def test_examples(self, qp):
        assert newton_polygon(Polynomial.from_ints(qp, [-2, 0, 1])).slopes == ((Fraction(1, 2), 2),)
        # (x - 1)(x - 2)
        assert newton_polygon(Polynomial.from_ints(qp, [2, -3, 1])).slopes == (
            (Fraction(0), 1),
            (Fraction(1), 1),
        )
        # x^2 - 2x - 2: hull through (0, 1), (2, 0)
        assert newton_polygon(Polynomial.from_ints(qp, [-2, -2, 1])).slopes == ((Fraction(1, 2), 2),)

    def test_zero_roots(self, qp):
        polygon = newton_polygon(Polynomial.from_ints(qp, [0, 0, -2, 1]))
        assert polygon.zero_roots == 2
        assert polygon.degree == 3
        assert polygon.slopes == ((Fraction(1), 1),)

    def test_inexact_zero_below_hull(self, qp):
        vanished = qp.one() - qp.one()
        f = Polynomial(qp, (qp.p_power(60), vanished, qp.one()))
        with pytest.raises(PrecisionExhausted):
            newton_polygon(f)


class TestSlopeFactorization:
    def test_two_slopes(self, qp):
        f = Polynomial.from_ints(qp, [2, -3, 1])
        factors = slope_factorization(f)
        assert [lam for lam, _ in factors] == [0, 1]
        assert factors[0][1] == Polynomial.from_ints(qp, [-1, 1])
        assert factors[1][1] == Polynomial.from_ints(qp, [-2, 1])

    def test_three_slopes_product(self, q3):
        # (x - 1)(x - 3)(x - 9)
        f = Polynomial.from_ints(q3, [-1, 1]) * Polynomial.from_ints(q3, [-3, 1]) * Polynomial.from_ints(
            q3, [-9, 1]
        )
        factors = slope_factorization(f)
        assert [lam for lam, _ in factors] == [0, 1, 2]
        product = factors[0][1] * factors[1][1] * factors[2][1]
        assert product == f

    def test_single_slope(self, qp):
        f = Polynomial.from_ints(qp, [-2, -2, 1])
        [(lam, g)] = slope_factorization(f)
        assert lam == Fraction(1, 2)
        assert g == f

    def test_linear(self, qp):
        f = Polynomial.from_ints(qp, [-5, 1])
        assert slope_factorization(f)[0][0] == 0

    def test_non_integral(self, qp):
        f = Polynomial.from_ints(qp, [-1, 1]) * Polynomial.from_ints(qp, [-2, 0, 1])
        with pytest.raises(SlopeNotIntegral):
            slope_factorization(f)


def merged_slopes(*polygons) -> tuple:
    total: Counter = Counter()
    for polygon in polygons:
        for lam, h in polygon.slopes:
            total[lam] += h
    return tuple(sorted(total.items()))


@pytest.mark.slow
def test_product_polygon_is_minkowski_sum():
    rng = random.Random(13)
    for p in (2, 3):
        ctx = make_field(p, 1, 30)
        for _ in range(100):
            f, g = (
                Polynomial.from_ints(
                    ctx,
                    [rng.choice([1, -1]) * rng.randint(1, 9) * p ** rng.randint(0, 3)]
                    + [rng.randint(-9, 9) * p ** rng.randint(0, 3) for _ in range(rng.randint(0, 3))]
                    + [1],
                )
                for _ in range(2)
            )
            assert newton_polygon(f * g).slopes == merged_slopes(newton_polygon(f), newton_polygon(g))
