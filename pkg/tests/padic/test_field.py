import random
from fractions import Fraction

import pytest

from isobuild.core.exceptions import (
    DivisionByZero,
    IncompatibleTower,
    NoConwayPolynomial,
    PrecisionExhausted,
    PrecisionTooSmall,
)
from isobuild.core.util import INFINITY
from isobuild.padic import arithmetic, extend_field, frobenius, make_field, valuation


class TestMakeField:
    def test_prime_field(self):
        ctx = make_field(2, 1, 20)
        assert ctx.header() == {"p": 2, "m": 1, "N": 20, "d": 1}
        x = ctx.from_int(5)
        assert frobenius(x) == x

    def test_unramified_quadratic(self, q4):
        assert q4.minpoly == (1, 1, 1)
        z = q4.gen()
        assert z * z + z + 1 == 0
        assert frobenius(z) == -1 - z

    def test_eisenstein(self):
        ctx = make_field(3, 1, 20, 2)
        pi = ctx.uniformizer()
        assert valuation(pi) == Fraction(1, 2)
        assert pi * pi == 3

    def test_errors(self):
        with pytest.raises(NoConwayPolynomial):
            make_field(4, 1, 20)
        with pytest.raises(NoConwayPolynomial):
            make_field(2, 9, 20)
        with pytest.raises(PrecisionTooSmall):
            make_field(2, 1, 3)
        with pytest.raises(IncompatibleTower):
            make_field(2, 0, 20)


class TestArithmetic:
    def test_examples(self, q4):
        z = q4.gen()
        x = 1 + z
        assert arithmetic("add", x, q4.zero()) == x
        assert arithmetic("mul", x, x) == z
        two = q4.from_int(2)
        quotient = arithmetic("div", two, two)
        assert quotient == 1
        assert quotient.valuation == 0

    def test_valuation(self, q4):
        assert valuation(q4.from_int(2)) == 1
        assert valuation(q4.zero()) == INFINITY
        assert valuation(1 + q4.gen()) == 0
        assert valuation(q4.from_fraction(Fraction(3, 8))) == -3

    def test_cancellation_is_tracked(self, qp):
        x = qp.from_int(1) + qp.p_power(5)
        diff = x - qp.from_int(1)
        assert diff.valuation == 5
        assert diff.relative_precision <= 20

        zero = qp.from_int(7) - qp.from_int(7)
        assert zero.is_zero()
        assert not zero.is_exact_zero()

    def test_division_by_zero(self, qp):
        with pytest.raises(DivisionByZero):
            qp.one() / qp.zero()
        with pytest.raises(PrecisionExhausted):
            qp.one() / (qp.one() - qp.one())

    def test_unknown_operation(self, qp):
        with pytest.raises(ValueError):
            arithmetic("pow", qp.one(), qp.one())


class TestFrobenius:
    def test_order(self):
        ctx = make_field(3, 3, 12)
        z = ctx.gen()
        x = z * z + 2 * z + ctx.from_fraction(Fraction(1, 3))
        assert x.frobenius(3) == x
        assert x.frobenius(1) != x

    def test_ring_homomorphism(self):
        ctx = make_field(2, 3, 16)
        z = ctx.gen()
        x, y = 1 + z * z, z + 3
        assert (x * y).frobenius() == x.frobenius() * y.frobenius()
        assert (x + y).frobenius(2) == x.frobenius(2) + y.frobenius(2)

    def test_lifts_p_power_map(self):
        ctx = make_field(3, 2, 16)
        z = ctx.gen()
        assert (z.frobenius() - z**3).valuation >= 1


class TestExtendField:
    def test_integer(self, qp):
        x = extend_field(qp.from_int(3), 2, 1)
        assert x.ctx == make_field(2, 2, 20)
        assert x == 3

    def test_ramification(self):
        ctx = make_field(2, 1, 20, 2)
        pi = extend_field(ctx.uniformizer(), 1, 4)
        assert pi.valuation == Fraction(1, 2)
        fine = pi.ctx.uniformizer()
        assert pi == fine * fine

    def test_generator_embedding(self, q4):
        z = extend_field(q4.gen(), 4, 1)
        assert z * z + z + 1 == 0
        assert z.frobenius() == extend_field(q4.gen().frobenius(), 4, 1)

    def test_incompatible(self, q4):
        with pytest.raises(IncompatibleTower):
            extend_field(q4.gen(), 3, 1)


class TestJson:
    def test_round_trip(self):
        ctx = make_field(3, 2, 16, 2)
        x = ctx.uniformizer() * (1 + ctx.gen())
        assert ctx.from_json(x.to_json()) == x
        assert ctx.from_json({"valuation": "inf", "unit": []}).is_zero()

    def test_valuation_outside_value_group(self, qp):
        with pytest.raises(IncompatibleTower):
            qp.from_json({"valuation": "1/2", "unit": [[1]]})
        with pytest.raises(IncompatibleTower):
            make_field(2, 1, 20, 2).from_json({"valuation": "1/3", "unit": [[1], [0]]})

    def test_fractional_valuation_with_ramification(self):
        ctx = make_field(2, 1, 20, 2)
        x = ctx.from_json({"valuation": "1/2", "unit": [[1], [0]]})
        assert x.valuation == Fraction(1, 2)
        assert x == ctx.uniformizer()


def random_element(ctx, rng):
    digits = [[rng.randrange(ctx.p**4) for _ in range(ctx.m)] for _ in range(ctx.d)]
    return ctx.from_digits(digits, Fraction(rng.randint(-3 * ctx.d, 3 * ctx.d), ctx.d))


@pytest.mark.slow
class TestRandomized:
    def test_ring_axioms(self):
        rng = random.Random(5)
        for ctx in (make_field(2, 2, 20), make_field(3, 2, 16, 2)):
            for _ in range(100):
                x, y, w = (random_element(ctx, rng) for _ in range(3))
                assert x + y == y + x
                assert x * y == y * x
                assert (x + y) + w == x + (y + w)
                assert (x * y) * w == x * (y * w)
                assert x * (y + w) == x * y + x * w
                assert x - x == 0
                if not x.is_zero():
                    assert x * x.inverse() == 1

    def test_extend_field_preserves_valuation(self):
        rng = random.Random(9)
        src = make_field(2, 2, 20)
        for _ in range(100):
            x, y = random_element(src, rng), random_element(src, rng)
            ex, ey = extend_field(x, 4, 2), extend_field(y, 4, 2)
            assert valuation(ex) == valuation(x)
            assert ex * ey == extend_field(x * y, 4, 2)
            assert ex.frobenius() == extend_field(x.frobenius(), 4, 2)
