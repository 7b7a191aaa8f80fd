"""Isocrystals (N, F) with N = L^n and F = b o sigma."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from isobuild.core.exceptions import InvalidMultiplicity, InvalidParams
from isobuild.core.logger import logger
from isobuild.core.util import denominator_lcm, format_rational, parse_rational
from isobuild.padic import (
    FieldContext,
    Matrix,
    charpoly,
    determinant,
    inverse,
    newton_polygon,
)


@dataclass(frozen=True)
class SimpleBlock:
    """A companion block of slope d/h occupying coordinates [start, start + h)."""

    slope: Fraction
    start: int
    size: int

    @property
    def stop(self) -> int:
        return self.start + self.size

    @property
    def numerator(self) -> int:
        return self.slope.numerator


@dataclass(frozen=True)
class NewtonPoint:
    """Slopes with multiplicities, slopes strictly increasing."""

    slopes: tuple[tuple[Fraction, int], ...]

    def __post_init__(self):
        slopes = tuple((Fraction(lam), int(h)) for lam, h in self.slopes)
        for (a, _), (b, _) in zip(slopes, slopes[1:]):
            if a >= b:
                raise InvalidParams("slopes must be strictly increasing")
        for lam, h in slopes:
            if h <= 0 or h % lam.denominator:
                raise InvalidMultiplicity(
                    f"multiplicity {h} of slope {lam} is not a positive multiple of {lam.denominator}"
                )
        object.__setattr__(self, "slopes", slopes)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[Fraction | str | int, int]]) -> NewtonPoint:
        merged: dict[Fraction, int] = {}
        for lam, h in pairs:
            lam = parse_rational(lam)
            merged[lam] = merged.get(lam, 0) + int(h)
        return cls(tuple(sorted(merged.items())))

    @property
    def n(self) -> int:
        return sum(h for _, h in self.slopes)

    @property
    def denominator(self) -> int:
        return denominator_lcm(lam for lam, _ in self.slopes)

    def is_basic(self) -> bool:
        return len(self.slopes) == 1

    def vector(self) -> tuple[Fraction, ...]:
        """The slope vector, each slope repeated by its multiplicity."""
        return tuple(lam for lam, h in self.slopes for _ in range(h))

    def simple_blocks(self) -> Iterator[SimpleBlock]:
        start = 0
        for lam, h in self.slopes:
            size = lam.denominator
            for _ in range(h // size):
                yield SimpleBlock(slope=lam, start=start, size=size)
                start += size

    def to_json(self) -> list[dict]:
        return [
            {"num": lam.numerator, "den": lam.denominator, "mult": h}
            for lam, h in self.slopes
        ]

    @classmethod
    def from_json(cls, data: list[dict]) -> NewtonPoint:
        return cls.from_pairs([(Fraction(d["num"], d["den"]), d["mult"]) for d in data])

    def __str__(self) -> str:
        return "[" + ", ".join(f"({format_rational(lam)}, {h})" for lam, h in self.slopes) + "]"


@dataclass(frozen=True, eq=False)
class Isocrystal:
    """F = b o sigma on L^n with b defined over Q_{p^s}.

    `frame` (optional) is a matrix g with b = g b_std sigma(g)^-1 for the
    standard form b_std of the same Newton point; it is set for standard forms
    and carried along by sigma-conjugation.
    """

    ctx: FieldContext
    b: Matrix
    s: int = 1
    frame: Matrix | None = field(default=None)

    def __post_init__(self):
        if not self.b.is_square():
            raise InvalidParams(f"b must be square, got {self.b.nrows}x{self.b.ncols}")
        if self.b.ctx != self.ctx:
            raise InvalidParams("b does not live in the isocrystal's context")
        if self.s < 1:
            raise InvalidParams(f"definition degree s={self.s} must be >= 1")
        if determinant(self.b).is_zero():
            raise InvalidParams("b is not invertible")
        if self.b.frobenius(self.s) != self.b:
            raise InvalidParams(f"b is not fixed by sigma^{self.s}")

    @property
    def n(self) -> int:
        return self.b.nrows

    @property
    def p(self) -> int:
        return self.ctx.p

    def with_frame(self, frame: Matrix | None) -> Isocrystal:
        return Isocrystal(self.ctx, self.b, self.s, frame)

    def apply(self, vector) -> tuple:
        """F(x) = b sigma(x)."""
        return self.b.apply([x.frobenius() for x in vector])


def twisted_product(b: Matrix, k: int) -> Matrix:
    """b sigma(b) ... sigma^(k-1)(b), the linear part of (b sigma)^k."""
    result = Matrix.identity(b.ctx, b.nrows)
    for i in range(k):
        result = result @ b.frobenius(i)
    return result


def twisted_power(ic: Isocrystal, m: int) -> Matrix:
    if m < 1 or m % ic.s:
        raise InvalidParams(f"m={m} is not a positive multiple of s={ic.s}")
    return twisted_product(ic.b, ic.s) ** (m // ic.s)


def newton_point(ic: Isocrystal) -> NewtonPoint:
    polygon = newton_polygon(charpoly(twisted_power(ic, ic.s)))
    result = NewtonPoint.from_pairs([(lam / ic.s, h) for lam, h in polygon.slopes])
    logger.debug(f"Newton point of a rank {ic.n} isocrystal: {result}")
    return result


def standard_form(np: NewtonPoint, ctx: FieldContext) -> Isocrystal:
    """Block diagonal sum of companion matrices of x^h - p^d, one per simple block."""
    blocks = []
    for block in np.simple_blocks():
        h, d = block.size, block.numerator
        rows = [[0] * h for _ in range(h)]
        for i in range(1, h):
            rows[i][i - 1] = 1
        rows[0][h - 1] = Fraction(ctx.p) ** d
        blocks.append(Matrix.from_rows(ctx, rows))
    b = Matrix.block_diagonal(ctx, blocks)
    return Isocrystal(ctx, b, s=1, frame=Matrix.identity(ctx, np.n))


def fixed_degree(g: Matrix) -> int:
    """The least k dividing the context degree with sigma^k(g) = g."""
    m = g.ctx.m
    for k in range(1, m + 1):
        if m % k == 0 and g.frobenius(k) == g:
            return k
    return m


def sigma_conjugate(ic: Isocrystal, g: Matrix) -> Isocrystal:
    """The isocrystal with b' = g b sigma(g)^-1, isomorphic to ic via g."""
    b = g @ ic.b @ inverse(g.frobenius())
    s = math.lcm(ic.s, fixed_degree(g))
    frame = None if ic.frame is None else g @ ic.frame
    return Isocrystal(ic.ctx, b, s=s, frame=frame)


def min_nu(np: NewtonPoint) -> Fraction:
    """Squared length of the Newton vector."""
    return sum((h * lam * lam for lam, h in np.slopes), Fraction(0))


def slope_determinant_identity(ic: Isocrystal) -> bool:
    """sum(h * lambda) equals val(det b)."""
    np = newton_point(ic)
    total = sum((h * lam for lam, h in np.slopes), Fraction(0))
    return total == determinant(ic.b).valuation
