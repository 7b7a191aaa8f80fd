from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from isobuild.core.exceptions import PrecisionExhausted, SlopeNotIntegral
from isobuild.core.logger import logger
from isobuild.core.util import INFINITY, format_rational

from .field import FieldContext, FieldElement


@dataclass(frozen=True, eq=False)
class Polynomial:
    """A polynomial over a field context, coefficients lowest degree first."""

    ctx: FieldContext
    coeffs: tuple[FieldElement, ...]

    def __post_init__(self):
        coeffs = list(self.coeffs)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def from_ints(cls, ctx: FieldContext, values: Sequence[int | Fraction]) -> Polynomial:
        return cls(ctx, tuple(ctx.from_fraction(v) for v in values))

    @classmethod
    def monomial(cls, ctx: FieldContext, k: int) -> Polynomial:
        return cls(ctx, (ctx.zero(),) * k + (ctx.one(),))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> FieldElement:
        return self.coeffs[-1]

    def coeff(self, i: int) -> FieldElement:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.ctx.zero()

    def is_zero(self) -> bool:
        return not self.coeffs

    def monic(self) -> Polynomial:
        lead = self.leading
        if lead == 1:
            return self
        inv = lead.inverse()
        return Polynomial(self.ctx, tuple(c * inv for c in self.coeffs))

    def __add__(self, other: Polynomial) -> Polynomial:
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self.ctx, tuple(self.coeff(i) + other.coeff(i) for i in range(n)))

    def __sub__(self, other: Polynomial) -> Polynomial:
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self.ctx, tuple(self.coeff(i) - other.coeff(i) for i in range(n)))

    def __neg__(self) -> Polynomial:
        return Polynomial(self.ctx, tuple(-c for c in self.coeffs))

    def __mul__(self, other: Polynomial | FieldElement | int) -> Polynomial:
        if not isinstance(other, Polynomial):
            return Polynomial(self.ctx, tuple(c * other for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return Polynomial(self.ctx, ())
        out = [self.ctx.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_exact_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Polynomial(self.ctx, tuple(out))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (self - other).is_zero()

    def divmod_monic(self, g: Polynomial) -> tuple[Polynomial, Polynomial]:
        """Division by a monic polynomial."""
        if g.is_zero() or not g.leading == 1:
            raise ValueError("divisor must be monic")
        r = list(self.coeffs)
        k = g.degree
        q = [self.ctx.zero()] * max(len(r) - k, 0)
        for top in range(len(r) - 1, k - 1, -1):
            c = r[top]
            q[top - k] = c
            if c.is_exact_zero():
                continue
            for j, b in enumerate(g.coeffs):
                r[top - k + j] = r[top - k + j] - c * b
        return Polynomial(self.ctx, tuple(q)), Polynomial(self.ctx, tuple(r[:k]))

    def truncate(self, n: int) -> Polynomial:
        """Drop terms of degree >= n."""
        return Polynomial(self.ctx, self.coeffs[:n])

    def rescale(self, shift: int, lam: int) -> Polynomial:
        """Coefficientwise a_i -> a_i * p^(lam*i + shift), i.e. p^shift * f(p^lam x)."""
        ctx = self.ctx
        return Polynomial(
            ctx, tuple(c * ctx.p_power(lam * i + shift) for i, c in enumerate(self.coeffs))
        )

    def __call__(self, x: FieldElement) -> FieldElement:
        acc = self.ctx.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def residue(self) -> list:
        """Reduction modulo pi as a polynomial over the residue field."""
        F = self.ctx.residue_field
        return F.poly_strip([c.residue() for c in self.coeffs])

    @classmethod
    def lift(cls, ctx: FieldContext, poly: list) -> Polynomial:
        return cls(ctx, tuple(ctx.from_zq(a) for a in poly))

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.coeffs]

    def __repr__(self) -> str:
        return f"Polynomial(degree={self.degree}, coeffs={list(self.coeffs)})"


@dataclass(frozen=True)
class NewtonPolygonData:
    """Slopes with multiplicities, strictly increasing.

    A slope is the valuation of the corresponding roots. Roots equal to zero
    are split off into `zero_roots`.
    """

    slopes: tuple[tuple[Fraction, int], ...]
    zero_roots: int = field(default=0)

    @property
    def degree(self) -> int:
        return sum(h for _, h in self.slopes) + self.zero_roots

    def to_json(self) -> list[list]:
        return [[format_rational(s), h] for s, h in self.slopes]


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    hull: list[tuple[int, Fraction]] = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the chord hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_polygon(f: Polynomial) -> NewtonPolygonData:
    if f.is_zero():
        raise ValueError("Newton polygon of the zero polynomial")
    zero_roots = 0
    while f.coeff(zero_roots).is_zero():
        zero_roots += 1
    points = [
        (i, c.valuation)
        for i, c in enumerate(f.coeffs)
        if i >= zero_roots and not c.is_zero()
    ]
    hull = _lower_hull(points)

    def hull_value(i: int) -> Fraction:
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            if x1 <= i <= x2:
                return y1 + (y2 - y1) * Fraction(i - x1, x2 - x1)
        return hull[-1][1]

    for i, c in enumerate(f.coeffs):
        if i > zero_roots and c.is_zero() and c.precision != INFINITY:
            if c.precision < hull_value(i):
                raise PrecisionExhausted(
                    f"coefficient {i} is zero only to precision {c.precision}, "
                    f"below the polygon at {hull_value(i)}"
                )

    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slopes.append((-(y2 - y1) / (x2 - x1), x2 - x1))
    slopes.reverse()
    return NewtonPolygonData(slopes=tuple(slopes), zero_roots=zero_roots)


def _split_lowest_slope(f: Polynomial, lam: int, h: int) -> tuple[Polynomial, Polynomial]:
    """Factor monic f = f_lam * rest, f_lam of degree h pure of slope lam."""
    ctx = f.ctx
    F = ctx.residue_field
    n = f.degree
    a = n - h

    # g(x) = p^(-n lam) f(p^lam x) has slope 0 with multiplicity h, the rest positive.
    g = f.rescale(-n * lam, lam)
    G = Polynomial.monomial(ctx, a)
    H = Polynomial(ctx, g.coeffs[a:])
    s, t, one = F.poly_gcdex(G.residue(), H.residue())
    if one != [F.one()]:
        raise PrecisionExhausted("slope factors are not coprime modulo pi")
    s, t = Polynomial.lift(ctx, s), Polynomial.lift(ctx, t)

    for step in range(ctx.digits + 5):
        e = g - G * H
        if e.is_zero():
            logger.debug(f"Hensel lifting for slope {lam} converged after {step} steps")
            break
        q, r = (e * t).divmod_monic(G)
        G = G + r
        H = H + (e * s + q * H).truncate(h)
    else:
        raise PrecisionExhausted(f"Hensel lifting for slope {lam} did not converge")

    return H.rescale(h * lam, -lam), G.rescale(a * lam, -lam)


def slope_factorization(f: Polynomial) -> list[tuple[Fraction, Polynomial]]:
    """Split f into monic factors, each pure of a single slope, slopes increasing."""
    f = f.monic()
    polygon = newton_polygon(f)
    if polygon.zero_roots:
        raise SlopeNotIntegral("polynomial has zero roots of infinite slope")
    if len(polygon.slopes) == 1:
        return [(polygon.slopes[0][0], f)]
    for lam, _ in polygon.slopes:
        if lam.denominator != 1:
            raise SlopeNotIntegral(f"slope {lam} is not an integer")

    factors = []
    rest = f
    for lam, h in polygon.slopes[:-1]:
        factor, rest = _split_lowest_slope(rest, int(lam), h)
        factors.append((lam, factor))
    factors.append((polygon.slopes[-1][0], rest))
    return factors
