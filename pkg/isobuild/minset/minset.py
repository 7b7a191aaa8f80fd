"""The minimal set Min(F) of the isometry F = b sigma of the building.

Membership is decided exactly: alpha lies in Min(F) iff it is adapted to the
isocline decomposition and F scales each slope-lambda block by p^lambda.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from isobuild.building import (
    Norm,
    distance_squared,
    fb_act,
    levi_adapt,
    norms_equal,
    power_fb_act,
)
from isobuild.core.exceptions import InvalidParams
from isobuild.core.logger import logger
from isobuild.core.util import format_rational
from isobuild.crystals import (
    IsoclineDecomposition,
    Isocrystal,
    NewtonPoint,
    isocline_decomposition,
    newton_point,
    standard_form,
    twisted_product,
)
from isobuild.padic import Matrix, kernel_basis, rank


@dataclass(frozen=True)
class MinPointParams:
    """One base exponent per simple block of the standard form."""

    offsets: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(Fraction(t) for t in self.offsets))

    @classmethod
    def random(cls, np: NewtonPoint, rng: random.Random, spread: int = 2) -> MinPointParams:
        denominator = np.denominator
        count = sum(1 for _ in np.simple_blocks())
        return cls(
            tuple(
                Fraction(rng.randint(-spread * denominator, spread * denominator), denominator)
                for _ in range(count)
            )
        )


def _fixed_vectors(ic: Isocrystal, slope: Fraction) -> list[tuple]:
    """Vectors w with F^h w = p^d w, for the slope d/h.

    phi = p^-d F^h is sigma^h-semilinear and phi^r is linear for r = m / gcd(m, h).
    Fixed vectors of phi^r descend to fixed vectors of phi by summing the
    phi-orbits of z^j u.
    """
    ctx = ic.ctx
    d, h = slope.numerator, slope.denominator
    r = ctx.m // math.gcd(ctx.m, h)
    linear = twisted_product(ic.b, h * r) * ctx.p_power(-d * r)
    U = kernel_basis(linear - Matrix.identity(ctx, ic.n))
    if r == 1:
        return U.columns()

    step = twisted_product(ic.b, h) * ctx.p_power(-d)
    z = ctx.gen()
    vectors = []
    for u in U.columns():
        for j in range(ctx.m):
            v = tuple(x * z**j for x in u)
            total = v
            for _ in range(r - 1):
                v = step.apply([x.frobenius(h) for x in v])
                total = tuple(a + b for a, b in zip(total, v))
            vectors.append(total)
    return vectors


def _derive_frame(ic: Isocrystal, np: NewtonPoint) -> Matrix:
    """Columns w, Fw, ..., F^(h-1) w for independent fixed vectors w of each slope."""
    ctx = ic.ctx
    columns: list[tuple] = []
    for lam, mult in np.slopes:
        needed = len(columns) + mult
        for w in _fixed_vectors(ic, lam):
            orbit = [tuple(w)]
            for _ in range(lam.denominator - 1):
                orbit.append(ic.apply(orbit[-1]))
            candidate = columns + orbit
            if rank(Matrix.from_columns(ctx, candidate, ic.n)) == len(candidate):
                columns = candidate
            if len(columns) == needed:
                break
        if len(columns) != needed:
            raise InvalidParams(
                f"slope {format_rational(lam)} part has no Frobenius-fixed basis over {ctx!r}"
            )
    return Matrix.from_columns(ctx, columns, ic.n)


def standard_frame(ic: Isocrystal) -> Matrix:
    """A basis g in which F has the standard block form, g b_std = b sigma(g)."""
    if ic.frame is not None:
        return ic.frame
    np = newton_point(ic)
    std = standard_form(np, ic.ctx)
    if ic.b == std.b:
        return Matrix.identity(ic.ctx, ic.n)
    frame = _derive_frame(ic, np)
    if frame @ std.b != ic.b @ frame.frobenius():
        raise InvalidParams("isocrystal is not a sigma-conjugate of its standard form over this field")
    logger.debug(f"derived a standard frame for Newton point {np}")
    return frame


def displacement(ic: Isocrystal, alpha: Norm) -> Fraction:
    """d(alpha, F alpha)^2."""
    return distance_squared(alpha, fb_act(ic, alpha))


def _block_slopes(dec: IsoclineDecomposition, factor: int = 1) -> list[Fraction]:
    return [factor * block.slope for block in dec.blocks for _ in range(block.dim)]


def _in_min(
    ic: Isocrystal, alpha: Norm, dec: IsoclineDecomposition | None, power: int
) -> bool:
    if dec is None:
        dec = isocline_decomposition(ic)
    adapted, is_adapted = levi_adapt(alpha, dec)
    if not is_adapted:
        logger.debug("norm is not adapted to the isocline decomposition")
        return False
    image = fb_act(ic, adapted) if power == 1 else power_fb_act(ic, adapted, power)
    shifts = _block_slopes(dec, power)
    scaled = Norm(adapted.basis, tuple(c - mu for c, mu in zip(adapted.exponents, shifts)))
    return norms_equal(image, scaled)


def is_in_min(ic: Isocrystal, alpha: Norm, dec: IsoclineDecomposition | None = None) -> bool:
    return _in_min(ic, alpha, dec, 1)


def is_in_min_power(
    ic: Isocrystal, alpha: Norm, k: int, dec: IsoclineDecomposition | None = None
) -> bool:
    """Membership in Min(F^k)."""
    return _in_min(ic, alpha, dec, k)


def min_exponents(np: NewtonPoint, offsets: Sequence[Fraction]) -> tuple[Fraction, ...]:
    blocks = list(np.simple_blocks())
    if len(offsets) != len(blocks):
        raise InvalidParams(f"expected {len(blocks)} block offsets, got {len(offsets)}")
    exponents = []
    for block, t in zip(blocks, offsets):
        exponents.extend(t + i * block.slope for i in range(block.size))
    return tuple(exponents)


def min_point(ic: Isocrystal, params: MinPointParams) -> Norm:
    """alpha_{frame, c} with c_i = t + i * lambda along each simple block."""
    frame = standard_frame(ic)
    return Norm(frame, min_exponents(newton_point(ic), params.offsets))


def apartment_min_projection(ic: Isocrystal, exponents: Sequence[Fraction]) -> tuple[Norm, Fraction]:
    """Least-squares projection of alpha_{frame, c} onto the Min points of the same apartment.

    Returns the projected Min point and the squared apartment distance to it.
    """
    frame = standard_frame(ic)
    np = newton_point(ic)
    exponents = [Fraction(c) for c in exponents]
    if len(exponents) != ic.n:
        raise InvalidParams(f"expected {ic.n} exponents, got {len(exponents)}")
    offsets = []
    bound = Fraction(0)
    for block in np.simple_blocks():
        residuals = [exponents[block.start + i] - i * block.slope for i in range(block.size)]
        t = sum(residuals, Fraction(0)) / block.size
        offsets.append(t)
        bound += sum(((r - t) ** 2 for r in residuals), Fraction(0))
    return Norm(frame, min_exponents(np, offsets)), bound
