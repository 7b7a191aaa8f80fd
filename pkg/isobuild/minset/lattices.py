"""Crystals: lattices M with F(M) and V(M) = p F^-1(M) contained in M."""

from __future__ import annotations

import itertools
from collections import deque
from fractions import Fraction
from typing import Iterator

from isobuild.building import CrystalLattice, Norm, ball_lattice
from isobuild.core.exceptions import BallNotCrystal, NotInMin, ScaleTooLarge, SlopeRange
from isobuild.core.logger import logger
from isobuild.crystals import Isocrystal, newton_point
from isobuild.padic import FieldContext, Matrix, inverse, solve

from .jgroup import is_in_j, j_generators
from .minset import is_in_min

MAX_ENUMERATION = 20000


def slopes_in_unit_interval(ic: Isocrystal) -> bool:
    return all(0 <= lam <= 1 for lam, _ in newton_point(ic).slopes)


def is_crystal(ic: Isocrystal, M: CrystalLattice) -> bool:
    if not slopes_in_unit_interval(ic):
        logger.warning(f"{SlopeRange.__name__}: slopes {newton_point(ic)} leave [0, 1]; no crystals exist")
        return False
    basis = M.basis
    # F(M) is spanned by b sigma(M), V(M) by p sigma^-1(b^-1 M).
    frob_image = ic.b @ basis.frobenius()
    ver_image = (inverse(ic.b) @ basis).frobenius(-1) * ic.ctx.p_power(1)
    return solve(basis, frob_image).is_integral() and solve(basis, ver_image).is_integral()


def minimal_crystal_ball(ic: Isocrystal, alpha: Norm, radius: Fraction | int = 0) -> CrystalLattice:
    """The ball {x : alpha(x) <= p^-radius} of a Min point, certified as a crystal."""
    if not slopes_in_unit_interval(ic):
        raise SlopeRange(f"slopes {newton_point(ic)} leave [0, 1]")
    if not is_in_min(ic, alpha):
        raise NotInMin("norm does not lie in Min(F)")
    M = ball_lattice(alpha, radius)
    if not is_crystal(ic, M):
        raise BallNotCrystal(f"ball of radius {radius} around a Min point is not stable under F and V")
    return M


def _residues(ctx: FieldContext, e: int) -> Iterator[tuple[int, ...]]:
    """Representatives of Z_q / p^e, as coefficient tuples."""
    return itertools.product(range(ctx.p**e), repeat=ctx.m)


def _hermite_count(ctx: FieldContext, n: int, top: int) -> int:
    q = ctx.p**ctx.m
    total = 1
    for i in range(n):
        total *= sum(q ** (e * (n - 1 - i)) for e in range(top + 1))
    return total


def hermite_lattices(ctx: FieldContext, n: int, radius: int) -> Iterator[CrystalLattice]:
    """All lattices p^radius O^n <= M <= p^-radius O^n, in a fixed order.

    Each is p^-radius times the column span of an upper triangular H with
    diagonal p^e_i, 0 <= e_i <= 2 radius, and entries right of the diagonal
    in row i reduced modulo p^e_i.
    """
    top = 2 * radius
    bound = Matrix.identity(ctx, n) * ctx.p_power(top)
    shift = ctx.p_power(-radius)
    for diag in itertools.product(range(top + 1), repeat=n):
        slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
        choices = [list(_residues(ctx, diag[i])) for i, _ in slots]
        for values in itertools.product(*choices):
            rows = [[ctx.zero()] * n for _ in range(n)]
            for i in range(n):
                rows[i][i] = ctx.p_power(diag[i])
            for (i, j), coeffs in zip(slots, values):
                rows[i][j] = ctx.from_zq(coeffs)
            H = Matrix.from_rows(ctx, rows)
            if not solve(H, bound).is_integral():
                continue
            yield CrystalLattice(H * shift, f"hermite(diag={list(diag)})")


def enumerate_crystals(ic: Isocrystal, radius: int) -> list[CrystalLattice]:
    """Crystals between p^radius O^n and p^-radius O^n."""
    if ic.n > 3 or ic.p not in (2, 3) or not 0 <= radius <= 2:
        raise ScaleTooLarge("enumeration limited to n <= 3, p in {2, 3}, radius <= 2")
    count = _hermite_count(ic.ctx, ic.n, 2 * radius)
    if count > MAX_ENUMERATION:
        raise ScaleTooLarge(f"{count} candidate lattices exceed the limit of {MAX_ENUMERATION}")
    logger.debug(f"enumerating {count} candidate lattices at radius {radius}")
    return [M for M in hermite_lattices(ic.ctx, ic.n, radius) if is_crystal(ic, M)]


def j_orbit(
    ic: Isocrystal, M: CrystalLattice, depth: int = 4
) -> Iterator[tuple[Matrix, CrystalLattice]]:
    """Lattices g(M) for words g of length <= depth in the J generators, breadth first.

    Each lattice is yielded once, with the first word reaching it.
    """
    generators = j_generators(ic)
    seen: dict[Fraction, list[CrystalLattice]] = {M.index_valuation(): [M]}
    queue = deque([(Matrix.identity(ic.ctx, ic.n), M, 0)])
    while queue:
        g, L, level = queue.popleft()
        yield g, L
        if level == depth:
            continue
        for _, h in generators:
            image = L.image(h)
            bucket = seen.setdefault(image.index_valuation(), [])
            if any(image == other for other in bucket):
                continue
            bucket.append(image)
            queue.append((h @ g, image, level + 1))


def crystal_isomorphism(
    ic: Isocrystal, M1: CrystalLattice, M2: CrystalLattice, depth: int = 4
) -> Matrix | None:
    """A g in J_b(Q_p) with g(M1) = M2, or None if no word of length <= depth works.

    None is a bounded search result, not a proof that M1 and M2 are not isomorphic.
    """
    if ic.n > 3 or ic.p not in (2, 3):
        raise ScaleTooLarge("isomorphism search limited to n <= 3, p in {2, 3}")
    target = M2.index_valuation()
    for g, L in j_orbit(ic, M1, depth):
        if L.index_valuation() == target and L == M2:
            if not is_in_j(ic, g):
                logger.warning("isomorphism witness failed the J check")
                return None
            return g
    logger.debug(f"no isomorphism found within depth {depth}")
    return None
