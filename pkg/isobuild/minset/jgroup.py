"""Constructive elements of J_b(Q_p) = {g : g b = b sigma(g)}.

Families are built in standard coordinates and transported by the frame:
if b = g0 b_std sigma(g0)^-1 then J_b = g0 J_{b_std} g0^-1.
"""

from __future__ import annotations

import random
from fractions import Fraction

from isobuild.core.exceptions import InvalidParams, NotInJ
from isobuild.core.logger import logger
from isobuild.crystals import Isocrystal, SimpleBlock, newton_point
from isobuild.padic import FieldContext, FieldElement, Matrix, inverse

from .minset import standard_frame

J_FAMILIES = ("identity", "scalar", "block_scalar", "frobenius", "quaternion", "permutation")


def is_in_j(ic: Isocrystal, g: Matrix) -> bool:
    return g @ ic.b == ic.b @ g.frobenius()


def _random_unit(ctx: FieldContext, rng: random.Random) -> FieldElement:
    """A random unit of Z_p."""
    p = ctx.p
    return ctx.from_int(rng.randrange(1, p) + p * rng.randrange(0, p**3))


def _random_scalar(ctx: FieldContext, rng: random.Random) -> FieldElement:
    return _random_unit(ctx, rng) * ctx.p_power(rng.randint(-2, 2))


def _block_matrix(ctx: FieldContext, n: int, blocks: list[tuple[SimpleBlock, Matrix]]) -> Matrix:
    """Identity outside the given blocks, the given matrices on them."""
    rows = [list(r) for r in Matrix.identity(ctx, n).rows]
    for block, g in blocks:
        for i in range(block.size):
            for j in range(block.size):
                rows[block.start + i][block.start + j] = g[i, j]
    return Matrix.from_rows(ctx, rows)


def _companion(ctx: FieldContext, block: SimpleBlock) -> Matrix:
    h = block.size
    rows = [[0] * h for _ in range(h)]
    for i in range(1, h):
        rows[i][i - 1] = 1
    rows[0][h - 1] = Fraction(ctx.p) ** block.numerator
    return Matrix.from_rows(ctx, rows)


def _quadratic_element(ctx: FieldContext, rng: random.Random) -> FieldElement:
    """A random element of Q_{p^2} inside Q_{p^m}, as a trace of a random element."""
    x = ctx.from_zq([rng.randrange(0, ctx.p**4) for _ in range(ctx.m)])
    total = ctx.zero()
    for k in range(0, ctx.m, 2):
        total = total + x.frobenius(k)
    return total


def quaternion_block(u: FieldElement, v: FieldElement) -> Matrix:
    """[[u, p sigma(v)], [v, sigma(u)]], which commutes with F on a slope-1/2 block."""
    ctx = u.ctx
    return Matrix.from_rows(ctx, [[u, v.frobenius() * ctx.p], [v, u.frobenius()]])


def _standard_element(ic: Isocrystal, family: str, rng: random.Random) -> Matrix:
    ctx = ic.ctx
    blocks = list(newton_point(ic).simple_blocks())
    match family:
        case "identity":
            return Matrix.identity(ctx, ic.n)
        case "scalar":
            return Matrix.identity(ctx, ic.n) * _random_scalar(ctx, rng)
        case "block_scalar":
            return _block_matrix(
                ctx,
                ic.n,
                [(b, Matrix.identity(ctx, b.size) * _random_scalar(ctx, rng)) for b in blocks],
            )
        case "frobenius":
            return _block_matrix(
                ctx, ic.n, [(b, _companion(ctx, b) ** rng.randint(-2, 2)) for b in blocks]
            )
        case "quaternion":
            halves = [b for b in blocks if b.slope == Fraction(1, 2)]
            if not halves or ctx.m % 2:
                raise InvalidParams("quaternion family needs a slope-1/2 block and even degree")
            block = rng.choice(halves)
            while True:
                u, v = _quadratic_element(ctx, rng), _quadratic_element(ctx, rng)
                if not (u.is_zero() and v.is_zero()):
                    break
            return _block_matrix(ctx, ic.n, [(block, quaternion_block(u, v))])
        case "permutation":
            pairs = [
                (a, b)
                for i, a in enumerate(blocks)
                for b in blocks[i + 1 :]
                if a.slope == b.slope
            ]
            if not pairs:
                raise InvalidParams("permutation family needs two simple blocks of equal slope")
            a, b = rng.choice(pairs)
            return _swap_blocks(ctx, ic.n, a, b)
        case _:
            raise InvalidParams(f"unknown J family {family!r}")


def _swap_blocks(ctx: FieldContext, n: int, a: SimpleBlock, b: SimpleBlock) -> Matrix:
    perm = list(range(n))
    for i in range(a.size):
        perm[a.start + i], perm[b.start + i] = b.start + i, a.start + i
    rows = [[0] * n for _ in range(n)]
    for j, i in enumerate(perm):
        rows[i][j] = 1
    return Matrix.from_rows(ctx, rows)


def applicable_families(ic: Isocrystal) -> list[str]:
    blocks = list(newton_point(ic).simple_blocks())
    families = ["identity", "scalar", "block_scalar", "frobenius"]
    if ic.ctx.m % 2 == 0 and any(b.slope == Fraction(1, 2) for b in blocks):
        families.append("quaternion")
    if any(a.slope == b.slope for i, a in enumerate(blocks) for b in blocks[i + 1 :]):
        families.append("permutation")
    return families


def transport(ic: Isocrystal, g: Matrix) -> Matrix:
    """Move a standard-coordinates element of J to the coordinates of ic."""
    frame = standard_frame(ic)
    return frame @ g @ inverse(frame)


def sample_j_element(ic: Isocrystal, family: str = "random", rng: random.Random | None = None) -> Matrix:
    """A verified element g of J_b(Q_p) from one of the constructive families."""
    rng = rng or random.Random(0)
    if family == "random":
        family = rng.choice(applicable_families(ic))
    g = transport(ic, _standard_element(ic, family, rng))
    if not is_in_j(ic, g):
        raise NotInJ(f"candidate from family {family!r} fails g b = b sigma(g)")
    logger.debug(f"sampled J element from family {family!r}")
    return g


def j_generators(ic: Isocrystal) -> list[tuple[str, Matrix]]:
    """A deterministic generating list for bounded searches, with inverses."""
    ctx = ic.ctx
    blocks = list(newton_point(ic).simple_blocks())
    p = ctx.p_power(1)
    gens: list[tuple[str, Matrix]] = [
        ("p", Matrix.identity(ctx, ic.n) * p),
        ("p^-1", Matrix.identity(ctx, ic.n) * p.inverse()),
    ]
    for k, block in enumerate(blocks):
        comp = _companion(ctx, block)
        if block.size > 1:
            gens.append((f"frob[{k}]", _block_matrix(ctx, ic.n, [(block, comp)])))
            gens.append((f"frob[{k}]^-1", _block_matrix(ctx, ic.n, [(block, inverse(comp))])))
        if len(blocks) > 1:
            scal = Matrix.identity(ctx, block.size)
            gens.append((f"p[{k}]", _block_matrix(ctx, ic.n, [(block, scal * p)])))
            gens.append((f"p[{k}]^-1", _block_matrix(ctx, ic.n, [(block, scal * p.inverse())])))
        if block.slope == Fraction(1, 2) and ctx.m % 2 == 0:
            u = _quadratic_element(ctx, random.Random(k))
            if u.valuation == 0:
                quat = quaternion_block(u, ctx.zero())
                gens.append((f"quat[{k}]", _block_matrix(ctx, ic.n, [(block, quat)])))
    for i, a in enumerate(blocks):
        for j in range(i + 1, len(blocks)):
            if blocks[j].slope == a.slope:
                gens.append((f"swap[{i},{j}]", _swap_blocks(ctx, ic.n, a, blocks[j])))
    return [(name, transport(ic, g)) for name, g in gens]
