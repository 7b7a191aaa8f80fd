from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from isobuild.core.exceptions import DecompositionUnverified
from isobuild.core.logger import logger
from isobuild.core.util import format_rational
from isobuild.padic import (
    Matrix,
    charpoly,
    evaluate_polynomial,
    kernel_basis,
    rank,
    slope_factorization,
)

from .isocrystal import Isocrystal, newton_point, twisted_power, twisted_product


@dataclass(frozen=True)
class IsoclineBlock:
    slope: Fraction
    dim: int
    start: int

    @property
    def stop(self) -> int:
        return self.start + self.dim


@dataclass(frozen=True, eq=False)
class IsoclineDecomposition:
    """Basis of L^n with columns grouped by slope, slopes increasing."""

    basis: Matrix
    blocks: tuple[IsoclineBlock, ...]

    def block_basis(self, block: IsoclineBlock) -> Matrix:
        return self.basis.select_columns(range(block.start, block.stop))

    def to_json(self) -> dict:
        return {
            "basis": self.basis.to_json(),
            "blocks": [
                {"slope": format_rational(b.slope), "dim": b.dim, "columns": [b.start, b.stop]}
                for b in self.blocks
            ],
        }


def _check_stable(ic: Isocrystal, W: Matrix, slope: Fraction) -> None:
    image = ic.b @ W.frobenius()
    if rank(W.hstack(image)) != W.ncols:
        raise DecompositionUnverified(f"slope {slope} subspace is not F-stable at precision")


def isocline_decomposition(ic: Isocrystal) -> IsoclineDecomposition:
    np = newton_point(ic)
    if np.is_basic():
        lam, h = np.slopes[0]
        return IsoclineDecomposition(
            basis=Matrix.identity(ic.ctx, ic.n), blocks=(IsoclineBlock(lam, h, 0),)
        )

    # Clear denominators: at m = s * lcm, F^m has integral slopes m * lambda.
    m = ic.s * np.denominator
    power = twisted_power(ic, m)
    factors = slope_factorization(charpoly(power))
    logger.debug(f"Isocline decomposition at m={m}: {len(factors)} slope factors")

    columns = []
    blocks = []
    for (lam, h), (mu, f) in zip(np.slopes, factors):
        if mu != m * lam:
            raise DecompositionUnverified(f"factor slope {mu} does not match {m} * {lam}")
        W = kernel_basis(evaluate_polynomial(f, power))
        if W.ncols != h:
            raise DecompositionUnverified(
                f"slope {lam} subspace has dimension {W.ncols}, expected {h}"
            )
        _check_stable(ic, W, lam)
        blocks.append(IsoclineBlock(lam, h, len(columns)))
        columns.extend(W.columns())

    basis = Matrix.from_columns(ic.ctx, columns, ic.n)
    if rank(basis) != ic.n:
        raise DecompositionUnverified("isocline subspaces do not span the space")
    return IsoclineDecomposition(basis=basis, blocks=tuple(blocks))


def is_decent(ic: Isocrystal, s: int) -> bool:
    """Whether (b sigma)^s = (s nu)(p) sigma^s, i.e. b is defined over Q_{p^s}
    and the twisted product acts on each slope-lambda part as p^(s lambda)."""
    np = newton_point(ic)
    if any((s * lam).denominator != 1 for lam, _ in np.slopes):
        return False
    if ic.b.frobenius(s) != ic.b:
        return False
    dec = isocline_decomposition(ic)
    power = twisted_product(ic.b, s)
    for block in dec.blocks:
        W = dec.block_basis(block)
        if power @ W != W * ic.ctx.p_power(s * block.slope):
            logger.debug(f"not decent at s={s}: slope {block.slope} part is not scaled")
            return False
    return True
