from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from isobuild.core.exceptions import InvalidParams
from isobuild.core.util import ceil_fraction, format_rational
from isobuild.padic import FieldElement, Matrix, determinant, inverse, is_unimodular, solve

from .norm import Norm, column_scale


@dataclass(frozen=True, eq=False)
class CrystalLattice:
    """A full-rank lattice over the unramified valuation ring, given by a basis."""

    basis: Matrix
    provenance: str | None = field(default=None)

    def __post_init__(self):
        if not self.basis.is_square():
            raise InvalidParams("lattice basis must be square")
        if self.basis.ctx.d != 1:
            raise InvalidParams("lattices live over the unramified valuation ring")
        if determinant(self.basis).is_zero():
            raise InvalidParams("lattice basis is not invertible")

    @property
    def n(self) -> int:
        return self.basis.nrows

    def contains(self, x: Sequence[FieldElement]) -> bool:
        column = Matrix.from_columns(self.basis.ctx, [x], len(x))
        return solve(self.basis, column).is_integral()

    def contains_lattice(self, other: CrystalLattice) -> bool:
        return solve(self.basis, other.basis).is_integral()

    def scaled(self, k: int) -> CrystalLattice:
        """p^k M."""
        return CrystalLattice(self.basis * self.basis.ctx.p_power(k), self.provenance)

    def image(self, g: Matrix) -> CrystalLattice:
        return CrystalLattice(g @ self.basis, self.provenance)

    def index_valuation(self) -> Fraction:
        """val(det) of the basis, the length of M relative to the standard lattice."""
        return determinant(self.basis).valuation

    def __eq__(self, other) -> bool:
        if not isinstance(other, CrystalLattice):
            return NotImplemented
        return is_unimodular(inverse(self.basis) @ other.basis)

    def to_json(self) -> dict:
        data = {"basis": self.basis.to_json()}
        if self.provenance:
            data["provenance"] = self.provenance
        return data


def ball_lattice(alpha: Norm, radius: Fraction | int) -> CrystalLattice:
    """The ball {x : alpha(x) <= p^-radius}, i.e. {x : e(x) >= radius}.

    Over the unramified ring val(y_i) is an integer, so the condition
    val(y_i) >= radius - c_i rounds up.
    """
    radius = Fraction(radius)
    if alpha.ctx.d != 1:
        raise InvalidParams("ball lattices need a norm basis over the unramified field")
    powers = [Fraction(ceil_fraction(radius - c)) for c in alpha.exponents]
    provenance = f"ball(radius={format_rational(radius)}, exponents={[format_rational(c) for c in alpha.exponents]})"
    return CrystalLattice(column_scale(alpha.basis, powers), provenance)


def standard_lattice(ctx, n: int) -> CrystalLattice:
    return CrystalLattice(Matrix.identity(ctx, n), "standard")
