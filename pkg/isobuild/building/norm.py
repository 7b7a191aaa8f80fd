"""Points of the building of GL_n over L, modelled as splittable norms.

A norm alpha_{B,c} sends x = sum(y_i B_i) to max_i p^-(val(y_i) + c_i). We
work with the value exponent e(x) = min_i(val(y_i) + c_i), so alpha(x) =
p^-e(x). Rational exponents are made integral by passing to an Eisenstein
context pi^d = p, where the unit ball of alpha is the lattice spanned by
the columns B_i p^(-c_i).
"""

from __future__ import annotations

import contextlib
from contextvars import ContextVar
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from isobuild.core.exceptions import (
    DenominatorCapExceeded,
    IncompatibleTower,
    InvalidParams,
    PrecisionExhausted,
)
from isobuild.core.util import INFINITY, denominator_lcm, format_rational, lcm_all
from isobuild.crystals import IsoclineDecomposition, Isocrystal, twisted_product
from isobuild.padic import (
    FieldContext,
    FieldElement,
    Matrix,
    determinant,
    extend_field,
    integral_scaling,
    inverse,
    make_field,
    smith_normal_form,
    solve,
)

DEFAULT_DENOMINATOR_CAP = 12

METRIC_CONVENTION = (
    "d(alpha,beta)^2 = sum_i r_i^2 with r the exponent differences of alpha and beta "
    "in a common splitting basis, val(p) = 1; apartment and central factor both carry "
    "the standard inner product"
)

_denominator_cap: ContextVar[int] = ContextVar("denominator_cap", default=DEFAULT_DENOMINATOR_CAP)


@contextlib.contextmanager
def denominator_cap(cap: int) -> Iterator[None]:
    """Bound the ramification used for rational exponents within the block."""
    token = _denominator_cap.set(cap)
    try:
        yield
    finally:
        _denominator_cap.reset(token)


def current_denominator_cap() -> int:
    return _denominator_cap.get()


def common_context(contexts: Sequence[FieldContext], exponents: Sequence[Fraction] = ()) -> FieldContext:
    """The smallest context containing all `contexts` in which p^c is defined for all c."""
    first = contexts[0]
    if any(c.p != first.p or c.N != first.N for c in contexts):
        raise IncompatibleTower("norms live over different primes or precisions")
    m = lcm_all(c.m for c in contexts)
    d = lcm_all([c.d for c in contexts] + [denominator_lcm(exponents)])
    cap = _denominator_cap.get()
    if d > cap:
        raise DenominatorCapExceeded(f"ramification {d} exceeds the denominator cap {cap}")
    return make_field(first.p, m, first.N, d)


def column_scale(B: Matrix, powers: Sequence[Fraction]) -> Matrix:
    """B diag(p^powers)."""
    ctx = B.ctx
    scales = [ctx.p_power(e) for e in powers]
    return Matrix(
        ctx, tuple(tuple(a * s for a, s in zip(row, scales)) for row in B.rows), B.ncols
    )


@dataclass(frozen=True, eq=False)
class Norm:
    basis: Matrix
    exponents: tuple[Fraction, ...]

    def __post_init__(self):
        exponents = tuple(Fraction(c) for c in self.exponents)
        object.__setattr__(self, "exponents", exponents)
        if not self.basis.is_square() or self.basis.nrows != len(exponents):
            raise InvalidParams(
                f"basis of shape {self.basis.shape} does not match {len(exponents)} exponents"
            )
        cap = _denominator_cap.get()
        if denominator_lcm(exponents) > cap:
            raise DenominatorCapExceeded(
                f"exponent denominators exceed the cap {cap}: {[format_rational(c) for c in exponents]}"
            )
        if determinant(self.basis).is_zero():
            raise InvalidParams("norm basis is not invertible")

    @classmethod
    def standard(cls, ctx: FieldContext, exponents: Sequence[Fraction | int]) -> Norm:
        return cls(Matrix.identity(ctx, len(exponents)), tuple(Fraction(c) for c in exponents))

    @property
    def ctx(self) -> FieldContext:
        return self.basis.ctx

    @property
    def n(self) -> int:
        return len(self.exponents)

    def context_for(self, *others: Norm) -> FieldContext:
        contexts = [self.ctx] + [o.ctx for o in others]
        exponents = list(self.exponents) + [c for o in others for c in o.exponents]
        return common_context(contexts, exponents)

    def unit_ball_basis(self, ctx: FieldContext) -> Matrix:
        """Columns B_i p^(-c_i), an O_E-basis of {x : alpha(x) <= 1}."""
        B = self.basis.extend(ctx.m, ctx.d)
        return column_scale(B, [-c for c in self.exponents])

    def to_json(self) -> dict:
        return {
            "basis": self.basis.to_json(),
            "exponents": [format_rational(c) for c in self.exponents],
        }

    def __repr__(self) -> str:
        return f"Norm(exponents={[format_rational(c) for c in self.exponents]}, basis={self.basis})"


def canonicalize(alpha: Norm) -> Norm:
    """Columns divided by their leading entry, then sorted by exponent."""
    columns = []
    for i, col in enumerate(alpha.basis.columns()):
        lead = next(a for a in col if not a.is_zero())
        scaled = tuple(a / lead for a in col)
        c = alpha.exponents[i] - lead.valuation
        columns.append((c, _column_key(scaled), scaled))
    columns.sort(key=lambda item: (item[0], item[1]))
    basis = Matrix.from_columns(alpha.ctx, [col for _, _, col in columns], alpha.n)
    return Norm(basis, tuple(c for c, _, _ in columns))


def _column_key(col: Sequence[FieldElement]) -> tuple:
    return tuple(
        (INFINITY, ()) if a.is_zero() else (a.valuation, a.unit) for a in col
    )


def norm_eval(alpha: Norm, x: Sequence[FieldElement]) -> Fraction | float:
    """The value exponent e(x), alpha(x) = p^-e(x); INFINITY for x = 0."""
    ctx = common_context([alpha.ctx, x[0].ctx])
    B = alpha.basis.extend(ctx.m, ctx.d)
    column = Matrix.from_columns(x[0].ctx, [x], len(x)).extend(ctx.m, ctx.d)
    y = solve(B, column).column(0)
    return min(
        (a.valuation + c for a, c in zip(y, alpha.exponents) if not a.is_zero()),
        default=INFINITY,
    )


@dataclass(frozen=True, eq=False)
class RelPosition:
    """Relative position r, sorted descending, with the splitting frame it came from.

    In the frame `basis` (a common splitting basis), alpha has exponents 0 and
    beta has exponents `offsets`; `values` is `offsets` sorted descending.
    """

    values: tuple[Fraction, ...]
    offsets: tuple[Fraction, ...]
    basis: Matrix

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def distance_squared(self) -> Fraction:
        return sum((v * v for v in self.values), Fraction(0))

    def to_json(self) -> list[str]:
        return [format_rational(v) for v in self.values]


def rel_position(alpha: Norm, beta: Norm) -> RelPosition:
    ctx = alpha.context_for(beta)
    La = alpha.unit_ball_basis(ctx)
    Lb = beta.unit_ball_basis(ctx)
    T = inverse(La) @ Lb
    k = integral_scaling(T)
    snf = smith_normal_form(T * ctx.p_power(Fraction(k, ctx.d)))
    if any(a == INFINITY for a in snf.exponents):
        raise PrecisionExhausted("relative position is not determined at working precision")
    offsets = tuple(Fraction(k - a, ctx.d) for a in snf.exponents)
    frame = La @ inverse(snf.U)
    return RelPosition(
        values=tuple(sorted(offsets, reverse=True)), offsets=offsets, basis=frame
    )


def norms_equal(alpha: Norm, beta: Norm) -> bool:
    return rel_position(alpha, beta).is_zero()


def distance_squared(alpha: Norm, beta: Norm) -> Fraction:
    return rel_position(alpha, beta).distance_squared()


def _aligned(g: Matrix, B: Matrix) -> tuple[Matrix, Matrix]:
    ctx = common_context([g.ctx, B.ctx])
    return g.extend(ctx.m, ctx.d), B.extend(ctx.m, ctx.d)


def group_act(g: Matrix, alpha: Norm) -> Norm:
    """(g alpha)(x) = alpha(g^-1 x), i.e. alpha_{gB, c}."""
    g, B = _aligned(g, alpha.basis)
    return Norm(g @ B, alpha.exponents)


def sigma_act(alpha: Norm, k: int = 1) -> Norm:
    """(sigma^k alpha)(x) = alpha(sigma^-k x), i.e. alpha_{sigma^k(B), c}."""
    return Norm(alpha.basis.frobenius(k), alpha.exponents)


def fb_act(ic: Isocrystal, alpha: Norm) -> Norm:
    """The isometry F = b sigma: alpha_{B,c} -> alpha_{b sigma(B), c}."""
    b, B = _aligned(ic.b, alpha.basis)
    return Norm(b @ B.frobenius(), alpha.exponents)


def power_fb_act(ic: Isocrystal, alpha: Norm, k: int) -> Norm:
    """F^k = (b sigma)^k, acting through the twisted product and sigma^k."""
    if k < 1:
        raise InvalidParams(f"power k={k} must be >= 1")
    power, B = _aligned(twisted_product(ic.b, k), alpha.basis)
    return Norm(power @ B.frobenius(k), alpha.exponents)


def scale_by_power(alpha: Norm, mu: Fraction | int) -> Norm:
    """p^mu alpha, exponents c - mu."""
    mu = Fraction(mu)
    return Norm(alpha.basis, tuple(c - mu for c in alpha.exponents))


def geodesic_point(alpha: Norm, beta: Norm, t: Fraction | int) -> Norm:
    """The point at fraction t of the geodesic from alpha to beta."""
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise InvalidParams(f"geodesic parameter {t} is outside [0, 1]")
    if t == 0:
        return alpha
    if t == 1:
        return beta
    rel = rel_position(alpha, beta)
    return Norm(rel.basis, tuple(t * r for r in rel.offsets))


def restrict_norm(alpha: Norm, W: Matrix) -> Norm:
    """alpha restricted to the column span of W, as a norm in W-coordinates."""
    ctx = common_context([alpha.ctx, W.ctx], alpha.exponents)
    L = alpha.unit_ball_basis(ctx)
    M = solve(L, W.extend(ctx.m, ctx.d))
    snf = smith_normal_form(M)
    if any(a == INFINITY for a in snf.exponents):
        raise PrecisionExhausted("subspace columns are dependent at working precision")
    return Norm(snf.V, tuple(Fraction(a, ctx.d) for a in snf.exponents))


def restricted_in_ambient(W: Matrix, restricted: Norm) -> tuple[list, tuple[Fraction, ...]]:
    """Ambient columns W V and exponents of a norm returned by `restrict_norm`."""
    Wx, V = _aligned(W, restricted.basis)
    return (Wx @ V).columns(), restricted.exponents


def levi_adapt(alpha: Norm, dec: IsoclineDecomposition) -> tuple[Norm, bool]:
    """The adapted norm alpha_M(sum x_lambda) = max alpha(x_lambda), and whether alpha = alpha_M."""
    blocks = []
    for block in dec.blocks:
        W = dec.block_basis(block)
        blocks.append(restricted_in_ambient(W, restrict_norm(alpha, W)))
    ctx = common_context([cols[0][0].ctx for cols, _ in blocks])
    columns = [
        tuple(extend_field(a, ctx.m, ctx.d) for a in col)
        for cols, _ in blocks
        for col in cols
    ]
    exponents = tuple(c for _, exps in blocks for c in exps)
    adapted = Norm(Matrix.from_columns(ctx, columns, alpha.n), exponents)
    return adapted, norms_equal(alpha, adapted)


def det_component(alpha: Norm) -> Fraction:
    """Coordinate along the central factor: mean(c) - val(det B)/n."""
    n = alpha.n
    return sum(alpha.exponents, Fraction(0)) / n - determinant(alpha.basis).valuation / n
