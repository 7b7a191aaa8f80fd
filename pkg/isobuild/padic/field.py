"""Fixed-precision arithmetic in Q_{p^m} and its Eisenstein extensions.

A context fixes ``p``, the unramified degree ``m``, the precision ``N`` in
p-digits and the ramification index ``d`` of ``pi^d = p``. The valuation ring
``O_E = Z_q[pi]/(pi^d - p)`` is stored as ``d`` "pi-digits", each an element
of ``Z_q/p^N`` written in the basis ``1, z, ..., z^(m-1)``.

Elements carry a valuation and an absolute precision, both counted in
pi-digits internally, so that cancellation is tracked instead of hidden.
Zero results of inexact arithmetic are "inexact zeros": their valuation is
INFINITY but their absolute precision is finite.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

from sympy import isprime, multiplicity

from isobuild.core.exceptions import (
    DivisionByZero,
    IncompatibleTower,
    NoConwayPolynomial,
    PrecisionExhausted,
    PrecisionTooSmall,
)
from isobuild.core.logger import logger
from isobuild.core.util import INFINITY, format_rational, parse_rational

from .conway import CONWAY_POLYNOMIALS
from .residue import ResidueField, is_irreducible

Digits = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class FieldContext:
    p: int
    m: int
    N: int
    d: int
    minpoly: tuple[int, ...]
    frob_gen: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return self.p**self.N

    @property
    def digits(self) -> int:
        """Relative precision cap in pi-digits."""
        return self.d * self.N

    @functools.cached_property
    def residue_field(self) -> ResidueField:
        return ResidueField(self.p, list(self.minpoly))

    def header(self) -> dict:
        return {"p": self.p, "m": self.m, "N": self.N, "d": self.d}

    def __repr__(self) -> str:
        return f"FieldContext(p={self.p}, m={self.m}, N={self.N}, d={self.d})"

    # Element constructors.

    def zero(self) -> FieldElement:
        return FieldElement(self, INFINITY, INFINITY, _oe_zero(self))

    def one(self) -> FieldElement:
        return self.from_int(1)

    def from_int(self, n: int) -> FieldElement:
        if n == 0:
            return self.zero()
        v = multiplicity(self.p, n)
        unit = (n // self.p**v) % self.modulus
        return self.from_zq(_zq_const(self, unit), valuation=v)

    def from_fraction(self, value: Fraction | int) -> FieldElement:
        value = Fraction(value)
        return self.from_int(value.numerator) / self.from_int(value.denominator)

    def from_zq(self, coeffs, valuation: int = 0) -> FieldElement:
        """The element p^valuation * sum(coeffs[i] z^i)."""
        coeffs = tuple(c % self.modulus for c in coeffs) + (0,) * (self.m - len(coeffs))
        digits = (coeffs,) + ((0,) * self.m,) * (self.d - 1)
        V = valuation * self.d
        return FieldElement.normalize(self, V, V + self.digits, digits)

    def from_digits(self, digits, valuation: Fraction | int = 0) -> FieldElement:
        """The element pi^(d*valuation) * sum(pi^j digits[j])."""
        V = Fraction(valuation) * self.d
        if V.denominator != 1:
            raise IncompatibleTower(f"valuation {valuation} is not in (1/{self.d})Z")
        V = int(V)
        rows = tuple(
            tuple(c % self.modulus for c in row) + (0,) * (self.m - len(row))
            for row in digits
        )
        rows = rows + ((0,) * self.m,) * (self.d - len(rows))
        return FieldElement.normalize(self, V, V + self.digits, rows)

    def from_json(self, data: dict) -> FieldElement:
        if data.get("valuation") in ("inf", None) or not data.get("unit"):
            return self.zero()
        return self.from_digits(data["unit"], parse_rational(data["valuation"]))

    def gen(self) -> FieldElement:
        """The generator z of the unramified part (a root of the Conway polynomial)."""
        return self.from_zq(_zq_gen(self))

    def uniformizer(self) -> FieldElement:
        if self.d == 1:
            return self.from_int(self.p)
        digits = [(0,) * self.m for _ in range(self.d)]
        digits[1] = _zq_const(self, 1)
        return FieldElement.normalize(self, 0, self.digits, tuple(digits))

    def p_power(self, k: Fraction | int) -> FieldElement:
        """p^k for k in (1/d)Z, i.e. pi^(d*k)."""
        k = Fraction(k)
        V = k * self.d
        if V.denominator != 1:
            raise IncompatibleTower(f"p^{k} is not in a context with d={self.d}")
        digits = (_zq_const(self, 1),) + ((0,) * self.m,) * (self.d - 1)
        return FieldElement(self, int(V), int(V) + self.digits, digits)


@functools.cache
def make_field(p: int, m: int = 1, N: int = 40, d: int = 1) -> FieldContext:
    """Build the context for Q_{p^m}(pi), pi^d = p, at precision N."""
    if not isprime(p):
        raise NoConwayPolynomial(f"{p} is not a prime")
    if m < 1 or d < 1:
        raise IncompatibleTower(f"degree m={m} and ramification d={d} must be >= 1")
    if N < 4:
        raise PrecisionTooSmall(f"precision N={N} is below the minimum of 4")
    minpoly = CONWAY_POLYNOMIALS.get((p, m))
    if minpoly is None:
        raise NoConwayPolynomial(f"no Conway polynomial shipped for (p, m) = ({p}, {m})")
    if not is_irreducible(minpoly, p):
        raise NoConwayPolynomial(f"table entry for ({p}, {m}) is reducible mod {p}")

    # Bootstrap a context whose Frobenius image is still unknown, then lift it.
    bare = FieldContext(p=p, m=m, N=N, d=d, minpoly=minpoly, frob_gen=(0,) * m)
    seed = _zq_pow(bare, _zq_gen(bare), p)
    frob_gen = _hensel_root(bare, minpoly, seed)
    ctx = FieldContext(p=p, m=m, N=N, d=d, minpoly=minpoly, frob_gen=frob_gen)

    if _sigma_power_gen(ctx, m) != _zq_gen(ctx):
        raise PrecisionExhausted(f"sigma^{m} does not fix the generator for {ctx}")
    logger.debug(f"Built {ctx} with sigma(z) = {frob_gen}")
    return ctx


def _hensel_root(ctx: FieldContext, poly: tuple[int, ...], seed: tuple[int, ...]) -> tuple[int, ...]:
    """Newton iteration in Z_q for a simple root of `poly` congruent to `seed` mod p."""
    deriv = tuple(i * c for i, c in enumerate(poly))[1:]
    y = seed
    steps = 1
    while (1 << steps) < ctx.N:
        steps += 1
    for _ in range(steps + 1):
        fy = _zq_eval(ctx, poly, y)
        dfy = _zq_eval(ctx, deriv, y)
        y = _zq_sub(ctx, y, _zq_mul(ctx, fy, _zq_inverse(ctx, dfy)))
    if any(_zq_eval(ctx, poly, y)):
        raise PrecisionExhausted("Hensel iteration for a Conway root did not converge")
    return y


# Z_q = Z_p[z]/(minpoly) modulo p^N, elements are tuples of length m.


def _zq_const(ctx: FieldContext, c: int) -> tuple[int, ...]:
    return (c % ctx.modulus,) + (0,) * (ctx.m - 1)


def _zq_gen(ctx: FieldContext) -> tuple[int, ...]:
    if ctx.m == 1:
        return ((-ctx.minpoly[0]) % ctx.modulus,)
    return (0, 1) + (0,) * (ctx.m - 2)


def _zq_add(ctx: FieldContext, a, b) -> tuple[int, ...]:
    q = ctx.modulus
    return tuple((x + y) % q for x, y in zip(a, b))


def _zq_sub(ctx: FieldContext, a, b) -> tuple[int, ...]:
    q = ctx.modulus
    return tuple((x - y) % q for x, y in zip(a, b))


def _zq_scale(ctx: FieldContext, a, c: int) -> tuple[int, ...]:
    q = ctx.modulus
    return tuple((x * c) % q for x in a)


def _zq_mul(ctx: FieldContext, a, b) -> tuple[int, ...]:
    m, q, f = ctx.m, ctx.modulus, ctx.minpoly
    prod = [0] * (2 * m - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    for k in range(2 * m - 2, m - 1, -1):
        c = prod[k] % q
        if c:
            for j in range(m + 1):
                prod[k - m + j] -= c * f[j]
    return tuple(c % q for c in prod[:m])


def _zq_pow(ctx: FieldContext, a, n: int) -> tuple[int, ...]:
    result = _zq_const(ctx, 1)
    while n:
        if n & 1:
            result = _zq_mul(ctx, result, a)
        a = _zq_mul(ctx, a, a)
        n >>= 1
    return result


def _zq_eval(ctx: FieldContext, poly, y) -> tuple[int, ...]:
    result = (0,) * ctx.m
    for c in reversed(poly):
        result = _zq_add(ctx, _zq_mul(ctx, result, y), _zq_const(ctx, c))
    return result


def _zq_inverse(ctx: FieldContext, a) -> tuple[int, ...]:
    F = ctx.residue_field
    y = F.inv(F.element([c % ctx.p for c in a]))
    two = _zq_const(ctx, 2)
    for _ in range(ctx.N.bit_length() + 1):
        y = _zq_mul(ctx, y, _zq_sub(ctx, two, _zq_mul(ctx, a, y)))
    return y


def _zq_compose(ctx: FieldContext, a, powers) -> tuple[int, ...]:
    """sum(a[i] * powers[i]) for precomputed powers of an image of z."""
    result = (0,) * ctx.m
    for c, w in zip(a, powers):
        if c:
            result = _zq_add(ctx, result, _zq_scale(ctx, w, c))
    return result


def _zq_powers(ctx: FieldContext, g) -> tuple[tuple[int, ...], ...]:
    powers = [_zq_const(ctx, 1)]
    for _ in range(ctx.m - 1):
        powers.append(_zq_mul(ctx, powers[-1], g))
    return tuple(powers)


@functools.cache
def _sigma_power_gen(ctx: FieldContext, k: int) -> tuple[int, ...]:
    """sigma^k(z) as an element of Z_q."""
    if k == 0:
        return _zq_gen(ctx)
    prev = _sigma_power_gen(ctx, k - 1)
    return _zq_compose(ctx, prev, _zq_powers(ctx, ctx.frob_gen))


@functools.cache
def _sigma_power_table(ctx: FieldContext, k: int) -> tuple[tuple[int, ...], ...]:
    return _zq_powers(ctx, _sigma_power_gen(ctx, k % ctx.m))


# O_E = Z_q[pi]/(pi^d - p) modulo p^N, elements are d-tuples of Z_q elements.


def _oe_zero(ctx: FieldContext) -> Digits:
    return ((0,) * ctx.m,) * ctx.d


def _oe_add(ctx: FieldContext, x: Digits, y: Digits) -> Digits:
    return tuple(_zq_add(ctx, a, b) for a, b in zip(x, y))


def _oe_neg(ctx: FieldContext, x: Digits) -> Digits:
    q = ctx.modulus
    return tuple(tuple((-c) % q for c in a) for a in x)


def _oe_mul(ctx: FieldContext, x: Digits, y: Digits) -> Digits:
    d = ctx.d
    acc = [(0,) * ctx.m for _ in range(2 * d - 1)]
    for i, a in enumerate(x):
        if any(a):
            for j, b in enumerate(y):
                if any(b):
                    acc[i + j] = _zq_add(ctx, acc[i + j], _zq_mul(ctx, a, b))
    for k in range(2 * d - 2, d - 1, -1):
        acc[k - d] = _zq_add(ctx, acc[k - d], _zq_scale(ctx, acc[k], ctx.p))
    return tuple(acc[:d])


def _oe_pi_val(ctx: FieldContext, x: Digits) -> float | int:
    best = INFINITY
    for j, a in enumerate(x):
        for c in a:
            if c:
                best = min(best, ctx.d * multiplicity(ctx.p, c) + j)
    return best


def _oe_shift_up(ctx: FieldContext, x: Digits, k: int) -> Digits:
    """Multiply by pi^k."""
    if k == 0:
        return x
    d, q = ctx.d, ctx.modulus
    if k >= ctx.digits:
        return _oe_zero(ctx)
    e, r = divmod(k, d)
    scale = ctx.p**e
    x = tuple(tuple((c * scale) % q for c in a) for a in x)
    if r == 0:
        return x
    low = tuple(_zq_scale(ctx, x[j - r + d], ctx.p) for j in range(r))
    return low + x[: d - r]


def _oe_shift_down(ctx: FieldContext, x: Digits, k: int) -> Digits:
    """Divide by pi^k, assuming pi^k divides x."""
    if k == 0:
        return x
    d = ctx.d
    e, r = divmod(k, d)
    scale = ctx.p**e
    x = tuple(tuple(c // scale for c in a) for a in x)
    if r == 0:
        return x
    high = tuple(tuple(c // ctx.p for c in x[j]) for j in range(r))
    return x[r:] + high


def _oe_truncate(ctx: FieldContext, x: Digits, R: int) -> Digits:
    """Reduce modulo pi^R."""
    if R >= ctx.digits:
        return x
    d, p = ctx.d, ctx.p
    rows = []
    for j, a in enumerate(x):
        e = -((j - R) // d)  # ceil((R - j) / d)
        rows.append(tuple(c % p**e for c in a) if e > 0 else (0,) * ctx.m)
    return tuple(rows)


def _oe_inverse(ctx: FieldContext, x: Digits) -> Digits:
    y = (_zq_inverse(ctx, x[0]),) + ((0,) * ctx.m,) * (ctx.d - 1)
    two = ((2 % ctx.modulus,) + (0,) * (ctx.m - 1),) + ((0,) * ctx.m,) * (ctx.d - 1)
    for _ in range(ctx.digits.bit_length() + 1):
        y = _oe_mul(ctx, y, _oe_add(ctx, two, _oe_neg(ctx, _oe_mul(ctx, x, y))))
    return y


@dataclass(frozen=True, eq=False)
class FieldElement:
    """pi^V * unit, known modulo pi^A; V and A are counted in pi-digits."""

    ctx: FieldContext
    V: float | int
    A: float | int
    unit: Digits

    @classmethod
    def normalize(cls, ctx: FieldContext, V, A, digits: Digits) -> FieldElement:
        """Pull powers of pi out of `digits`, respecting the available precision."""
        R = min(A - V, ctx.digits)
        if R <= 0:
            return cls(ctx, INFINITY, A, _oe_zero(ctx))
        digits = _oe_truncate(ctx, digits, int(R))
        k = _oe_pi_val(ctx, digits)
        if k >= R:
            return cls(ctx, INFINITY, A, _oe_zero(ctx))
        V = V + k
        A = min(A, V + ctx.digits)
        digits = _oe_shift_down(ctx, digits, k)
        return cls(ctx, V, A, _oe_truncate(ctx, digits, int(A - V)))

    # Queries.

    def is_zero(self) -> bool:
        return self.V == INFINITY

    def is_exact_zero(self) -> bool:
        return self.V == INFINITY and self.A == INFINITY

    @property
    def valuation(self) -> Fraction | float:
        if self.is_zero():
            return INFINITY
        return Fraction(self.V, self.ctx.d)

    @property
    def precision(self) -> Fraction | float:
        """Absolute precision in valuation units."""
        if self.A == INFINITY:
            return INFINITY
        return Fraction(self.A, self.ctx.d)

    @property
    def relative_precision(self) -> int:
        """Known pi-digits of the unit part."""
        if self.is_zero():
            return 0
        return int(self.A - self.V)

    def is_integral(self) -> bool:
        if self.is_zero():
            return self.A >= 0
        return self.V >= 0

    def residue(self) -> tuple[int, ...]:
        """Image in the residue field (requires an integral element)."""
        F = self.ctx.residue_field
        if self.is_zero() or self.V > 0:
            return F.zero()
        if self.V < 0:
            raise ValueError("residue of a non-integral element")
        return F.element([c % self.ctx.p for c in self.unit[0]])

    # Arithmetic.

    def _coerce(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise IncompatibleTower(f"cannot combine {self.ctx} and {other.ctx}")
            return other
        if isinstance(other, int):
            return self.ctx.from_int(other)
        if isinstance(other, Fraction):
            return self.ctx.from_fraction(other)
        return NotImplemented

    def __neg__(self) -> FieldElement:
        return FieldElement(self.ctx, self.V, self.A, _oe_neg(self.ctx, self.unit))

    def __add__(self, other) -> FieldElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        ctx = self.ctx
        A = min(self.A, other.A)
        if self.is_zero() and other.is_zero():
            return FieldElement(ctx, INFINITY, A, _oe_zero(ctx))
        if self.is_zero():
            return FieldElement.normalize(ctx, other.V, A, other.unit)
        if other.is_zero():
            return FieldElement.normalize(ctx, self.V, A, self.unit)
        w = min(self.V, other.V)
        digits = _oe_add(
            ctx,
            _oe_shift_up(ctx, self.unit, int(self.V - w)),
            _oe_shift_up(ctx, other.unit, int(other.V - w)),
        )
        return FieldElement.normalize(ctx, w, A, digits)

    __radd__ = __add__

    def __sub__(self, other) -> FieldElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> FieldElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> FieldElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        ctx = self.ctx
        if self.is_zero() and other.is_zero():
            return FieldElement(ctx, INFINITY, self.A + other.A, _oe_zero(ctx))
        A = min(self.A + other.V, other.A + self.V)
        if self.is_zero() or other.is_zero():
            return FieldElement(ctx, INFINITY, A, _oe_zero(ctx))
        digits = _oe_mul(ctx, self.unit, other.unit)
        return FieldElement.normalize(ctx, self.V + other.V, A, digits)

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        if self.is_exact_zero():
            raise DivisionByZero("division by zero")
        if self.is_zero():
            raise PrecisionExhausted(
                f"divisor is zero to precision {self.precision}; cannot invert"
            )
        ctx = self.ctx
        rel = self.A - self.V
        return FieldElement.normalize(
            ctx, -self.V, -self.V + rel, _oe_inverse(ctx, self.unit)
        )

    def __truediv__(self, other) -> FieldElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> FieldElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int) -> FieldElement:
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ctx.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def frobenius(self, k: int = 1) -> FieldElement:
        """sigma^k, acting on z and fixing Q_p and pi."""
        ctx = self.ctx
        if self.is_zero() or k % ctx.m == 0:
            return self
        table = _sigma_power_table(ctx, k)
        digits = tuple(_zq_compose(ctx, a, table) for a in self.unit)
        return FieldElement.normalize(ctx, self.V, self.A, digits)

    def to_json(self) -> dict:
        if self.is_zero():
            return {"valuation": "inf", "unit": []}
        return {
            "valuation": format_rational(self.valuation),
            "unit": [list(a) for a in self.unit],
        }

    def __repr__(self) -> str:
        if self.is_zero():
            return f"FieldElement(0, prec={self.precision})"
        return f"FieldElement(val={self.valuation}, unit={self.unit})"


def frobenius(x: FieldElement, k: int = 1) -> FieldElement:
    return x.frobenius(k)


def valuation(x: FieldElement) -> Fraction | float:
    return x.valuation


def arithmetic(op: str, x: FieldElement, y: FieldElement) -> FieldElement:
    match op:
        case "add":
            return x + y
        case "sub":
            return x - y
        case "mul":
            return x * y
        case "div":
            return x / y
        case _:
            raise ValueError(f"Unknown operation {op!r}")


@functools.cache
def _embedding_powers(src: FieldContext, dst: FieldContext) -> tuple[tuple[int, ...], ...]:
    """Powers of the image of z_src in Z_{q'}, Hensel-lifted from the Conway norm map."""
    exponent = (dst.p**dst.m - 1) // (src.p**src.m - 1)
    seed = _zq_pow(dst, _zq_gen(dst), exponent)
    root = _hensel_root(dst, src.minpoly, seed)
    if src.m == 1:
        return (_zq_const(dst, 1),)
    return _zq_powers(dst, root)


def _zq_embed(src: FieldContext, dst: FieldContext, a) -> tuple[int, ...]:
    if src.m == 1:
        return _zq_const(dst, a[0])
    return _zq_compose(dst, a, _embedding_powers(src, dst))


def extend_field(x: FieldElement, m: int, d: int) -> FieldElement:
    """Embed x into Q_{p^m}(pi'), pi'^d = p, with pi -> pi'^(d/d_x)."""
    src = x.ctx
    if m % src.m or d % src.d:
        raise IncompatibleTower(
            f"cannot embed degree {src.m}, ramification {src.d} into degree {m}, ramification {d}"
        )
    if m == src.m and d == src.d:
        return x
    dst = make_field(src.p, m, src.N, d)
    e = d // src.d
    A = x.A * e
    if x.is_zero():
        return FieldElement(dst, INFINITY, A, _oe_zero(dst))
    rows = [(0,) * dst.m for _ in range(d)]
    for j, a in enumerate(x.unit):
        rows[j * e] = _zq_embed(src, dst, a)
    return FieldElement.normalize(dst, x.V * e, A, tuple(rows))
