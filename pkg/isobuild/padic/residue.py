"""Residue fields ``GF(q) = GF(p)[z]/(f)`` of unramified contexts.

Elements of ``GF(q)`` are tuples of length ``m``, lowest degree first.
Arithmetic modulo ``f`` goes through sympy's dense ``GF(p)[x]`` routines, which
store coefficients highest degree first. Polynomials over ``GF(q)`` are lists
of elements, lowest degree first, with no trailing zeros.
"""

from __future__ import annotations

from functools import cached_property

from sympy.polys import galoistools as gf
from sympy.polys.domains import ZZ


def to_dense(coeffs, p: int) -> list:
    """Lowest-first integer coefficients as a reduced sympy dense polynomial."""
    return gf.gf_trunc([ZZ(c) for c in reversed(list(coeffs))], p)


def from_dense(f: list, m: int) -> tuple[int, ...]:
    coeffs = [int(c) for c in reversed(f)]
    return tuple(coeffs) + (0,) * (m - len(coeffs))


def is_irreducible(coeffs, p: int) -> bool:
    f = to_dense(coeffs, p)
    return gf.gf_degree(f) >= 1 and gf.gf_irreducible_p(f, p, ZZ)


class ResidueField:
    """The residue field ``GF(p)[z]/(f)`` of an unramified context."""

    def __init__(self, p: int, modulus: list[int]):
        self.p = p
        self.modulus = to_dense(modulus, p)
        self.m = gf.gf_degree(self.modulus)

    @cached_property
    def order(self) -> int:
        return self.p**self.m

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.m

    def one(self) -> tuple[int, ...]:
        return (1,) + (0,) * (self.m - 1)

    def _dense(self, a) -> list:
        return to_dense(a, self.p)

    def element(self, coeffs) -> tuple[int, ...]:
        return from_dense(gf.gf_rem(self._dense(coeffs), self.modulus, self.p, ZZ), self.m)

    def is_zero(self, a: tuple[int, ...]) -> bool:
        return not any(a)

    def add(self, a, b):
        return from_dense(gf.gf_add(self._dense(a), self._dense(b), self.p, ZZ), self.m)

    def sub(self, a, b):
        return from_dense(gf.gf_sub(self._dense(a), self._dense(b), self.p, ZZ), self.m)

    def mul(self, a, b):
        product = gf.gf_mul(self._dense(a), self._dense(b), self.p, ZZ)
        return from_dense(gf.gf_rem(product, self.modulus, self.p, ZZ), self.m)

    def pow(self, a, n: int):
        return from_dense(gf.gf_pow_mod(self._dense(a), n, self.modulus, self.p, ZZ), self.m)

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero in the residue field")
        s, _, _ = gf.gf_gcdex(self._dense(a), self.modulus, self.p, ZZ)
        return from_dense(s, self.m)

    # Polynomials over GF(q): lists of field elements, lowest degree first.

    def poly_strip(self, f: list) -> list:
        f = list(f)
        while f and self.is_zero(f[-1]):
            f.pop()
        return f

    def poly_sub(self, f: list, g: list) -> list:
        n = max(len(f), len(g))
        f = list(f) + [self.zero()] * (n - len(f))
        g = list(g) + [self.zero()] * (n - len(g))
        return self.poly_strip([self.sub(a, b) for a, b in zip(f, g)])

    def poly_mul(self, f: list, g: list) -> list:
        if not f or not g:
            return []
        h = [self.zero()] * (len(f) + len(g) - 1)
        for i, a in enumerate(f):
            for j, b in enumerate(g):
                h[i + j] = self.add(h[i + j], self.mul(a, b))
        return self.poly_strip(h)

    def poly_divmod(self, f: list, g: list) -> tuple[list, list]:
        g = self.poly_strip(g)
        if not g:
            raise ZeroDivisionError("polynomial division by zero")
        inv = self.inv(g[-1])
        r = self.poly_strip(f)
        q = [self.zero()] * max(len(r) - len(g) + 1, 0)
        while len(r) >= len(g):
            c = self.mul(r[-1], inv)
            shift = len(r) - len(g)
            q[shift] = c
            for j, b in enumerate(g):
                r[shift + j] = self.sub(r[shift + j], self.mul(c, b))
            r = self.poly_strip(r)
        return self.poly_strip(q), r

    def poly_gcdex(self, f: list, g: list) -> tuple[list, list, list]:
        """Return ``(s, t, h)`` with ``s*f + t*g = h = gcd(f, g)``, ``h`` monic."""
        r0, r1 = self.poly_strip(f), self.poly_strip(g)
        s0, s1 = [self.one()], []
        t0, t1 = [], [self.one()]
        while r1:
            q, r = self.poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, self.poly_sub(s0, self.poly_mul(q, s1))
            t0, t1 = t1, self.poly_sub(t0, self.poly_mul(q, t1))
        if not r0:
            return s0, t0, r0
        inv = [self.inv(r0[-1])]
        return (
            self.poly_mul(s0, inv),
            self.poly_mul(t0, inv),
            self.poly_mul(r0, inv),
        )
