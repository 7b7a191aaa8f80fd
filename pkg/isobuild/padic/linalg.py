"""Matrices over a field context, with valuation-aware elimination.

Pivots are always chosen of minimal valuation, so that every multiplier is
integral and precision loss stays bounded by the pivot valuations. Inexact
zeros are treated as zero when looking for pivots.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from isobuild.core.exceptions import DivisionByZero, PrecisionExhausted
from isobuild.core.util import INFINITY

from .field import FieldContext, FieldElement, extend_field
from .polynomial import Polynomial


@dataclass(frozen=True, eq=False)
class Matrix:
    ctx: FieldContext
    rows: tuple[tuple[FieldElement, ...], ...]
    ncols: int

    @classmethod
    def from_rows(cls, ctx: FieldContext, rows: Iterable[Sequence]) -> Matrix:
        out = []
        for row in rows:
            out.append(tuple(_coerce(ctx, x) for x in row))
        ncols = len(out[0]) if out else 0
        if any(len(r) != ncols for r in out):
            raise ValueError("ragged matrix rows")
        return cls(ctx, tuple(out), ncols)

    @classmethod
    def from_columns(cls, ctx: FieldContext, columns: Sequence[Sequence], nrows: int) -> Matrix:
        if not columns:
            return cls(ctx, tuple(() for _ in range(nrows)), 0)
        return cls.from_rows(ctx, zip(*columns))

    @classmethod
    def identity(cls, ctx: FieldContext, n: int) -> Matrix:
        return cls.diagonal(ctx, [ctx.one()] * n)

    @classmethod
    def zeros(cls, ctx: FieldContext, nrows: int, ncols: int) -> Matrix:
        return cls(ctx, tuple((ctx.zero(),) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def diagonal(cls, ctx: FieldContext, entries: Sequence) -> Matrix:
        n = len(entries)
        rows = [[ctx.zero()] * n for _ in range(n)]
        for i, x in enumerate(entries):
            rows[i][i] = _coerce(ctx, x)
        return cls.from_rows(ctx, rows)

    @classmethod
    def block_diagonal(cls, ctx: FieldContext, blocks: Sequence[Matrix]) -> Matrix:
        n = sum(b.nrows for b in blocks)
        rows = [[ctx.zero()] * n for _ in range(n)]
        offset = 0
        for b in blocks:
            for i in range(b.nrows):
                for j in range(b.ncols):
                    rows[offset + i][offset + j] = b[i, j]
            offset += b.nrows
        return cls.from_rows(ctx, rows)

    # Shape and access.

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, index: tuple[int, int]) -> FieldElement:
        i, j = index
        return self.rows[i][j]

    def column(self, j: int) -> tuple[FieldElement, ...]:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list[tuple[FieldElement, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
        return Matrix(self.ctx, tuple(tuple(self.rows[i][j] for j in cols) for i in rows), len(cols))

    def select_columns(self, cols: Sequence[int]) -> Matrix:
        return self.submatrix(range(self.nrows), cols)

    def hstack(self, other: Matrix) -> Matrix:
        return Matrix(
            self.ctx,
            tuple(a + b for a, b in zip(self.rows, other.rows)),
            self.ncols + other.ncols,
        )

    def transpose(self) -> Matrix:
        return Matrix.from_columns(self.ctx, list(self.rows), self.ncols)

    # Arithmetic.

    def __add__(self, other: Matrix) -> Matrix:
        return Matrix(
            self.ctx,
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.ncols,
        )

    def __sub__(self, other: Matrix) -> Matrix:
        return Matrix(
            self.ctx,
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.ncols,
        )

    def __mul__(self, scalar: FieldElement | int | Fraction) -> Matrix:
        if isinstance(scalar, Matrix):
            return NotImplemented
        scalar = _coerce(self.ctx, scalar)
        return Matrix(self.ctx, tuple(tuple(a * scalar for a in r) for r in self.rows), self.ncols)

    __rmul__ = __mul__

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = other.columns()
        rows = []
        for r in self.rows:
            out = []
            for c in cols:
                acc = self.ctx.zero()
                for a, b in zip(r, c):
                    if not (a.is_exact_zero() or b.is_exact_zero()):
                        acc = acc + a * b
                out.append(acc)
            rows.append(tuple(out))
        return Matrix(self.ctx, tuple(rows), other.ncols)

    def apply(self, vector: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
        col = Matrix.from_columns(self.ctx, [vector], len(vector))
        return (self @ col).column(0)

    def __pow__(self, k: int) -> Matrix:
        if k < 0:
            return inverse(self) ** (-k)
        result = Matrix.identity(self.ctx, self.nrows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        return all(a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    def frobenius(self, k: int = 1) -> Matrix:
        if k % self.ctx.m == 0:
            return self
        return Matrix(
            self.ctx, tuple(tuple(a.frobenius(k) for a in r) for r in self.rows), self.ncols
        )

    def extend(self, m: int, d: int) -> Matrix:
        if (m, d) == (self.ctx.m, self.ctx.d):
            return self
        rows = tuple(tuple(extend_field(a, m, d) for a in r) for r in self.rows)
        ctx = rows[0][0].ctx if rows and rows[0] else _extended_ctx(self.ctx, m, d)
        return Matrix(ctx, rows, self.ncols)

    # Valuations.

    def min_valuation(self) -> Fraction | float:
        return min((a.valuation for r in self.rows for a in r), default=INFINITY)

    def is_integral(self) -> bool:
        return all(a.is_integral() for r in self.rows for a in r)

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def is_diagonal(self) -> bool:
        return all(
            self.rows[i][j].is_zero()
            for i in range(self.nrows)
            for j in range(self.ncols)
            if i != j
        )

    def to_json(self) -> list[list[dict]]:
        return [[a.to_json() for a in r] for r in self.rows]

    def __repr__(self) -> str:
        return f"Matrix({self.nrows}x{self.ncols}, {[list(r) for r in self.rows]})"


def _coerce(ctx: FieldContext, x) -> FieldElement:
    if isinstance(x, FieldElement):
        return x
    return ctx.from_fraction(x)


def _extended_ctx(ctx: FieldContext, m: int, d: int) -> FieldContext:
    from .field import make_field

    return make_field(ctx.p, m, ctx.N, d)


def _pick_pivot(
    rows: list[list[FieldElement]], row_range: range, col_range: range
) -> tuple[int, int] | None:
    """Position of an entry of minimal valuation, ties broken row-major."""
    best = None
    best_val = INFINITY
    for i in row_range:
        for j in col_range:
            v = rows[i][j].valuation
            if v < best_val:
                best, best_val = (i, j), v
    return best


def _certify_pivot(rows: list[list[FieldElement]], row_range: range, col_range: range, v) -> None:
    for i in row_range:
        for j in col_range:
            a = rows[i][j]
            if a.is_zero() and a.precision < v:
                raise PrecisionExhausted(
                    f"entry ({i}, {j}) is zero only to precision {a.precision}, "
                    f"below the pivot valuation {v}"
                )


def row_reduce(A: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    rows = [list(r) for r in A.rows]
    pivots = []
    r = 0
    for c in range(A.ncols):
        if r == A.nrows:
            break
        pos = _pick_pivot(rows, range(r, A.nrows), range(c, c + 1))
        if pos is None:
            continue
        i = pos[0]
        rows[r], rows[i] = rows[i], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [a * inv for a in rows[r]]
        for k in range(A.nrows):
            if k != r and not rows[k][c].is_zero():
                factor = rows[k][c]
                rows[k] = [a - factor * b for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
    return Matrix(A.ctx, tuple(tuple(row) for row in rows), A.ncols), pivots


def rank(A: Matrix) -> int:
    return len(row_reduce(A)[1])


def kernel_basis(A: Matrix) -> Matrix:
    """Columns spanning the right kernel; zero columns for an injective A."""
    ctx = A.ctx
    R, pivots = row_reduce(A)
    free = [j for j in range(A.ncols) if j not in pivots]
    vectors = []
    for f in free:
        v = [ctx.zero()] * A.ncols
        v[f] = ctx.one()
        for i, c in enumerate(pivots):
            v[c] = -R[i, f]
        vectors.append(v)
    return Matrix.from_columns(ctx, vectors, A.ncols)


def inverse(A: Matrix) -> Matrix:
    if not A.is_square():
        raise ValueError(f"cannot invert a {A.nrows}x{A.ncols} matrix")
    n = A.nrows
    R, pivots = row_reduce(A.hstack(Matrix.identity(A.ctx, n)))
    if pivots[:n] != list(range(n)):
        raise DivisionByZero("matrix is singular at working precision")
    return R.select_columns(range(n, 2 * n))


def solve(A: Matrix, B: Matrix) -> Matrix:
    """X with A X = B, for square invertible A."""
    n = A.nrows
    R, pivots = row_reduce(A.hstack(B))
    if pivots[:n] != list(range(n)):
        raise DivisionByZero("matrix is singular at working precision")
    return R.select_columns(range(n, n + B.ncols))


def determinant(A: Matrix) -> FieldElement:
    if not A.is_square():
        raise ValueError("determinant of a non-square matrix")
    ctx = A.ctx
    rows = [list(r) for r in A.rows]
    n = A.nrows
    det = ctx.one()
    for c in range(n):
        pos = _pick_pivot(rows, range(c, n), range(c, c + 1))
        if pos is None:
            zero = ctx.zero()
            for r in range(c, n):
                zero = zero + rows[r][c]
            return det * zero
        i = pos[0]
        if i != c:
            rows[c], rows[i] = rows[i], rows[c]
            det = -det
        pivot = rows[c][c]
        det = det * pivot
        inv = pivot.inverse()
        for k in range(c + 1, n):
            if not rows[k][c].is_zero():
                factor = rows[k][c] * inv
                rows[k] = [a - factor * b for a, b in zip(rows[k], rows[c])]
    return det


def charpoly(A: Matrix) -> Polynomial:
    """det(x I - A) by Berkowitz's division-free recursion."""
    if not A.is_square():
        raise ValueError("characteristic polynomial of a non-square matrix")
    ctx = A.ctx
    n = A.nrows
    if n == 0:
        return Polynomial(ctx, (ctx.one(),))
    # coefficients highest degree first
    C = [ctx.one(), -A[0, 0]]
    for r in range(1, n):
        R = [A[r, j] for j in range(r)]
        S = [A[i, r] for i in range(r)]
        toeplitz = [ctx.one(), -A[r, r]]
        vec = S
        for _ in range(r):
            toeplitz.append(-sum((a * b for a, b in zip(R, vec)), ctx.zero()))
            vec = [sum((A[i, j] * vec[j] for j in range(r)), ctx.zero()) for i in range(r)]
        new = []
        for i in range(r + 2):
            acc = ctx.zero()
            for j in range(max(0, i - r - 1), min(i, r) + 1):
                acc = acc + toeplitz[i - j] * C[j]
            new.append(acc)
        C = new
    return Polynomial(ctx, tuple(reversed(C)))


def evaluate_polynomial(f: Polynomial, A: Matrix) -> Matrix:
    """f(A) by Horner's rule."""
    n = A.nrows
    acc = Matrix.zeros(A.ctx, n, n)
    for c in reversed(f.coeffs):
        acc = acc @ A + Matrix.identity(A.ctx, n) * c
    return acc


@dataclass(frozen=True, eq=False)
class SmithForm:
    """U A V = D with D diagonal of powers pi^exponents[i]."""

    U: Matrix
    D: Matrix
    V: Matrix
    exponents: tuple[int | float, ...]


def smith_normal_form(A: Matrix) -> SmithForm:
    """Smith form over the valuation ring, exponents counted in pi-digits, ascending."""
    ctx = A.ctx
    nr, nc = A.shape
    rows = [list(r) for r in A.rows]
    U = [list(r) for r in Matrix.identity(ctx, nr).rows]
    V = [list(r) for r in Matrix.identity(ctx, nc).rows]
    exponents: list[int | float] = []

    for k in range(min(nr, nc)):
        pos = _pick_pivot(rows, range(k, nr), range(k, nc))
        if pos is None:
            exponents.extend([INFINITY] * (min(nr, nc) - k))
            break
        i, j = pos
        pivot_val = rows[i][j].valuation
        _certify_pivot(rows, range(k, nr), range(k, nc), pivot_val)

        rows[k], rows[i] = rows[i], rows[k]
        U[k], U[i] = U[i], U[k]
        for r in rows:
            r[k], r[j] = r[j], r[k]
        for r in V:
            r[k], r[j] = r[j], r[k]

        pivot = rows[k][k]
        # normalize the pivot to pi^a
        unit_inv = (pivot * ctx.p_power(Fraction(-pivot.V, ctx.d))).inverse()
        rows[k] = [a * unit_inv for a in rows[k]]
        U[k] = [a * unit_inv for a in U[k]]
        pivot = rows[k][k]
        inv = pivot.inverse()

        for r in range(k + 1, nr):
            if not rows[r][k].is_zero():
                factor = rows[r][k] * inv
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[k])]
                U[r] = [a - factor * b for a, b in zip(U[r], U[k])]
        for c in range(k + 1, nc):
            if not rows[k][c].is_zero():
                factor = rows[k][c] * inv
                for r in range(nr):
                    rows[r][c] = rows[r][c] - factor * rows[r][k]
                for r in range(nc):
                    V[r][c] = V[r][c] - factor * V[r][k]
        exponents.append(pivot.V)

    D = Matrix.zeros(ctx, nr, nc)
    diag = [list(r) for r in D.rows]
    for i, a in enumerate(exponents):
        diag[i][i] = ctx.zero() if a == INFINITY else ctx.p_power(Fraction(a, ctx.d))
    return SmithForm(
        U=Matrix.from_rows(ctx, U),
        D=Matrix.from_rows(ctx, diag) if nr else D,
        V=Matrix.from_rows(ctx, V),
        exponents=tuple(exponents),
    )


def elementary_divisors(A: Matrix) -> tuple[Fraction | float, ...]:
    """Smith exponents in valuation units."""
    d = A.ctx.d
    return tuple(
        INFINITY if a == INFINITY else Fraction(a, d)
        for a in smith_normal_form(A).exponents
    )


def integral_scaling(A: Matrix) -> int:
    """The least k >= 0 in pi-digits with pi^k A integral."""
    v = A.min_valuation()
    if v == INFINITY or v >= 0:
        return 0
    return int(-v * A.ctx.d)


def is_unimodular(A: Matrix) -> bool:
    """A in GL_n of the valuation ring."""
    return A.is_square() and A.is_integral() and determinant(A).valuation == 0


def matrix_from_ints(ctx: FieldContext, rows: Iterable[Sequence[int | Fraction]]) -> Matrix:
    return Matrix.from_rows(ctx, rows)
