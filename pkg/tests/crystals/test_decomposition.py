from fractions import Fraction

from isobuild.crystals import Isocrystal, is_decent, isocline_decomposition
from isobuild.padic import Matrix


class TestIsoclineDecomposition:
    def test_split(self, split):
        dec = isocline_decomposition(split)
        assert [(b.slope, b.dim) for b in dec.blocks] == [(0, 1), (1, 1)]
        W0 = dec.block_basis(dec.blocks[0])
        assert W0[1, 0].is_zero()
        assert not W0[0, 0].is_zero()

    def test_basic(self, half, qp):
        dec = isocline_decomposition(half)
        assert [(b.slope, b.dim) for b in dec.blocks] == [(Fraction(1, 2), 2)]
        assert dec.basis == Matrix.identity(qp, 2)

    def test_mixed(self, mixed):
        dec = isocline_decomposition(mixed)
        assert [(b.slope, b.dim) for b in dec.blocks] == [(0, 1), (Fraction(1, 2), 2)]
        assert dec.to_json()["blocks"][1] == {"slope": "1/2", "dim": 2, "columns": [1, 3]}

    def test_eigenvectors(self, qp):
        b = Matrix.from_rows(qp, [[1, 1], [0, 2]])
        dec = isocline_decomposition(Isocrystal(qp, b))
        W0, W1 = (dec.block_basis(block) for block in dec.blocks)
        assert b @ W0 == W0
        assert b @ W1 == W1 * 2


class TestIsDecent:
    def test_examples(self, half, split, mixed):
        assert is_decent(half, 2)
        assert is_decent(half, 4)
        assert not is_decent(half, 1)
        assert is_decent(split, 1)
        assert is_decent(mixed, 2)

    def test_upper_triangular(self, qp):
        assert is_decent(Isocrystal(qp, Matrix.from_rows(qp, [[1, 1], [0, 2]])), 1)
        assert not is_decent(Isocrystal(qp, Matrix.from_rows(qp, [[1, 1], [0, 1]])), 1)

    def test_not_fixed(self, q4):
        z = q4.gen()
        ic = Isocrystal(q4, Matrix.diagonal(q4, [z, 1]), s=2)
        assert not is_decent(ic, 1)
        # z sigma(z) = 1, so the twisted square is the identity
        assert is_decent(ic, 2)
