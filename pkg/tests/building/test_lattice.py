import random
from fractions import Fraction

import pytest

from isobuild.building import CrystalLattice, Norm, ball_lattice, norm_eval, standard_lattice
from isobuild.core.exceptions import InvalidParams
from isobuild.minset import random_unimodular
from isobuild.padic import Matrix, make_field


class TestCrystalLattice:
    def test_equality(self, qp):
        M = standard_lattice(qp, 2)
        assert M == CrystalLattice(Matrix.from_rows(qp, [[1, 5], [0, 3]]), "unimodular")
        assert M != M.scaled(1)
        assert M.scaled(1) == M.image(Matrix.identity(qp, 2) * 2)

    def test_containment(self, qp):
        M = standard_lattice(qp, 2)
        assert M.contains((qp.one(), qp.from_int(6)))
        assert not M.contains((qp.from_fraction(Fraction(1, 2)), qp.zero()))
        assert M.contains_lattice(M.scaled(1))
        assert not M.scaled(1).contains_lattice(M)
        assert M.scaled(2).index_valuation() == 4

    def test_validation(self, qp):
        with pytest.raises(InvalidParams):
            CrystalLattice(Matrix.from_rows(qp, [[1, 2], [1, 2]]), "singular")
        ramified = make_field(2, 1, 20, 2)
        with pytest.raises(InvalidParams):
            CrystalLattice(Matrix.identity(ramified, 2), "ramified")


class TestBallLattice:
    def test_examples(self, qp):
        M = standard_lattice(qp, 2)
        assert ball_lattice(Norm.standard(qp, (0, 0)), 0) == M
        assert ball_lattice(Norm.standard(qp, (0, Fraction(1, 2))), 0) == M
        assert ball_lattice(Norm.standard(qp, (0, Fraction(1, 2))), 1) == M.scaled(1)
        assert ball_lattice(Norm.standard(qp, (1, -1)), 0) == CrystalLattice(
            Matrix.diagonal(qp, [Fraction(1, 2), 2]), "expected"
        )

    def test_ramified_basis(self):
        ctx = make_field(2, 1, 20, 2)
        with pytest.raises(InvalidParams):
            ball_lattice(Norm(Matrix.identity(ctx, 2), (0, 0)), 0)

    @pytest.mark.slow
    def test_membership_matches_norm_eval(self, qp):
        rng = random.Random(19)
        for _ in range(20):
            exponents = tuple(Fraction(rng.randint(-4, 4), rng.choice([1, 2])) for _ in range(2))
            alpha = Norm(random_unimodular(qp, 2, rng) @ Matrix.diagonal(qp, [rng.choice([1, 2, 4]), 1]), exponents)
            radius = Fraction(rng.randint(-2, 2), rng.choice([1, 2]))
            M = ball_lattice(alpha, radius)
            for _ in range(25):
                x = tuple(
                    qp.from_fraction(rng.randint(-20, 20) * Fraction(2) ** rng.randint(-3, 3))
                    for _ in range(2)
                )
                assert M.contains(x) == (norm_eval(alpha, x) >= radius)
