import pytest

from isobuild.crystals import Isocrystal, NewtonPoint, standard_form
from isobuild.padic import Matrix, make_field


@pytest.fixture
def qp():
    """Q_2 at 20 digits."""
    return make_field(2, 1, 20)


@pytest.fixture
def q4():
    """Q_4 = Q_2(z), z^2 + z + 1 = 0."""
    return make_field(2, 2, 20)


@pytest.fixture
def q3():
    return make_field(3, 1, 20)


@pytest.fixture
def half(qp) -> Isocrystal:
    """The simple isocrystal of slope 1/2: b = [[0, p], [1, 0]]."""
    return standard_form(NewtonPoint.from_pairs([("1/2", 2)]), qp)


@pytest.fixture
def split(qp) -> Isocrystal:
    """b = diag(1, p), slopes 0 and 1."""
    return Isocrystal(qp, Matrix.diagonal(qp, [1, 2]))


@pytest.fixture
def mixed(qp) -> Isocrystal:
    """Slopes 0 and 1/2 in dimension 3."""
    return standard_form(NewtonPoint.from_pairs([(0, 1), ("1/2", 2)]), qp)


@pytest.fixture
def trivial(qp) -> Isocrystal:
    return Isocrystal(qp, Matrix.identity(qp, 2))
