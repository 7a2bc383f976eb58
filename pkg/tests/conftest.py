import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from algebra.field import FieldSpec  # noqa: E402
from algebra.matrix import Matrix, MatrixPair  # noqa: E402

Q = FieldSpec.rationals()
GF3 = FieldSpec.prime(3)
GF5 = FieldSpec.prime(5)
GF7 = FieldSpec.prime(7)
GF97 = FieldSpec.prime(97)

ALL_FIELDS = [Q, GF3, GF7, GF97]


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: seeded desk-scale runs over every field")


def pair_from_rows(field, a_rows, b_rows) -> MatrixPair:
    return MatrixPair(Matrix.from_rows(field, a_rows), Matrix.from_rows(field, b_rows))


# Worked examples: a K2 summand laid out off its path, a 6x6 K3 summand and L2.
K2_SCATTERED = (
    [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
    [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]],
)

K3_SCATTERED = (
    [[0, 0, 1, 0, 0, 0],
     [0, 0, 0, 1, 0, 0],
     [-1, 0, 0, 0, 0, 0],
     [0, -1, 0, 0, 0, 0],
     [0, 0, 0, 0, 0, 0],
     [0, 0, 0, 0, 0, 0]],
    [[0, 0, 0, 0, 0, 1],
     [0, 0, 0, 0, 1, 0],
     [0, 0, 0, 1, 0, 0],
     [0, 0, -1, 0, 0, 0],
     [0, -1, 0, 0, 0, 0],
     [-1, 0, 0, 0, 0, 0]],
)

L2_PAIR = (
    [[0, 1, 0], [-1, 0, 0], [0, 0, 0]],
    [[0, 0, 1], [0, 0, 0], [-1, 0, 0]],
)


@pytest.fixture
def rationals():
    return Q


@pytest.fixture
def gf7():
    return GF7


@pytest.fixture
def k2_scattered():
    return pair_from_rows(Q, *K2_SCATTERED)


@pytest.fixture
def k3_scattered():
    return pair_from_rows(Q, *K3_SCATTERED)


@pytest.fixture
def l2_pair():
    return pair_from_rows(Q, *L2_PAIR)
