import random
from fractions import Fraction

import pytest
from sympy import Matrix as SymMatrix, Rational

from algebra.matrix import (
    CongruenceTracker, ElementaryOp, Matrix, MatrixPair, Witness, apply_congruence, congruence_by,
    direct_sum, extract_principal, inverse, is_nonsingular, nullspace_basis, rank, record,
)
from core.errors import FieldError, NotSkewError, ShapeError, SingularMatrixError
from reduction.blocks import CanonicalBlock, realize

from conftest import GF7, Q, pair_from_rows

K1 = ([[0, 0], [0, 0]], [[0, 1], [-1, 0]])


def random_nonsingular(field, n, rng):
    while True:
        m = Matrix.from_rows(field, [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
        if is_nonsingular(m):
            return m


def test_swap_rows_flips_the_sign_of_a_2x2_form():
    pair = pair_from_rows(Q, *K1)
    swapped = apply_congruence(pair, ElementaryOp.swap_rows(0, 1))
    assert swapped.a.is_zero()
    assert swapped.b == Matrix.from_rows(Q, [[0, -1], [1, 0]])


def test_scale_by_minus_one_twice_is_the_identity():
    pair = pair_from_rows(Q, [[0, 2], [-2, 0]], [[0, 5], [-5, 0]])
    op = ElementaryOp.scale_row(0, Q(-1))
    assert apply_congruence(apply_congruence(pair, op), op) == pair


def test_add_row_keeps_the_2x2_symplectic_form():
    pair = pair_from_rows(Q, [[0, 1], [-1, 0]], [[0, 0], [0, 0]])
    assert apply_congruence(pair, ElementaryOp.add_row(1, 0, Q(4))) == pair


def test_elementary_op_matches_its_matrix():
    rng = random.Random(3)
    a = Matrix.from_rows(GF7, [[0, 1, 2], [-1, 0, 3], [-2, -3, 0]])
    b = Matrix.from_rows(GF7, [[0, 4, 0], [-4, 0, 5], [0, -5, 0]])
    pair = MatrixPair(a, b)
    for op in (ElementaryOp.swap_rows(0, 2), ElementaryOp.scale_row(1, GF7(3)),
               ElementaryOp.add_row(2, 0, GF7(rng.randrange(1, 7)))):
        assert apply_congruence(pair, op) == congruence_by(pair, op.matrix(GF7, 3))


def test_invalid_ops_are_rejected():
    with pytest.raises(FieldError):
        ElementaryOp.scale_row(0, Q(0))
    with pytest.raises(ShapeError):
        ElementaryOp.add_row(1, 1, Q(1))
    with pytest.raises(ShapeError):
        ElementaryOp.swap_rows(0, 5).validate(3)


def test_record_accumulates_the_witness():
    pair = pair_from_rows(Q, [[0, 1], [-1, 0]], [[0, 3], [-3, 0]])
    op = ElementaryOp.scale_row(0, Q(2))
    witness = record(op, Witness.identity(Q, 2))
    assert witness.apply(pair) == apply_congruence(pair, op)


def test_congruence_by_identity_and_diagonal():
    pair = pair_from_rows(Q, [[0, 1], [-1, 0]], [[0, 0], [0, 0]])
    assert congruence_by(pair, Matrix.identity(Q, 2)) == pair
    scaled = congruence_by(pair, Matrix.from_rows(Q, [[2, 0], [0, 1]]))
    assert scaled.a == Matrix.from_rows(Q, [[0, 2], [-2, 0]])
    assert scaled.b.is_zero()


def test_congruence_by_a_random_matrix_and_its_inverse_round_trips():
    rng = random.Random(11)
    pair = MatrixPair(Matrix.from_rows(GF7, [[0, 1, 3], [-1, 0, 2], [-3, -2, 0]]),
                      Matrix.from_rows(GF7, [[0, 5, 0], [-5, 0, 1], [0, -1, 0]]))
    s = random_nonsingular(GF7, 3, rng)
    assert congruence_by(congruence_by(pair, s), inverse(s)) == pair


def test_congruence_by_rejects_singular_and_misshaped_matrices():
    pair = pair_from_rows(Q, *K1)
    with pytest.raises(SingularMatrixError):
        congruence_by(pair, Matrix.from_rows(Q, [[1, 1], [1, 1]]))
    with pytest.raises(ShapeError):
        congruence_by(pair, Matrix.identity(Q, 3))


def test_pair_validation():
    with pytest.raises(NotSkewError):
        pair_from_rows(Q, [[1, 0], [0, 0]], [[0, 0], [0, 0]])
    with pytest.raises(ShapeError):
        MatrixPair(Matrix.zeros(Q, 2), Matrix.zeros(Q, 3))
    with pytest.raises(FieldError):
        MatrixPair(Matrix.zeros(Q, 2), Matrix.zeros(GF7, 2))


def test_rank_inverse_and_nullspace():
    assert rank(Matrix.zeros(Q, 3)) == 0
    assert rank(realize(CanonicalBlock.l_block(2), Q).a) == 2
    symplectic = Matrix.from_rows(Q, [[0, 1], [-1, 0]])
    assert inverse(symplectic) == Matrix.from_rows(Q, [[0, -1], [1, 0]])
    with pytest.raises(SingularMatrixError):
        inverse(Matrix.zeros(Q, 2))

    m = Matrix.from_rows(Q, [[1, 2, 3], [2, 4, 6]])
    basis = nullspace_basis(m)
    assert len(basis) == 2
    for v in basis:
        product = m * Matrix(Q, 3, 1, [[x] for x in v])
        assert product.is_zero()


def test_rank_of_rational_matrices_with_fractions():
    rng = random.Random(13)
    for _ in range(20):
        rows_count, cols = rng.randint(1, 6), rng.randint(1, 6)
        rows = [[Fraction(rng.randint(-6, 6), rng.randint(1, 5)) for _ in range(cols)] for _ in range(rows_count)]
        if rows_count > 1:
            # a dependent row keeps the rank below full
            rows[-1] = [x * 3 - y / 2 for x, y in zip(rows[0], rows[(rows_count - 1) // 2])]
        m = Matrix.from_rows(Q, rows)
        assert rank(m) == SymMatrix([[Rational(x.numerator, x.denominator) for x in r] for r in rows]).rank()
        assert rank(m) == m.rows - len(nullspace_basis(m.transpose()))


def test_rank_modulo_p_sees_vanishing_minors():
    m = Matrix.from_rows(GF7, [[1, 2], [3, 6]])
    assert rank(m) == 1
    assert rank(Matrix.from_rows(Q, [[1, 2], [3, 6]])) == 1
    assert rank(Matrix.from_rows(GF7, [[1, 2], [3, 13]])) == 1
    assert rank(Matrix.from_rows(Q, [[1, 2], [3, 13]])) == 2
    assert rank(Matrix.zeros(GF7, 0, 4)) == 0


def test_inverse_of_random_matrices():
    rng = random.Random(5)
    for field in (Q, GF7):
        m = random_nonsingular(field, 4, rng)
        assert m * inverse(m) == Matrix.identity(field, 4)


def test_direct_sum_and_extract_principal():
    k1 = realize(CanonicalBlock.k_block(1), Q)
    l1 = realize(CanonicalBlock.l_block(1), Q)
    total = direct_sum([k1, l1])
    assert total.size == 3
    assert extract_principal(total, [0, 1]) == k1
    assert direct_sum([], Q).size == 0
    with pytest.raises(ShapeError):
        extract_principal(total, [0, 0])


def test_tracker_keeps_witness_consistent():
    rng = random.Random(17)
    a = Matrix.from_rows(GF7, [[0, 1, 2, 0], [-1, 0, 0, 3], [-2, 0, 0, 1], [0, -3, -1, 0]])
    b = Matrix.from_rows(GF7, [[0, 0, 1, 1], [0, 0, 2, 0], [-1, -2, 0, 4], [-1, 0, -4, 0]])
    pair = MatrixPair(a, b)
    tracker = CongruenceTracker([a, b])
    for _ in range(25):
        i, j = rng.sample(range(4), 2)
        choice = rng.randrange(3)
        if choice == 0:
            tracker.swap(i, j)
        elif choice == 1:
            tracker.scale(i, GF7(rng.randrange(1, 7)))
        else:
            tracker.add(i, j, GF7(rng.randrange(7)))
    reduced = MatrixPair(tracker.matrix(0), tracker.matrix(1))
    assert congruence_by(pair, tracker.witness()) == reduced
