import random

import pytest

from algebra.matrix import Matrix, MatrixPair, congruence_by, direct_sum
from algebra.poly import Polynomial
from processors.generate_processor import random_congruence
from reduction import kronecker
from reduction.blocks import BlockKind, CanonicalBlock, realize, realize_sum
from reduction.kronecker import (
    PencilInvariants, expected_invariants, infinite_divisors, minimal_indices, pencil_invariants,
    skew_symmetry_checks,
)

from conftest import GF3, GF7, Q

K, L, J = CanonicalBlock.k_block, CanonicalBlock.l_block, CanonicalBlock.j_block


def test_l2_has_one_minimal_index_on_each_side(l2_pair):
    invariants = pencil_invariants(l2_pair)
    assert invariants.right_minimal_indices == [1]
    assert invariants.left_minimal_indices == [1]
    assert invariants.finite_divisors == []
    assert invariants.infinite_divisors == []
    assert invariants.dimension == 3


def test_k1_is_a_pair_of_infinite_divisors():
    invariants = pencil_invariants(realize(K(1), Q))
    assert invariants.infinite_divisors == [1, 1]
    assert invariants.finite_divisors == []
    assert invariants.right_minimal_indices == []
    assert invariants.dimension == 2


def test_j1_has_a_doubled_linear_divisor():
    invariants = pencil_invariants(realize(J(1, Q(4)), Q))
    x_minus_4 = Polynomial.linear(Q, Q(4))
    assert invariants.finite_divisors == [(x_minus_4, 1), (x_minus_4, 1)]
    assert invariants.infinite_divisors == []


def test_minimal_indices_of_l3():
    l3 = realize(L(3), Q)
    assert minimal_indices(l3.a, l3.b, 1) == [2]
    assert pencil_invariants(l3).dimension == 5


def test_expected_invariants_of_single_blocks():
    assert expected_invariants([L(1)], Q) == PencilInvariants(Q, [0], [0], [], [])
    assert expected_invariants([K(2)], Q).infinite_divisors == [2, 2]
    x = Polynomial.x(Q)
    assert expected_invariants([J(2, Q(0))], Q).finite_divisors == [(x, 2), (x, 2)]


def test_polynomial_label_over_gf3_is_factored():
    # x^2 + 1 is irreducible over GF(3)
    block = CanonicalBlock.j_poly_block(Polynomial(GF3, [1, 0, 1]), True)
    invariants = pencil_invariants(realize(block, GF3))
    assert invariants == expected_invariants([block], GF3)
    assert invariants.finite_divisors == [(Polynomial(GF3, [1, 0, 1]), 1)] * 2


def test_skew_symmetry_checks():
    assert skew_symmetry_checks(pencil_invariants(realize(L(3), Q)))
    assert skew_symmetry_checks(pencil_invariants(direct_sum([realize(K(1), Q), realize(J(1, Q(2)), Q)])))

    general = MatrixPair.general(Matrix.from_rows(Q, [[1]]), Matrix.from_rows(Q, [[0]]))
    invariants = pencil_invariants(general)
    assert invariants.finite_divisors == [(Polynomial.x(Q), 1)]
    assert not skew_symmetry_checks(invariants)


def test_unequal_minimal_indices_fail_the_pairing():
    assert not skew_symmetry_checks(PencilInvariants(Q, [0], [1], [], []))


@pytest.mark.parametrize("field", [Q, GF7])
def test_invariants_survive_congruence(field):
    rng = random.Random(77)
    for seed in range(5):
        blocks = [K(rng.randint(1, 2)), L(rng.randint(1, 3)), J(rng.randint(1, 2), field(rng.randint(-2, 2)))]
        canonical = realize_sum(blocks, field)
        pair = congruence_by(canonical, random_congruence(field, canonical.size, random.Random(seed)))
        invariants = pencil_invariants(pair)
        assert invariants == expected_invariants(blocks, field)
        assert skew_symmetry_checks(invariants)
        assert invariants.dimension == pair.size


@pytest.mark.parametrize("blocks,expected", [
    ([K(2)], [2, 2]),
    ([K(3)], [3, 3]),
    ([K(1), K(3), L(2)], [1, 1, 3, 3]),
    ([J(2, Q(0)), L(1)], []),
    ([K(2), J(3, Q(0)), J(1, Q(5))], [2, 2]),
])
def test_infinite_divisors_from_truncated_pencils(blocks, expected):
    canonical = realize_sum(blocks, Q)
    pair = congruence_by(canonical, random_congruence(Q, canonical.size, random.Random(4)))
    normal_rank = pair.size - sum(1 for b in blocks if b.kind == BlockKind.L)
    assert infinite_divisors(pair.a, pair.b, normal_rank) == expected
    assert pencil_invariants(pair).infinite_divisors == expected


def test_pencil_invariants_need_a_single_smith_form(monkeypatch):
    calls = []
    real = kronecker.smith_form

    def counting(pm):
        calls.append(pm.rows)
        return real(pm)

    monkeypatch.setattr(kronecker, "smith_form", counting)
    blocks = [K(2), L(2), J(1, GF7(3))]
    invariants = pencil_invariants(realize_sum(blocks, GF7))
    assert len(calls) == 1
    assert invariants == expected_invariants(blocks, GF7)


def test_to_dict_layout():
    record = pencil_invariants(realize(J(1, Q(4)), Q)).to_dict()
    assert record["finite_divisors"] == [{"base": ["-4", "1"], "power": 1}] * 2
    assert record["right_minimal_indices"] == []
