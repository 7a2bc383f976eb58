"""
Seeded desk-scale runs: round trips, oracle concordance, uniqueness and
invariant-factor pairing over every supported field.

Deselect with `pytest -m "not slow"`.
"""

import random
from fractions import Fraction
from functools import lru_cache

import pytest

from algebra.matrix import Matrix, congruence_by, inverse, is_nonsingular
from algebra.poly import PolyMatrix, smith_form
from processors.generate_processor import random_congruence
from reduction.blocks import CanonicalBlock, realize_sum
from reduction.canon import canonicalize
from reduction.kronecker import expected_invariants, pencil_invariants, skew_symmetry_checks

from conftest import ALL_FIELDS

pytestmark = pytest.mark.slow

K, L, J = CanonicalBlock.k_block, CanonicalBlock.l_block, CanonicalBlock.j_block

MAX_SIZE = 14
MAX_N = 4


def random_eigenvalue(field, rng):
    if field.is_rational:
        return field(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
    return field(rng.randrange(field.modulus))


def acceptance_blocks(field, rng):
    """A canonical sum of total size <= MAX_SIZE with every n <= MAX_N."""
    target = rng.randint(1, MAX_SIZE)
    blocks, size = [], 0
    while True:
        kind, n = rng.choice("JKL"), rng.randint(1, MAX_N)
        if kind == "J":
            block = J(n, random_eigenvalue(field, rng))
        else:
            block = K(n) if kind == "K" else L(n)
        if size + block.size > target:
            return blocks or [block]
        blocks.append(block)
        size += block.size


def scrambled(blocks, field, seed):
    canonical = realize_sum(blocks, field)
    return congruence_by(canonical, random_congruence(field, canonical.size, random.Random(seed)))


@lru_cache(maxsize=None)
def round_trip_instances(field):
    rng = random.Random(2024 + field.characteristic)
    instances = []
    for seed in range(100):
        blocks = acceptance_blocks(field, rng)
        instances.append((blocks, scrambled(blocks, field, seed)))
    return instances


@pytest.mark.parametrize("field", ALL_FIELDS, ids=str)
def test_round_trip_on_one_hundred_instances(field):
    for blocks, pair in round_trip_instances(field):
        form = canonicalize(pair)
        assert form.blocks == sorted(blocks, key=lambda b: b.sort_key())
        assert form.witness_complete
        assert congruence_by(pair, form.witness.s) == form.realized()


@pytest.mark.parametrize("field", ALL_FIELDS, ids=str)
def test_oracle_agrees_on_the_round_trip_instances(field):
    for blocks, pair in round_trip_instances(field):
        invariants = pencil_invariants(pair)
        assert invariants == expected_invariants(blocks, field)
        assert skew_symmetry_checks(invariants)
        assert invariants.dimension == pair.size


def test_independent_scramblings_agree_on_fifty_sums():
    rng = random.Random(606)
    for index in range(50):
        field = ALL_FIELDS[index % len(ALL_FIELDS)]
        blocks = acceptance_blocks(field, rng)
        first = canonicalize(scrambled(blocks, field, index))
        second = canonicalize(scrambled(blocks, field, index + 10_000))
        assert first.blocks == second.blocks


def random_regular_pair(field, rng):
    """(A, M) with A = E J E^T for a random E and M = A^-1 B, B a random nonsingular skew matrix."""
    n = 2 * rng.randint(1, 4)
    while True:
        upper = Matrix.zeros(field, n)
        for i in range(n):
            for j in range(i + 1, n):
                v = field(rng.randint(-3, 3))
                upper.entries[i][j] = v
                upper.entries[j][i] = -v
        if is_nonsingular(upper):
            break
    e = random_congruence(field, n, rng)
    a = e * realize_sum([J(n // 2, field.zero)], field).a * e.transpose()
    return inverse(a) * upper


@pytest.mark.parametrize("field", ALL_FIELDS, ids=str)
def test_invariant_factors_pair_up_on_fifty_regular_pairs(field):
    rng = random.Random(77 + field.characteristic)
    for _ in range(50):
        m = random_regular_pair(field, rng)
        factors = [d for d in smith_form(PolyMatrix.characteristic(m)) if d.degree > 0]
        assert len(factors) % 2 == 0
        assert all(factors[i] == factors[i + 1] for i in range(0, len(factors), 2))
