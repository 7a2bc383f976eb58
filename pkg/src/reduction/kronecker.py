"""
Kronecker invariants of the pencil x*A - B: minimal indices and finite and
infinite elementary divisors.

This module deliberately uses only the field, matrix and poly layers so it
can check the congruence pipeline independently.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field as dataclass_field
from typing import Dict, Iterable, List, Tuple

from algebra.field import FieldSpec
from algebra.matrix import Matrix, MatrixPair, rank
from algebra.poly import (
    DEFAULT_FACTOR_DEGREE_BOUND, DEFAULT_MAX_ENUMERATION_PRIME, DEFAULT_MAX_TRIAL_CANDIDATES,
    Polynomial, PolyMatrix, factor_gfp, roots_in_field, smith_form,
)

from .blocks import BlockKind, CanonicalBlock

logger = logging.getLogger(__name__)

Divisor = Tuple[Polynomial, int]


@dataclass
class PencilInvariants:
    field: FieldSpec
    right_minimal_indices: List[int] = dataclass_field(default_factory=list)
    left_minimal_indices: List[int] = dataclass_field(default_factory=list)
    finite_divisors: List[Divisor] = dataclass_field(default_factory=list)
    infinite_divisors: List[int] = dataclass_field(default_factory=list)

    def __post_init__(self):
        self.right_minimal_indices = sorted(self.right_minimal_indices)
        self.left_minimal_indices = sorted(self.left_minimal_indices)
        self.finite_divisors = sorted(((q.monic(), e) for q, e in self.finite_divisors),
                                      key=lambda item: (item[0].sort_key(), item[1]))
        self.infinite_divisors = sorted(self.infinite_divisors)

    @property
    def dimension(self) -> int:
        """Column count of the Kronecker form: sum(eps+1) + sum(eta) + finite + infinite degrees."""
        return (sum(e + 1 for e in self.right_minimal_indices)
                + sum(self.left_minimal_indices)
                + sum(q.degree * e for q, e in self.finite_divisors)
                + sum(self.infinite_divisors))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PencilInvariants):
            return NotImplemented
        return (self.field == other.field
                and self.right_minimal_indices == other.right_minimal_indices
                and self.left_minimal_indices == other.left_minimal_indices
                and self.finite_divisors == other.finite_divisors
                and self.infinite_divisors == other.infinite_divisors)

    def to_dict(self) -> Dict:
        return {
            "right_minimal_indices": self.right_minimal_indices,
            "left_minimal_indices": self.left_minimal_indices,
            "finite_divisors": [{"base": q.to_strings(), "power": e} for q, e in self.finite_divisors],
            "infinite_divisors": self.infinite_divisors,
        }


def _split_divisor(d: Polynomial, factor_options: Dict) -> List[Divisor]:
    """Prime powers over GF(p); linear powers plus the root-free residual over Q."""
    field = d.field
    if not field.is_rational:
        return list(factor_gfp(d, **factor_options).factors)
    out = []
    residual = d
    for root, multiplicity in roots_in_field(d):
        linear = Polynomial.linear(field, root)
        out.append((linear, multiplicity))
        residual = residual // linear ** multiplicity
    if residual.degree > 0:
        out.append((residual.monic(), 1))
    return out


def _truncated_pencil(a: Matrix, b: Matrix, depth: int) -> Matrix:
    """Coefficient map of (xB - A) on vectors over F[x]/(x^depth): -A on the diagonal, B below it."""
    field = a.field
    n = a.rows
    out = Matrix.zeros(field, depth * n, depth * n)
    for block in range(depth):
        for i in range(n):
            for j in range(n):
                out.entries[block * n + i][block * n + j] = -a[i, j]
                if block + 1 < depth:
                    out.entries[(block + 1) * n + i][block * n + j] = b[i, j]
    return out


def infinite_divisors(a: Matrix, b: Matrix, normal_rank: int) -> List[int]:
    """
    Degrees of the infinite elementary divisors of x*A - B.

    These are the x-adic orders kappa of the invariant factors of x*B - A.
    Modulo x^k that pencil has rank sum(k - min(kappa, k)), so the growth
    of the rank deficit from k - 1 to k counts the orders that reach k.
    """
    n = a.rows
    reaching: List[int] = []
    deficit = 0
    for depth in range(1, n + 2):
        current = normal_rank * depth - rank(_truncated_pencil(a, b, depth))
        count = current - deficit
        if count == 0:
            break
        reaching.append(count)
        deficit = current
    degrees: List[int] = []
    for depth, count in enumerate(reaching, start=1):
        longer = reaching[depth] if depth < len(reaching) else 0
        degrees.extend([depth] * (count - longer))
    return degrees


def _toeplitz_stack(a: Matrix, b: Matrix, depth: int) -> Matrix:
    """Coefficient map of (xA - B) on polynomial vectors of degree <= depth."""
    field = a.field
    n = a.rows
    out = Matrix.zeros(field, (depth + 2) * n, (depth + 1) * n)
    for block in range(depth + 1):
        for i in range(n):
            for j in range(n):
                out.entries[block * n + i][block * n + j] = -b[i, j]
                out.entries[(block + 1) * n + i][block * n + j] = a[i, j]
    return out


def minimal_indices(a: Matrix, b: Matrix, count: int) -> List[int]:
    """
    Right minimal indices of x*A - B.

    With N_d the nullity of the degree-d stack, the number of indices equal
    to d is N_d - 2 N_{d-1} + N_{d-2}.
    """
    n = a.rows
    indices: List[int] = []
    nullities = [0, 0]
    depth = 0
    while len(indices) < count and depth <= n:
        stack = _toeplitz_stack(a, b, depth)
        nullity = stack.cols - rank(stack)
        found = nullity - 2 * nullities[-1] + nullities[-2]
        indices.extend([depth] * found)
        nullities.append(nullity)
        depth += 1
    return indices


def pencil_invariants(pair: MatrixPair,
                      degree_bound: int = DEFAULT_FACTOR_DEGREE_BOUND,
                      max_prime: int = DEFAULT_MAX_ENUMERATION_PRIME,
                      max_candidates: int = DEFAULT_MAX_TRIAL_CANDIDATES) -> PencilInvariants:
    """
    Equivalence invariants of the pencil of a pair.

    Args:
        pair: Any pair of square matrices (skew-symmetry not required)

    Returns:
        PencilInvariants of x*A - B
    """
    a, b = pair.a, pair.b
    options = {"degree_bound": degree_bound, "max_prime": max_prime, "max_candidates": max_candidates}
    finite_factors = smith_form(PolyMatrix.pencil(a, b))
    normal_rank = len(finite_factors)
    finite = [div for d in finite_factors if d.degree > 0 for div in _split_divisor(d, options)]
    infinite = infinite_divisors(a, b, normal_rank)
    defect = pair.size - normal_rank
    right = minimal_indices(a, b, defect)
    left = minimal_indices(a.transpose(), b.transpose(), defect)
    invariants = PencilInvariants(pair.field, right, left, finite, infinite)
    logger.debug(f"pencil of size {pair.size}: normal rank {normal_rank}, {invariants.to_dict()}")
    return invariants


def expected_invariants(blocks: Iterable[CanonicalBlock], field: FieldSpec,
                        degree_bound: int = DEFAULT_FACTOR_DEGREE_BOUND,
                        max_prime: int = DEFAULT_MAX_ENUMERATION_PRIME,
                        max_candidates: int = DEFAULT_MAX_TRIAL_CANDIDATES) -> PencilInvariants:
    """Invariants a block multiset induces; J labels are normalized the way pencil_invariants reports them."""
    options = {"degree_bound": degree_bound, "max_prime": max_prime, "max_candidates": max_candidates}
    right, left, finite, infinite = [], [], [], []
    for block in blocks:
        if block.kind == BlockKind.L:
            right.append(block.n - 1)
            left.append(block.n - 1)
        elif block.kind == BlockKind.K:
            infinite.extend([block.n, block.n])
        elif block.eigenvalue is not None:
            finite.extend([(Polynomial.linear(field, block.eigenvalue), block.n)] * 2)
        elif field.is_rational:
            finite.extend([(block.polynomial, 1)] * 2)
        else:
            finite.extend(factor_gfp(block.polynomial, **options).factors * 2)
    return PencilInvariants(field, right, left, finite, infinite)


def skew_symmetry_checks(invariants: PencilInvariants) -> bool:
    """Left and right indices agree and every elementary divisor occurs an even number of times."""
    if invariants.right_minimal_indices != invariants.left_minimal_indices:
        return False
    finite = Counter((q, e) for q, e in invariants.finite_divisors)
    infinite = Counter(invariants.infinite_divisors)
    return all(c % 2 == 0 for c in finite.values()) and all(c % 2 == 0 for c in infinite.values())
