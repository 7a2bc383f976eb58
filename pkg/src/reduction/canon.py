"""
Congruence canonical form of a skew-symmetric pair.

Singular summands come from regularization. The regular part is split
eigenvalue by eigenvalue: for a root lam of det(xA - B) the shifted pair
(B - lam*A, A) is semi-regularized and every K_m it releases is J(m, lam)
of the original pair. Whatever has no root in the field is labelled by
its invariant factors (over GF(p) further split into prime powers).
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from algebra.field import FieldSpec
from algebra.matrix import (
    Matrix, MatrixPair, Witness, congruence_unchecked, direct_sum, inverse, is_nonsingular,
)
from algebra.poly import (
    DEFAULT_FACTOR_DEGREE_BOUND, DEFAULT_MAX_ENUMERATION_PRIME, DEFAULT_MAX_TRIAL_CANDIDATES,
    PolyMatrix, char_poly, factor_gfp, roots_in_field, smith_form,
)
from core.errors import ReductionError, SingularPairError
from core.settings import debug_assertions_enabled

from .blocks import BlockKind, CanonicalBlock, realize, realize_sum
from .regcore import regularize, semi_regularize

logger = logging.getLogger(__name__)

__all__ = [
    "BlockKind", "CanonicalBlock", "CanonicalForm", "FactorOptions",
    "canonicalize", "canonicalize_regular", "realize", "realize_sum",
    "rly_reduce", "satisfies_rly",
]


@dataclass(frozen=True)
class FactorOptions:
    degree_bound: int = DEFAULT_FACTOR_DEGREE_BOUND
    max_prime: int = DEFAULT_MAX_ENUMERATION_PRIME
    max_candidates: int = DEFAULT_MAX_TRIAL_CANDIDATES


@dataclass
class CanonicalForm:
    field: FieldSpec
    blocks: List[CanonicalBlock]
    witness: Optional[Witness]
    witness_complete: bool

    @property
    def size(self) -> int:
        return sum(b.size for b in self.blocks)

    def realized(self) -> MatrixPair:
        return realize_sum(self.blocks, self.field)


def _sorted_form(field: FieldSpec, blocks: Sequence[CanonicalBlock],
                 witness: Optional[Matrix]) -> CanonicalForm:
    """Sort blocks canonically; witness rows (one group per block, in order) follow along."""
    spans = []
    start = 0
    for block in blocks:
        spans.append((block, start))
        start += block.size
    spans.sort(key=lambda item: item[0].sort_key())
    ordered = [block for block, _ in spans]
    if witness is None:
        return CanonicalForm(field, ordered, None, False)
    rows = [witness.row(r) for block, s in spans for r in range(s, s + block.size)]
    return CanonicalForm(field, ordered, Witness(Matrix(field, witness.rows, witness.cols, rows)), True)


def _invariant_factor_blocks(pair: MatrixPair, options: FactorOptions) -> List[CanonicalBlock]:
    """Blocks for a regular pair without eigenvalues in the field."""
    field = pair.field
    m = inverse(pair.a) * pair.b
    factors = [d for d in smith_form(PolyMatrix.characteristic(m)) if d.degree > 0]
    if len(factors) % 2 or any(factors[i] != factors[i + 1] for i in range(0, len(factors), 2)):
        raise ReductionError(f"invariant factors {[str(f) for f in factors]} do not pair up",
                             step="invariant-factors")
    labels = factors[::2]
    if field.is_rational:
        return [CanonicalBlock.j_poly_block(d, fully_decomposed=False) for d in labels]
    blocks = []
    for d in labels:
        decomposition = factor_gfp(d, options.degree_bound, options.max_prime, options.max_candidates)
        blocks.extend(CanonicalBlock.j_poly_block(q, fully_decomposed=True)
                      for q in decomposition.prime_powers)
    return blocks


def _check_pairing(pair: MatrixPair):
    m = inverse(pair.a) * pair.b
    factors = [d for d in smith_form(PolyMatrix.characteristic(m)) if d.degree > 0]
    if len(factors) % 2 or any(factors[i] != factors[i + 1] for i in range(0, len(factors), 2)):
        raise ReductionError("invariant factors of the regular part do not pair up", step="pairing")


def canonicalize_regular(pair: MatrixPair, options: FactorOptions = FactorOptions(),
                         check: bool = True) -> CanonicalForm:
    """
    Canonical form of a pair with both matrices nonsingular.

    Args:
        pair: Regular skew pair
        options: Bounds for factorization over GF(p)
        check: Re-multiply the final witness

    Returns:
        CanonicalForm; the witness is present only when every eigenvalue
        lies in the field
    """
    field = pair.field
    n = pair.size
    if n == 0:
        return CanonicalForm(field, [], Witness.identity(field, 0), True)
    if not (is_nonsingular(pair.a) and is_nonsingular(pair.b)):
        raise SingularPairError("canonicalize_regular needs both matrices nonsingular")
    if debug_assertions_enabled():
        _check_pairing(pair)
    roots = roots_in_field(char_poly(inverse(pair.a) * pair.b))
    current = pair
    witness = Matrix.identity(field, n)
    blocks: List[CanonicalBlock] = []
    for lam, multiplicity in roots:
        shifted = MatrixPair(current.b - current.a.scale(lam), current.a)
        result = semi_regularize(shifted)
        released = []
        for summand in result.extracted:
            if summand.block.kind != BlockKind.K:
                raise ReductionError(f"{summand.block} released at eigenvalue {lam}", step="shift")
            released.append(CanonicalBlock.j_block(summand.block.n, lam))
        x, y = result.remaining.a, result.remaining.b
        unshifted = MatrixPair(y, x + y.scale(lam))
        step = result.witness.s
        if debug_assertions_enabled() and (congruence_unchecked(current, step)
                                           != direct_sum([unshifted] + [realize(b, field) for b in released])):
            raise ReductionError(f"shift identity fails at eigenvalue {lam}", step="shift")
        if 2 * sum(b.n for b in released) != multiplicity:
            raise ReductionError(f"eigenvalue {lam} of multiplicity {multiplicity} released "
                                 f"{[str(b) for b in released]}", step="shift")
        witness = Matrix.block_diagonal(field, [step, Matrix.identity(field, n - current.size)]) * witness
        blocks = released + blocks
        current = unshifted
        logger.debug(f"eigenvalue {lam}: {[str(b) for b in released]}")
    if current.size == 0:
        form = _sorted_form(field, blocks, witness)
        if check and congruence_unchecked(pair, form.witness.s) != form.realized():
            raise ReductionError("regular witness does not reproduce the blocks", step="canonicalize_regular")
        return form
    blocks = _invariant_factor_blocks(current, options) + blocks
    logger.info(f"characteristic polynomial does not split over {field}; no witness produced")
    return _sorted_form(field, blocks, None)


def canonicalize(pair: MatrixPair, options: FactorOptions = FactorOptions()) -> CanonicalForm:
    """
    Canonical form of a skew pair as a sorted list of J, K and L blocks.

    Args:
        pair: Skew-symmetric pair
        options: Bounds for factorization over GF(p)

    Returns:
        CanonicalForm whose witness maps the pair onto the realized blocks
        in the reported order
    """
    field = pair.field
    regularization = regularize(pair, check=False)
    regular = canonicalize_regular(regularization.regular, options, check=False)
    blocks = regular.blocks + regularization.singular_summands
    if not regular.witness_complete:
        parts = [regularization.regular] + [realize(b, field) for b in regularization.singular_summands]
        if congruence_unchecked(pair, regularization.witness.s) != direct_sum(parts, field):
            raise ReductionError("regularizing witness does not reproduce the summands", step="canonicalize")
        return _sorted_form(field, blocks, None)
    outer = Matrix.block_diagonal(field, [regular.witness.s,
                                          Matrix.identity(field, pair.size - regularization.regular.size)])
    form = _sorted_form(field, blocks, outer * regularization.witness.s)
    if congruence_unchecked(pair, form.witness.s) != form.realized():
        raise ReductionError("canonical witness does not reproduce the blocks", step="canonicalize")
    logger.debug(f"canonical form: {[str(b) for b in form.blocks]}")
    return form


def satisfies_rly(pair: MatrixPair) -> bool:
    """Each row and column of both matrices holds at most one nonzero entry, and it is 1 or -1."""
    one = pair.field.one
    for m in (pair.a, pair.b):
        for grid in (m.entries, m.transpose().entries):
            for row in grid:
                nonzero = [x for x in row if x.value != 0]
                if len(nonzero) > 1 or any(x != one and x != -one for x in nonzero):
                    return False
    return True


def rly_reduce(pair: MatrixPair) -> Tuple[MatrixPair, Witness]:
    """
    Reduce a pair with singular A and no regular part to signed-permutation form.

    Each summand is laid out along its path but without sign normalization,
    so entries are 1 or -1 and every row and column has at most one of them.
    """
    if pair.size == 0 or is_nonsingular(pair.a):
        raise SingularPairError("rly_reduce needs a singular first matrix")
    result = semi_regularize(pair)
    if result.remaining.size:
        raise ReductionError(f"regular remainder of size {result.remaining.size}", step="rly")
    rows = []
    start = 0
    for summand in result.extracted:
        for offset, sign in enumerate(summand.signs):
            rows.append([x / sign for x in result.witness.s.row(start + offset)])
        start += len(summand.signs)
    witness = Matrix(pair.field, pair.size, pair.size, rows)
    reduced = congruence_unchecked(pair, witness)
    if not satisfies_rly(reduced):
        raise ReductionError("reduced pair has more than one entry per row", step="rly")
    return reduced, Witness(witness)
