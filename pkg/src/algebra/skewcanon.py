"""
Congruence canonical form of a single skew-symmetric matrix:

    S A S^T = [[0, I_k, 0], [-I_k, 0, 0], [0, 0, 0]]
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from core.errors import NotSkewError, ReductionError, ShapeError

from .field import FieldSpec
from .matrix import CongruenceTracker, Matrix, MatrixPair, Witness, permutation_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SkewCanonResult:
    witness: Witness
    half_rank: int
    size: int

    @property
    def strip_partition(self) -> Tuple[range, range, range]:
        k = self.half_rank
        return range(0, k), range(k, 2 * k), range(2 * k, self.size)


def skew_normal_form(field: FieldSpec, n: int, k: int) -> Matrix:
    m = Matrix.zeros(field, n)
    for i in range(k):
        m.entries[i][k + i] = field.one
        m.entries[k + i][i] = -field.one
    return m


def _symplectic_pairs(tracker: CongruenceTracker, k: int) -> List[Tuple[int, int]]:
    """
    Eliminate the tracked matrix k pair by pair.

    Each pass takes the lexicographically first nonzero (i, j), scales it to
    one and clears rows i and j from every other unused index.
    """
    g = tracker.grids[k]
    n = tracker.n
    used = [False] * n
    pairs = []
    while True:
        pivot = next(((i, j) for i in range(n) if not used[i]
                      for j in range(i + 1, n) if not used[j] and g[i][j].value != 0), None)
        if pivot is None:
            return pairs
        e, f = pivot
        tracker.scale(e, g[e][f].inverse())
        for t in range(n):
            if used[t] or t in (e, f):
                continue
            beta = g[t][e]
            if beta.value != 0:
                tracker.add(t, f, beta)
            gamma = g[t][f]
            if gamma.value != 0:
                tracker.add(t, e, -gamma)
        used[e] = used[f] = True
        pairs.append((e, f))


def skew_canonicalize(a: Matrix) -> SkewCanonResult:
    """
    Reduce a skew-symmetric matrix to [[0, I, 0], [-I, 0, 0], [0, 0, 0]].

    Args:
        a: Skew-symmetric square matrix

    Returns:
        SkewCanonResult with witness S, half rank k and the strip ranges
    """
    if not a.is_skew():
        raise NotSkewError("skew_canonicalize needs a skew-symmetric matrix")
    n = a.rows
    tracker = CongruenceTracker([a])
    pairs = _symplectic_pairs(tracker, 0)
    paired = {i for p in pairs for i in p}
    order = [e for e, _ in pairs] + [f for _, f in pairs] + [i for i in range(n) if i not in paired]
    s = permutation_matrix(a.field, order) * tracker.witness()
    k = len(pairs)
    result = SkewCanonResult(Witness(s), k, n)
    reduced = s * a * s.transpose()
    if reduced != skew_normal_form(a.field, n, k):
        raise ReductionError("skew reduction did not reach the normal form", step="skew_canonicalize")
    logger.debug(f"skew form of size {n} has half rank {k}")
    return result


def embed(field: FieldSpec, n: int, indices: Sequence[int], local: Matrix) -> Matrix:
    """Identity of size n with local placed on the given indices."""
    out = Matrix.identity(field, n)
    for r, i in enumerate(indices):
        for c, j in enumerate(indices):
            out.entries[i][j] = local[r, c]
    return out


def skew_block_canonicalize(pair: MatrixPair, sub_indices: Sequence[int]) -> Tuple[MatrixPair, Witness, int]:
    """
    Bring the principal block of B on sub_indices to skew normal form.

    The congruence acts on sub_indices only; A elsewhere is left for the
    caller to re-verify.

    Returns:
        (transformed pair, embedded witness, half rank of the block)
    """
    sub_indices = list(sub_indices)
    if any(not 0 <= i < pair.size for i in sub_indices) or len(set(sub_indices)) != len(sub_indices):
        raise ShapeError(f"invalid index set {sub_indices} for size {pair.size}")
    local = skew_canonicalize(pair.b.principal(sub_indices))
    s = embed(pair.field, pair.size, sub_indices, local.witness.s)
    st = s.transpose()
    return MatrixPair(s * pair.a * st, s * pair.b * st), Witness(s), local.half_rank
