"""
Semi-regularization and regularization of skew-symmetric pairs.

A pair (A, B) is first brought to the form where A is the skew normal form

    A = [[0, I_k, 0], [-I_k, 0, 0], [0, 0, 0]]

with index strips first (rows 0..k-1), second (k..2k-1) and third (the
radical of A). Summands K_n and L_n are then peeled off level by level:

    1. the nonsingular part of B on the third strip gives K blocks;
    2. third-strip columns of B that depend on the others give L blocks;
    3. every remaining third-strip column is coupled to a first-strip row
       (possibly releasing a K block on the way);
    4. the first, second and coupled-second strips form a smaller pair in
       the same form, which is reduced recursively and lifted back.

Every congruence used keeps A on the strips exactly in its normal form.
"""

import logging
from dataclasses import dataclass, field as dataclass_field
from enum import Enum
from typing import Dict, List, Sequence, Tuple

from algebra.field import FieldElement, FieldSpec
from algebra.matrix import (
    CongruenceTracker, ElementaryOp, Matrix, MatrixPair, OpKind, Witness,
    congruence_unchecked, direct_sum, extract_principal, inverse, is_nonsingular,
)
from algebra.skewcanon import embed, skew_canonicalize
from core.errors import ReductionError, ShapeError
from core.settings import debug_assertions_enabled

from .blocks import BlockKind, CanonicalBlock, realize

logger = logging.getLogger(__name__)


class TransformKind(Enum):
    """The congruences that preserve A in normal form."""

    STRIP_OP = "i"        # elementary op inside strip 1 (mirrored on strip 2) or strip 3
    LOWER_SHEAR = "ii"    # second[j] += a*first[i], second[i] += a*first[j]
    UPPER_SHEAR = "iii"   # first[j] += a*second[i], first[i] += a*second[j]
    SIGNED_SWAP = "iv"    # first[i] <- second[i], second[i] <- -first[i]
    RADICAL_ADD = "v"     # any row += a*third[source]


@dataclass
class StripContext:
    """
    Strips of the current level.

    first[i] and second[i] are A-dual; third spans the radical of A.
    The coupled lists hold finished triples: coupled_first[t] is A-dual to
    coupled_second[t] and B pairs it with coupled_third[t] only.
    """

    first: List[int]
    second: List[int]
    third: List[int]
    coupled_first: List[int] = dataclass_field(default_factory=list)
    coupled_second: List[int] = dataclass_field(default_factory=list)
    coupled_third: List[int] = dataclass_field(default_factory=list)
    depth: int = 0

    @classmethod
    def from_half_rank(cls, n: int, k: int, depth: int = 0) -> "StripContext":
        return cls(list(range(k)), list(range(k, 2 * k)), list(range(2 * k, n)), depth=depth)

    def copy(self) -> "StripContext":
        return StripContext(list(self.first), list(self.second), list(self.third),
                            list(self.coupled_first), list(self.coupled_second),
                            list(self.coupled_third), self.depth)

    def alive(self) -> List[int]:
        return (self.first + self.second + self.third
                + self.coupled_first + self.coupled_second + self.coupled_third)

    def a_partners(self) -> Dict[int, Tuple[int, int]]:
        """index -> (partner, sign of A[index, partner])."""
        out = {}
        for u, w in zip(self.first + self.coupled_first, self.second + self.coupled_second):
            out[u] = (w, 1)
            out[w] = (u, -1)
        return out


@dataclass
class ExtractedSummand:
    """A block peeled off; indices[pos] carries sign signs[pos] in the witness."""

    block: CanonicalBlock
    indices: List[int]
    signs: List[FieldElement]

    @property
    def original_indices(self) -> List[int]:
        return sorted(self.indices)


@dataclass
class SemiRegResult:
    remaining: MatrixPair
    extracted: List[ExtractedSummand]
    witness: Witness

    @property
    def blocks(self) -> List[CanonicalBlock]:
        return [s.block for s in self.extracted]


@dataclass
class RegularizationResult:
    regular: MatrixPair
    singular_summands: List[CanonicalBlock]
    witness: Witness

    @property
    def t(self) -> int:
        return len(self.singular_summands)


@dataclass
class LevelOutcome:
    transform: Matrix
    extracted: List[List[int]]
    remaining: List[int]
    reduced: MatrixPair


def _check_position(position: int, strip: Sequence[int], name: str):
    if not 0 <= position < len(strip):
        raise ShapeError(f"position {position} out of range for strip {name} of size {len(strip)}")


def _apply_transform(tracker: CongruenceTracker, ctx: StripContext, kind: TransformKind, params: Dict):
    first, second, third = ctx.first, ctx.second, ctx.third
    if kind == TransformKind.STRIP_OP:
        op: ElementaryOp = params["op"]
        strip = params.get("strip", 1)
        if strip == 3:
            op.validate(len(third))
            tracker.apply_op(ElementaryOp(op.kind, third[op.i], third[op.j], op.c))
            return
        if strip != 1:
            raise ShapeError(f"elementary strip operations act on strip 1 or 3, not {strip}")
        op.validate(len(first))
        if op.kind == OpKind.SWAP:
            tracker.swap(first[op.i], first[op.j])
            tracker.swap(second[op.i], second[op.j])
        elif op.kind == OpKind.SCALE:
            tracker.scale(first[op.i], op.c)
            tracker.scale(second[op.i], op.c.inverse())
        else:
            tracker.add(first[op.i], first[op.j], op.c)
            tracker.add(second[op.j], second[op.i], -op.c)
    elif kind in (TransformKind.LOWER_SHEAR, TransformKind.UPPER_SHEAR):
        i, j, a = params["i"], params["j"], params["a"]
        _check_position(i, first, "1")
        _check_position(j, first, "1")
        target, source = (second, first) if kind == TransformKind.LOWER_SHEAR else (first, second)
        tracker.add(target[j], source[i], a)
        if i != j:
            tracker.add(target[i], source[j], a)
    elif kind == TransformKind.SIGNED_SWAP:
        i = params["i"]
        _check_position(i, first, "1")
        tracker.scale(first[i], -tracker.field.one)
        tracker.swap(first[i], second[i])
    elif kind == TransformKind.RADICAL_ADD:
        source, target, a = params["source"], params["target"], params["a"]
        _check_position(source, third, "3")
        if target == third[source] or not 0 <= target < tracker.n:
            raise ShapeError(f"invalid target {target} for a radical addition")
        tracker.add(target, third[source], a)
    else:
        raise ShapeError(f"unknown transformation {kind}")


def _check_strip_pattern(tracker: CongruenceTracker, ctx: StripContext, step: str):
    """A on the alive indices must equal its strip pattern exactly."""
    a = tracker.grids[0]
    partners = ctx.a_partners()
    alive = ctx.alive()
    for u in alive:
        partner = partners.get(u)
        for w in alive:
            value = a[u][w]
            if partner is not None and partner[0] == w:
                if value != partner[1]:
                    raise ReductionError(f"A[{u},{w}] = {value}, expected {partner[1]}", step=step)
            elif value.value != 0:
                raise ReductionError(f"A[{u},{w}] = {value}, expected 0", step=step)


def coupled_transform(pair: MatrixPair, ctx: StripContext, kind: TransformKind,
                      params: Dict) -> Tuple[MatrixPair, StripContext, Witness]:
    """
    Apply one A-preserving congruence to a pair whose A is in strip form.

    Args:
        pair: Pair with A in normal form relative to ctx
        ctx: Strip layout
        kind: Which congruence
        params: 'op' and 'strip' for STRIP_OP; 'i', 'j', 'a' for the shears;
            'i' for SIGNED_SWAP; 'source', 'target', 'a' for RADICAL_ADD

    Returns:
        (transformed pair, strip layout, elementary witness E)
    """
    tracker = CongruenceTracker([pair.a, pair.b])
    _apply_transform(tracker, ctx, kind, params)
    _check_strip_pattern(tracker, ctx, kind.value)
    return MatrixPair(tracker.matrix(0), tracker.matrix(1)), ctx.copy(), Witness(tracker.witness())


class _LevelReducer:
    """One recursion level of the semi-regularization."""

    def __init__(self, pair: MatrixPair, half_rank: int, depth: int):
        self.field: FieldSpec = pair.field
        self.n = pair.size
        self.tracker = CongruenceTracker([pair.a, pair.b])
        self.ctx = StripContext.from_half_rank(self.n, half_rank, depth)
        self.extracted: List[List[int]] = []
        self.debug = debug_assertions_enabled()

    @property
    def b(self):
        return self.tracker.grids[1]

    def _current(self) -> MatrixPair:
        return MatrixPair(self.tracker.matrix(0), self.tracker.matrix(1))

    def _transform(self, kind: TransformKind, **params):
        _apply_transform(self.tracker, self.ctx, kind, params)
        if self.debug:
            _check_strip_pattern(self.tracker, self.ctx, kind.value)

    def _extract(self, indices: List[int], label: str):
        logger.debug(f"depth {self.ctx.depth}: extracted {label} on {indices}")
        self.extracted.append(indices)

    def _radical_add(self, source: int, target: int, a: FieldElement):
        if a.value != 0:
            self._transform(TransformKind.RADICAL_ADD,
                            source=self.ctx.third.index(source), target=target, a=a)

    def run(self) -> LevelOutcome:
        self._extract_radical_pairs()
        self._extract_dependent_columns()
        self._couple_columns()
        return self._descend()

    def _extract_radical_pairs(self):
        """K blocks from the nonsingular part of B on the third strip."""
        third = self.ctx.third
        if len(third) < 2:
            return
        block = Matrix(self.field, len(third), len(third), [[self.b[i][j] for j in third] for i in third])
        if block.is_zero():
            return
        local = skew_canonicalize(block)
        self.tracker.transform(embed(self.field, self.n, third, local.witness.s))
        if self.debug:
            _check_strip_pattern(self.tracker, self.ctx, "radical-canonicalize")
        k = local.half_rank
        pairs = [(third[t], third[k + t]) for t in range(k)]
        for u, w in pairs:
            for x in self.ctx.alive():
                if x in (u, w):
                    continue
                self._radical_add(w, x, self.b[x][u])
                self._radical_add(u, x, -self.b[x][w])
        for u, w in pairs:
            self.ctx.third.remove(u)
            self.ctx.third.remove(w)
            self._extract([u, w], f"K{1 + 2 * self.ctx.depth}")

    def _extract_dependent_columns(self):
        """L blocks from third-strip columns of B dependent on earlier ones (leftmost greedy)."""
        zero, one = self.field.zero, self.field.one
        rows = self.ctx.alive()
        basis: List[Tuple[List[FieldElement], int, Dict[int, FieldElement]]] = []
        dependent = []
        for c in self.ctx.third:
            v = [self.b[r][c] for r in rows]
            combo = {c: one}
            for vec, pivot, vec_combo in basis:
                f = v[pivot]
                if f.value == 0:
                    continue
                v = [x - f * y for x, y in zip(v, vec)]
                for col, coef in vec_combo.items():
                    combo[col] = combo.get(col, zero) - f * coef
            pivot = next((r for r, x in enumerate(v) if x.value != 0), None)
            if pivot is None:
                dependent.append((c, combo))
                continue
            inv = v[pivot].inverse()
            basis.append(([inv * x for x in v], pivot, {col: inv * coef for col, coef in combo.items()}))
        for c, combo in dependent:
            for col, coef in combo.items():
                if col != c and coef.value != 0:
                    op = ElementaryOp.add_row(self.ctx.third.index(c), self.ctx.third.index(col), coef)
                    self._transform(TransformKind.STRIP_OP, strip=3, op=op)
            if any(self.b[r][c].value != 0 for r in self.ctx.alive()):
                raise ReductionError(f"column {c} did not vanish", step="dependent-columns")
            self.ctx.third.remove(c)
            self._extract([c], f"L{self.ctx.depth + 1}")

    def _clean_row(self, row: int, column: int):
        """Make B[row, x] = 0 for every x but column, using B[row, column] = 1."""
        for x in self.ctx.alive():
            if x in (row, column):
                continue
            self._radical_add(column, x, -self.b[row][x])

    def _pivot_column(self, c: int) -> int:
        """Reduce column c on the free strips to the unit vector at its first nonzero first-strip row."""
        ctx = self.ctx
        b = self.b
        if all(b[u][c].value == 0 for u in ctx.first):
            i = next((i for i, w in enumerate(ctx.second) if b[w][c].value != 0), None)
            if i is None:
                raise ReductionError(f"third-strip column {c} vanished on the free strips", step="couple")
            self._transform(TransformKind.SIGNED_SWAP, i=i)
        b = self.b
        i = next(j for j, u in enumerate(ctx.first) if b[u][c].value != 0)
        self._transform(TransformKind.STRIP_OP, strip=1,
                        op=ElementaryOp.scale_row(i, self.b[ctx.first[i]][c].inverse()))
        for j, u in enumerate(ctx.first):
            beta = self.b[u][c]
            if j != i and beta.value != 0:
                self._transform(TransformKind.STRIP_OP, strip=1, op=ElementaryOp.add_row(j, i, -beta))
        for j, w in enumerate(ctx.second):
            gamma = self.b[w][c]
            if gamma.value != 0:
                self._transform(TransformKind.LOWER_SHEAR, i=i, j=j, a=-gamma)
        return i

    def _couple_columns(self):
        """Couple each third-strip column to a first-strip row, last column first."""
        ctx = self.ctx
        while ctx.third:
            c = ctx.third[-1]
            if all(self.b[x][c].value == 0 for x in ctx.alive()):
                raise ReductionError(f"third-strip column {c} is zero", step="couple")
            i = self._pivot_column(c)
            p, q = ctx.first[i], ctx.second[i]
            self._clean_row(p, c)
            unfinished = [u for u in ctx.third if u != c]
            partners = [u for u in unfinished if self.b[q][u].value != 0]
            if not partners:
                ctx.first.pop(i)
                ctx.second.pop(i)
                ctx.third.remove(c)
                ctx.coupled_first.append(p)
                ctx.coupled_second.append(q)
                ctx.coupled_third.append(c)
                continue
            c2 = partners[-1]
            self._release_pair(i, c, c2)

    def _release_pair(self, i: int, c: int, c2: int):
        """Second-strip row q meets another third column c2: {p, q, c, c2} splits off as a K block."""
        ctx = self.ctx
        p, q = ctx.first[i], ctx.second[i]
        position = ctx.third.index
        self._transform(TransformKind.STRIP_OP, strip=3,
                        op=ElementaryOp.scale_row(position(c2), self.b[q][c2].inverse()))
        for u in list(ctx.third):
            beta = self.b[q][u]
            if u not in (c, c2) and beta.value != 0:
                self._transform(TransformKind.STRIP_OP, strip=3,
                                op=ElementaryOp.add_row(position(u), position(c2), -beta))
        for j, u in enumerate(ctx.first):
            beta = self.b[u][c2]
            if j != i and beta.value != 0:
                self._transform(TransformKind.UPPER_SHEAR, i=i, j=j, a=-beta)
        for j, w in enumerate(ctx.second):
            beta = self.b[w][c2]
            if j != i and beta.value != 0:
                self._transform(TransformKind.STRIP_OP, strip=1, op=ElementaryOp.add_row(i, j, beta))
        for y in ctx.alive():
            if y not in (p, q) and self.b[y][c2].value != 0:
                raise ReductionError(f"B[{y},{c2}] survived the column clearing", step="release")
        self._clean_row(p, c)
        self._clean_row(q, c2)
        ctx.first.pop(i)
        ctx.second.pop(i)
        ctx.third.remove(c)
        ctx.third.remove(c2)
        self._extract([c, p, q, c2], f"K{2 + 2 * ctx.depth}")

    def _descend(self) -> LevelOutcome:
        ctx = self.ctx
        if not ctx.coupled_first:
            return LevelOutcome(self.tracker.witness(), self.extracted, ctx.first + ctx.second, self._current())
        sub_indices = ctx.first + ctx.second + ctx.coupled_second
        k = len(ctx.first)
        sub_pair = extract_principal(self._current(), sub_indices)
        sub = _LevelReducer(sub_pair, k, ctx.depth + 1).run()
        self.tracker.transform(self._lift(sub_indices, k, sub.transform, sub_pair))
        if self.debug:
            _check_strip_pattern(self.tracker, ctx, "lift")
        for local in sub.extracted:
            mapped = [sub_indices[e] for e in local]
            for e in local:
                if e >= 2 * k:
                    t = e - 2 * k
                    mapped += [ctx.coupled_first[t], ctx.coupled_third[t]]
            self.extracted.append(mapped)
        if any(r >= 2 * k for r in sub.remaining):
            raise ReductionError("coupled strip left in the regular remainder", step="lift")
        return LevelOutcome(self.tracker.witness(), self.extracted, [sub_indices[r] for r in sub.remaining],
                            self._current())

    def _lift(self, sub_indices: List[int], k: int, r: Matrix, sub_pair: MatrixPair) -> Matrix:
        """
        Extend the sub-level congruence R to this level.

        New rows: sub rows R + Y (on coupled_third), coupled_first rows
        G + W + Z, coupled_third rows K = G^-T. The blocks are fixed by
        keeping coupled_first A-dual to the new coupled_second rows and
        B-paired with coupled_third only.
        """
        field = self.field
        ctx = self.ctx
        size = len(sub_indices)
        front = list(range(2 * k))
        back = list(range(2 * k, size))
        r_inv = inverse(r)
        g = r_inv.submatrix(back, back).transpose()
        g_inv_t = inverse(g).transpose()
        j = sub_pair.a.principal(front)
        w_front = (j * r_inv.submatrix(front, back)).transpose()
        n_mat = w_front * j * w_front.transpose()
        x = n_mat.strictly_lower() * g_inv_t
        w = Matrix(field, len(back), size, [wr + xr for wr, xr in zip(w_front.entries, x.entries)])
        b_sub = sub_pair.b
        y = r * b_sub * w.transpose() * g_inv_t
        m = w * b_sub * w.transpose()
        z = m.strictly_lower() * g_inv_t

        lift = Matrix.identity(field, self.n)
        rows = lift.entries
        zero_row = [field.zero] * self.n
        for a, idx in enumerate(sub_indices):
            row = list(zero_row)
            for b_pos, col in enumerate(sub_indices):
                row[col] = r[a, b_pos]
            for t, col in enumerate(ctx.coupled_third):
                row[col] = y[a, t]
            rows[idx] = row
        for t, idx in enumerate(ctx.coupled_first):
            row = list(zero_row)
            for u, col in enumerate(ctx.coupled_first):
                row[col] = g[t, u]
            for b_pos, col in enumerate(sub_indices):
                row[col] = w[t, b_pos]
            for u, col in enumerate(ctx.coupled_third):
                row[col] = z[t, u]
            rows[idx] = row
        for t, idx in enumerate(ctx.coupled_third):
            row = list(zero_row)
            for u, col in enumerate(ctx.coupled_third):
                row[col] = g_inv_t[t, u]
            rows[idx] = row
        return lift


def _path_positions(kind: BlockKind, n: int) -> List[int]:
    """Canonical positions visited when walking a block from its start vertex."""
    if kind == BlockKind.K:
        return [p for t in range(n) for p in (t, n + t)]
    return [n - 1] + [p for t in range(n - 1) for p in (t, n + t)]


def identify_summand(pair: MatrixPair, indices: Sequence[int]) -> ExtractedSummand:
    """
    Recognise an extracted principal subpair as K_n or L_n.

    The nonzero entries of A and B form a single path that alternates
    between the two matrices; walking it from its start fixes the order
    and signs that turn the subpair into the canonical block exactly.
    """
    indices = list(indices)
    sub = extract_principal(pair, indices)
    size = len(indices)
    edges = []
    for m in (sub.a, sub.b):
        neighbours: Dict[int, int] = {}
        for u in range(size):
            for v in range(size):
                if u != v and m[u, v].value != 0:
                    if u in neighbours:
                        raise ReductionError(f"summand on {indices} is not a path", step="identify")
                    neighbours[u] = v
        edges.append(neighbours)
    a_edges, b_edges = edges
    if size % 2:
        block = CanonicalBlock.l_block((size + 1) // 2)
        starts = [v for v in range(size) if v not in b_edges]
        use_a = True
    else:
        block = CanonicalBlock.k_block(size // 2)
        starts = [v for v in range(size) if v not in a_edges]
        use_a = False
    if not starts:
        raise ReductionError(f"summand on {indices} has no start vertex", step="identify")
    start = min(starts, key=lambda v: indices[v])
    path = [start]
    steps = []
    while len(path) < size:
        nxt = (a_edges if use_a else b_edges).get(path[-1])
        if nxt is None or nxt in path:
            raise ReductionError(f"summand on {indices} is not a {block}", step="identify")
        path.append(nxt)
        steps.append(use_a)
        use_a = not use_a

    field = pair.field
    canonical = realize(block, field)
    positions = _path_positions(block.kind, block.n)
    signs = [field.one]
    for t, step_a in enumerate(steps):
        target = canonical.a if step_a else canonical.b
        source = sub.a if step_a else sub.b
        signs.append(target[positions[t], positions[t + 1]] / (signs[t] * source[path[t], path[t + 1]]))
    ordered = [0] * size
    ordered_signs = [field.one] * size
    for t, pos in enumerate(positions):
        ordered[pos] = indices[path[t]]
        ordered_signs[pos] = signs[t]
    summand = ExtractedSummand(block, ordered, ordered_signs)
    local = Matrix.zeros(field, size)
    for pos in range(size):
        local.entries[pos][indices.index(ordered[pos])] = ordered_signs[pos]
    if congruence_unchecked(sub, local) != canonical:
        raise ReductionError(f"summand on {indices} does not match {block}", step="identify")
    return summand


def _verify_factorization(pair: MatrixPair, witness: Matrix, parts: List[MatrixPair], step: str):
    if congruence_unchecked(pair, witness) != direct_sum(parts, pair.field):
        raise ReductionError("witness does not reproduce the decomposition", step=step)


def semi_regularize(pair: MatrixPair) -> SemiRegResult:
    """
    Split off K_n and L_n summands until the first matrix is nonsingular.

    Args:
        pair: Skew-symmetric pair

    Returns:
        SemiRegResult whose witness rows are the remaining part followed by
        each extracted block in canonical position order
    """
    field = pair.field
    n = pair.size
    if n == 0:
        return SemiRegResult(MatrixPair.empty(field), [], Witness.identity(field, 0))
    skew = skew_canonicalize(pair.a)
    s0 = skew.witness.s
    outcome = _LevelReducer(congruence_unchecked(pair, s0), skew.half_rank, 0).run()
    s = outcome.transform * s0
    reduced = outcome.reduced
    summands = [identify_summand(reduced, indices) for indices in outcome.extracted]

    rows = [s.row(r) for r in outcome.remaining]
    for summand in summands:
        for v, sign in zip(summand.indices, summand.signs):
            rows.append([sign * x for x in s.entries[v]])
    if len(rows) != n:
        raise ReductionError(f"{len(rows)} witness rows for a pair of size {n}", step="semi_regularize")
    witness = Matrix(field, n, n, rows)
    remaining = extract_principal(reduced, outcome.remaining)
    if debug_assertions_enabled():
        _verify_factorization(pair, witness, [remaining] + [realize(s.block, field) for s in summands],
                              "semi_regularize")
    if remaining.size and not is_nonsingular(remaining.a):
        raise ReductionError("first matrix of the remainder is singular", step="semi_regularize")
    logger.debug(f"semi-regularized size {n}: remainder {remaining.size}, "
                 f"blocks {[str(s.block) for s in summands]}")
    return SemiRegResult(remaining, summands, Witness(witness))


def regularize(pair: MatrixPair, check: bool = True) -> RegularizationResult:
    """
    Split off every singular summand, leaving both matrices nonsingular.

    The second pass runs on the swapped remainder; its K_m blocks become
    J(m, 0) once swapped back.

    Args:
        pair: Skew-symmetric pair
        check: Re-multiply the witness before returning. Callers that check
            a later factorization of the same pair may skip it.
    """
    field = pair.field
    first = semi_regularize(pair)
    second = semi_regularize(first.remaining.swapped())
    if any(s.block.kind == BlockKind.L for s in second.extracted):
        raise ReductionError("L block found after the first matrix became nonsingular", step="regularize")
    regular = second.remaining.swapped()
    zero_blocks = [CanonicalBlock.j_block(s.block.n, field.zero) for s in second.extracted]
    r1 = first.remaining.size
    outer = Matrix.block_diagonal(field, [second.witness.s, Matrix.identity(field, pair.size - r1)])
    witness = outer * first.witness.s
    singular = zero_blocks + first.blocks
    if check or debug_assertions_enabled():
        _verify_factorization(pair, witness, [regular] + [realize(b, field) for b in singular], "regularize")
    if regular.size and not is_nonsingular(regular.b):
        raise ReductionError("second matrix of the regular part is singular", step="regularize")
    return RegularizationResult(regular, singular, Witness(witness))
