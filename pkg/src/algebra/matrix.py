"""
Dense exact matrices over a FieldSpec, skew-symmetric pairs, witnesses and
elementary congruence operations.

Matrices are value types: every public operation returns a new object.
In-place elimination for the reduction algorithms goes through
CongruenceTracker, which mutates working copies and keeps the witness
current after every step.
"""

import logging
from dataclasses import dataclass, field as dataclass_field
from enum import Enum
from math import lcm
from typing import List, Optional, Sequence, Tuple

from core.errors import FieldError, NotSkewError, ReductionError, ShapeError, SingularMatrixError
from core.settings import debug_assertions_enabled

from .field import FieldElement, FieldSpec

logger = logging.getLogger(__name__)

Grid = List[List[FieldElement]]


class Matrix:
    """A rows x cols grid of FieldElement over a single field."""

    __slots__ = ("field", "rows", "cols", "entries")

    def __init__(self, field: FieldSpec, rows: int, cols: int, entries: Optional[Grid] = None):
        self.field = field
        self.rows = rows
        self.cols = cols
        if entries is None:
            zero = field.zero
            entries = [[zero] * cols for _ in range(rows)]
        elif len(entries) != rows or any(len(row) != cols for row in entries):
            raise ShapeError(f"entries do not form a {rows}x{cols} grid")
        self.entries = entries

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence], cols: Optional[int] = None) -> "Matrix":
        """Build from nested sequences of ints, Fractions, strings or elements."""
        grid = [[field.element(v) for v in row] for row in rows]
        if cols is None:
            cols = len(grid[0]) if grid else 0
        return cls(field, len(grid), cols, grid)

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: Optional[int] = None) -> "Matrix":
        return cls(field, rows, rows if cols is None else cols)

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        m = cls(field, n, n)
        one = field.one
        for i in range(n):
            m.entries[i][i] = one
        return m

    @classmethod
    def block_diagonal(cls, field: FieldSpec, blocks: Sequence["Matrix"]) -> "Matrix":
        n = sum(b.rows for b in blocks)
        c = sum(b.cols for b in blocks)
        out = cls(field, n, c)
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                out.entries[r0 + i][c0:c0 + b.cols] = list(b.entries[i])
            r0 += b.rows
            c0 += b.cols
        return out

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, index: Tuple[int, int]) -> FieldElement:
        i, j = index
        return self.entries[i][j]

    def row(self, i: int) -> List[FieldElement]:
        return list(self.entries[i])

    def copy_grid(self) -> Grid:
        return [list(row) for row in self.entries]

    def _check_same_field(self, other: "Matrix"):
        if other.field != self.field:
            raise FieldError(f"mixed fields {self.field} and {other.field}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_field(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("addition of matrices with different shapes")
        return Matrix(self.field, self.rows, self.cols,
                      [[x + y for x, y in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        return Matrix(self.field, self.rows, self.cols, [[-x for x in r] for r in self.entries])

    def scale(self, c: FieldElement) -> "Matrix":
        c = self.field.element(c)
        return Matrix(self.field, self.rows, self.cols, [[c * x for x in r] for r in self.entries])

    def __mul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return self.scale(other)
        self._check_same_field(other)
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        zero = self.field.zero
        cols = list(zip(*other.entries)) if other.rows else [()] * other.cols
        out = []
        for r in self.entries:
            nz = [(k, x) for k, x in enumerate(r) if x.value != 0]
            row = []
            for col in cols:
                acc = zero
                for k, x in nz:
                    y = col[k]
                    if y.value != 0:
                        acc = acc + x * y
                row.append(acc)
            out.append(row)
        return Matrix(self.field, self.rows, other.cols, out)

    def transpose(self) -> "Matrix":
        if self.rows == 0:
            return Matrix(self.field, self.cols, 0, [[] for _ in range(self.cols)])
        return Matrix(self.field, self.cols, self.rows, [list(c) for c in zip(*self.entries)])

    def submatrix(self, row_indices: Sequence[int], col_indices: Sequence[int]) -> "Matrix":
        return Matrix(self.field, len(row_indices), len(col_indices),
                      [[self.entries[i][j] for j in col_indices] for i in row_indices])

    def principal(self, indices: Sequence[int]) -> "Matrix":
        return self.submatrix(indices, indices)

    def strictly_lower(self) -> "Matrix":
        zero = self.field.zero
        return Matrix(self.field, self.rows, self.cols,
                      [[x if j < i else zero for j, x in enumerate(r)] for i, r in enumerate(self.entries)])

    def is_zero(self) -> bool:
        return all(x.value == 0 for r in self.entries for x in r)

    def is_skew(self) -> bool:
        if not self.is_square:
            return False
        e = self.entries
        for i in range(self.rows):
            if e[i][i].value != 0:
                return False
            for j in range(i + 1, self.rows):
                if (e[i][j] + e[j][i]).value != 0:
                    return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.field == other.field and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.field, self.rows, self.cols, tuple(tuple(r) for r in self.entries)))

    def to_strings(self) -> List[List[str]]:
        return [[str(x) for x in r] for r in self.entries]

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self.entries)
        return f"Matrix[{self.field}]({self.rows}x{self.cols}: {body})"

    def _echelon(self) -> Tuple[Grid, List[int]]:
        """Reduced row echelon form and pivot columns."""
        grid = self.copy_grid()
        pivots = []
        r = 0
        for c in range(self.cols):
            pivot = next((i for i in range(r, self.rows) if grid[i][c].value != 0), None)
            if pivot is None:
                continue
            grid[r], grid[pivot] = grid[pivot], grid[r]
            inv = grid[r][c].inverse()
            grid[r] = [inv * x for x in grid[r]]
            for i in range(self.rows):
                f = grid[i][c]
                if i != r and f.value != 0:
                    grid[i] = [x - f * y for x, y in zip(grid[i], grid[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return grid, pivots


def _integer_rows(m: Matrix) -> List[List[int]]:
    """Clear denominators row by row; row scaling keeps the rank."""
    rows = []
    for r in m.entries:
        denom = lcm(*(x.value.denominator for x in r)) if r else 1
        rows.append([x.value.numerator * (denom // x.value.denominator) for x in r])
    return rows


def _bareiss_rank(grid: List[List[int]]) -> int:
    """Fraction-free elimination; every division by the previous pivot is exact."""
    n_rows = len(grid)
    n_cols = len(grid[0]) if grid else 0
    r = 0
    previous = 1
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if grid[i][c]), None)
        if pivot is None:
            continue
        grid[r], grid[pivot] = grid[pivot], grid[r]
        top = grid[r]
        p = top[c]
        for i in range(r + 1, n_rows):
            f = grid[i][c]
            grid[i] = [(p * x - f * y) // previous for x, y in zip(grid[i], top)]
        previous = p
        r += 1
        if r == n_rows:
            break
    return r


def _modular_rank(grid: List[List[int]], p: int) -> int:
    n_rows = len(grid)
    n_cols = len(grid[0]) if grid else 0
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if grid[i][c]), None)
        if pivot is None:
            continue
        grid[r], grid[pivot] = grid[pivot], grid[r]
        inv = pow(grid[r][c], -1, p)
        top = [x * inv % p for x in grid[r]]
        grid[r] = top
        for i in range(r + 1, n_rows):
            f = grid[i][c]
            if f:
                grid[i] = [(x - f * y) % p for x, y in zip(grid[i], top)]
        r += 1
        if r == n_rows:
            break
    return r


def rank(m: Matrix) -> int:
    """Rank on plain integers: Bareiss over Q, residues over GF(p)."""
    if m.rows == 0 or m.cols == 0:
        return 0
    if m.field.is_rational:
        return _bareiss_rank(_integer_rows(m))
    return _modular_rank([[x.value for x in r] for r in m.entries], m.field.modulus)


def is_nonsingular(m: Matrix) -> bool:
    return m.is_square and rank(m) == m.rows


def inverse(m: Matrix) -> Matrix:
    """Gauss-Jordan inverse; raises SingularMatrixError."""
    if not m.is_square:
        raise ShapeError("inverse of a non-square matrix")
    n = m.rows
    augmented = Matrix(m.field, n, 2 * n,
                       [list(r) + list(e) for r, e in zip(m.entries, Matrix.identity(m.field, n).entries)])
    grid, pivots = augmented._echelon()
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError(f"{n}x{n} matrix is singular")
    return Matrix(m.field, n, n, [row[n:] for row in grid])


def nullspace_basis(m: Matrix) -> List[List[FieldElement]]:
    """Basis of {v : m v = 0}, one vector per free column."""
    grid, pivots = m._echelon()
    field = m.field
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [field.zero] * m.cols
        v[f] = field.one
        for r, c in enumerate(pivots):
            v[c] = -grid[r][f]
        basis.append(v)
    return basis


@dataclass(frozen=True, eq=False)
class MatrixPair:
    """Two square matrices of equal size; skew-symmetric unless check_skew is off."""

    a: Matrix
    b: Matrix
    check_skew: bool = dataclass_field(default=True, repr=False)

    def __post_init__(self):
        if self.a.field != self.b.field:
            raise FieldError(f"pair over mixed fields {self.a.field} and {self.b.field}")
        if not (self.a.is_square and self.b.is_square) or self.a.rows != self.b.rows:
            raise ShapeError("pair matrices must be square of equal size")
        if self.check_skew:
            for name, m in (("A", self.a), ("B", self.b)):
                if not m.is_skew():
                    raise NotSkewError(f"{name} is not skew-symmetric")

    @classmethod
    def general(cls, a: Matrix, b: Matrix) -> "MatrixPair":
        return cls(a, b, check_skew=False)

    @classmethod
    def empty(cls, field: FieldSpec) -> "MatrixPair":
        return cls(Matrix.zeros(field, 0), Matrix.zeros(field, 0))

    @property
    def field(self) -> FieldSpec:
        return self.a.field

    @property
    def size(self) -> int:
        return self.a.rows

    def swapped(self) -> "MatrixPair":
        return MatrixPair(self.b, self.a, self.check_skew)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixPair):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))


@dataclass(frozen=True)
class Witness:
    """Accumulated congruence S; the reduced pair is S (A, B) S^T."""

    s: Matrix

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Witness":
        return cls(Matrix.identity(field, n))

    @property
    def field(self) -> FieldSpec:
        return self.s.field

    def apply(self, pair: MatrixPair) -> MatrixPair:
        return congruence_by(pair, self.s)


class OpKind(Enum):
    SWAP = "swap"
    SCALE = "scale"
    ADD = "add"


@dataclass(frozen=True)
class ElementaryOp:
    """
    A row operation read as a congruence (row op, then the same column op).

    SWAP exchanges i and j, SCALE multiplies i by c, ADD adds c times j to i.
    """

    kind: OpKind
    i: int
    j: int = 0
    c: Optional[FieldElement] = None

    @classmethod
    def swap_rows(cls, i: int, j: int) -> "ElementaryOp":
        return cls(OpKind.SWAP, i, j)

    @classmethod
    def scale_row(cls, i: int, c: FieldElement) -> "ElementaryOp":
        if c.is_zero():
            raise FieldError("scale factor must be nonzero")
        return cls(OpKind.SCALE, i, i, c)

    @classmethod
    def add_row(cls, i: int, j: int, c: FieldElement) -> "ElementaryOp":
        if i == j:
            raise ShapeError("AddRow needs two distinct indices")
        return cls(OpKind.ADD, i, j, c)

    def validate(self, n: int):
        if not (0 <= self.i < n and 0 <= self.j < n):
            raise ShapeError(f"operation index out of range for size {n}: {self}")
        if self.kind == OpKind.SCALE and (self.c is None or self.c.is_zero()):
            raise FieldError("scale factor must be nonzero")

    def matrix(self, field: FieldSpec, n: int) -> Matrix:
        """The elementary matrix E of this operation."""
        self.validate(n)
        e = Matrix.identity(field, n)
        if self.kind == OpKind.SWAP:
            e.entries[self.i], e.entries[self.j] = e.entries[self.j], e.entries[self.i]
        elif self.kind == OpKind.SCALE:
            e.entries[self.i][self.i] = self.c
        else:
            e.entries[self.i][self.j] = self.c
        return e


def apply_congruence(pair: MatrixPair, op: ElementaryOp) -> MatrixPair:
    tracker = CongruenceTracker([pair.a, pair.b])
    tracker.apply_op(op)
    return MatrixPair(tracker.matrix(0), tracker.matrix(1))


def record(op: ElementaryOp, witness: Witness) -> Witness:
    """Witness after op: E * S."""
    n = witness.s.rows
    return Witness(op.matrix(witness.field, n) * witness.s)


def congruence_by(pair: MatrixPair, s: Matrix) -> MatrixPair:
    """(S A S^T, S B S^T); S must be square, nonsingular and of matching size."""
    if not s.is_square or s.rows != pair.size:
        raise ShapeError(f"congruence by {s.rows}x{s.cols} on a pair of size {pair.size}")
    if not is_nonsingular(s):
        raise SingularMatrixError("congruence matrix is singular")
    return congruence_unchecked(pair, s)


def congruence_unchecked(pair: MatrixPair, s: Matrix) -> MatrixPair:
    st = s.transpose()
    return MatrixPair(s * pair.a * st, s * pair.b * st, pair.check_skew)


def direct_sum(pairs: Sequence[MatrixPair], field: Optional[FieldSpec] = None) -> MatrixPair:
    if not pairs:
        if field is None:
            raise FieldError("field required for an empty direct sum")
        return MatrixPair.empty(field)
    f = pairs[0].field
    if any(p.field != f for p in pairs) or (field is not None and field != f):
        raise FieldError("direct sum of pairs over different fields")
    return MatrixPair(Matrix.block_diagonal(f, [p.a for p in pairs]),
                      Matrix.block_diagonal(f, [p.b for p in pairs]))


def extract_principal(pair: MatrixPair, indices: Sequence[int]) -> MatrixPair:
    indices = list(indices)
    if any(not 0 <= i < pair.size for i in indices) or len(set(indices)) != len(indices):
        raise ShapeError(f"invalid principal index set {indices} for size {pair.size}")
    return MatrixPair(pair.a.principal(indices), pair.b.principal(indices), pair.check_skew)


def permutation_matrix(field: FieldSpec, order: Sequence[int]) -> Matrix:
    """Rows are the unit vectors e_{order[0]}, e_{order[1]}, ..."""
    n = len(order)
    p = Matrix.zeros(field, n)
    for r, c in enumerate(order):
        p.entries[r][c] = field.one
    return p


class CongruenceTracker:
    """
    Mutable working copies of several square matrices plus a witness.

    Every operation is applied as a congruence to all tracked matrices and
    left-multiplied onto the witness rows.
    """

    def __init__(self, matrices: Sequence[Matrix], witness: Optional[Matrix] = None):
        if not matrices:
            raise ShapeError("nothing to track")
        self.field = matrices[0].field
        self.n = matrices[0].rows
        self.grids = [m.copy_grid() for m in matrices]
        base = witness if witness is not None else Matrix.identity(self.field, self.n)
        self.witness_rows = base.copy_grid()
        self.witness_cols = base.cols

    def matrix(self, k: int) -> Matrix:
        return Matrix(self.field, self.n, self.n, [list(r) for r in self.grids[k]])

    def witness(self) -> Matrix:
        return Matrix(self.field, self.n, self.witness_cols, [list(r) for r in self.witness_rows])

    def apply_op(self, op: ElementaryOp):
        op.validate(self.n)
        if op.kind == OpKind.SWAP:
            self.swap(op.i, op.j)
        elif op.kind == OpKind.SCALE:
            self.scale(op.i, op.c)
        else:
            self.add(op.i, op.j, op.c)

    def add(self, i: int, j: int, c: FieldElement):
        """Row i += c * row j, then column i += c * column j."""
        if c.value == 0:
            return
        for g in self.grids:
            gj = g[j]
            g[i] = [x + c * y if y.value != 0 else x for x, y in zip(g[i], gj)]
            for r in g:
                y = r[j]
                if y.value != 0:
                    r[i] = r[i] + c * y
        wj = self.witness_rows[j]
        self.witness_rows[i] = [x + c * y if y.value != 0 else x for x, y in zip(self.witness_rows[i], wj)]
        self._debug_check("add")

    def scale(self, i: int, c: FieldElement):
        if c.value == 0:
            raise FieldError("scale factor must be nonzero")
        if c.value == 1:
            return
        for g in self.grids:
            g[i] = [c * x for x in g[i]]
            for r in g:
                r[i] = c * r[i]
        self.witness_rows[i] = [c * x for x in self.witness_rows[i]]
        self._debug_check("scale")

    def swap(self, i: int, j: int):
        if i == j:
            return
        for g in self.grids:
            g[i], g[j] = g[j], g[i]
            for r in g:
                r[i], r[j] = r[j], r[i]
        self.witness_rows[i], self.witness_rows[j] = self.witness_rows[j], self.witness_rows[i]

    def transform(self, left: Matrix):
        """Apply a whole congruence L: M <- L M L^T, S <- L S."""
        lt = left.transpose()
        for k, g in enumerate(self.grids):
            m = Matrix(self.field, self.n, self.n, g)
            self.grids[k] = (left * m * lt).entries
        self.witness_rows = (left * self.witness()).entries
        self._debug_check("transform")

    def _debug_check(self, step: str):
        if not debug_assertions_enabled():
            return
        for g in self.grids:
            if not Matrix(self.field, self.n, self.n, g).is_skew():
                raise ReductionError("skew-symmetry lost", step=step)
