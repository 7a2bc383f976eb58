"""
Canonical summands of a skew pair and their exact realizations.

    J(n, lam)  ([0, I; -I, 0], [0, J_n(lam); -J_n(lam)^T, 0])      size 2n
    J(n, f)    same with J_n(lam) replaced by the companion block of f
    K(n)       ([0, J_n(0); -J_n(0)^T, 0], [0, I; -I, 0])            size 2n
    L(n)       ([0, [I 0]; -[I 0]^T, 0], [0, [0 I]; -[0 I]^T, 0])   size 2n - 1

J_n(lam) carries lam on the diagonal and ones directly below it.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

from algebra.field import FieldElement, FieldSpec
from algebra.matrix import Matrix, MatrixPair, direct_sum
from algebra.poly import Polynomial, companion_matrix
from core.errors import ShapeError


class BlockKind(Enum):
    L = "L"
    K = "K"
    J = "J"

    @property
    def rank(self) -> int:
        return {"L": 0, "K": 1, "J": 2}[self.value]


@dataclass(frozen=True)
class CanonicalBlock:
    kind: BlockKind
    n: int
    eigenvalue: Optional[FieldElement] = None
    polynomial: Optional[Polynomial] = None
    fully_decomposed: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ShapeError(f"block order must be at least 1, got {self.n}")
        if self.kind == BlockKind.J:
            if (self.eigenvalue is None) == (self.polynomial is None):
                raise ShapeError("J blocks carry exactly one of eigenvalue or polynomial")
            if self.polynomial is not None and self.polynomial.degree != self.n:
                raise ShapeError(f"label {self.polynomial} has degree {self.polynomial.degree}, expected {self.n}")
        elif self.eigenvalue is not None or self.polynomial is not None:
            raise ShapeError(f"{self.kind.value} blocks carry no label")

    @classmethod
    def k_block(cls, n: int) -> "CanonicalBlock":
        return cls(BlockKind.K, n)

    @classmethod
    def l_block(cls, n: int) -> "CanonicalBlock":
        return cls(BlockKind.L, n)

    @classmethod
    def j_block(cls, n: int, eigenvalue: FieldElement) -> "CanonicalBlock":
        return cls(BlockKind.J, n, eigenvalue=eigenvalue)

    @classmethod
    def j_poly_block(cls, polynomial: Polynomial, fully_decomposed: bool) -> "CanonicalBlock":
        return cls(BlockKind.J, polynomial.degree, polynomial=polynomial.monic(),
                   fully_decomposed=fully_decomposed)

    @property
    def size(self) -> int:
        return 2 * self.n - 1 if self.kind == BlockKind.L else 2 * self.n

    def sort_key(self) -> Tuple:
        """L < K < J, then n, then eigenvalue labels before polynomial labels."""
        if self.eigenvalue is not None:
            label = (0, self.eigenvalue.sort_key())
        elif self.polynomial is not None:
            label = (1, self.polynomial.sort_key())
        else:
            label = (0, ())
        return (self.kind.rank, self.n, label)

    def label_text(self) -> Optional[str]:
        if self.eigenvalue is not None:
            return str(self.eigenvalue)
        if self.polynomial is not None:
            return str(self.polynomial)
        return None

    def to_dict(self) -> Dict:
        out = {"kind": self.kind.value, "n": self.n}
        if self.eigenvalue is not None:
            out["eigenvalue"] = str(self.eigenvalue)
        if self.polynomial is not None:
            out["polynomial"] = self.polynomial.to_strings()
            out["fully_decomposed"] = self.fully_decomposed
        return out

    def __str__(self) -> str:
        label = self.label_text()
        return f"{self.kind.value}{self.n}" + (f"({label})" if label is not None else "")


def _skew_from_upper(field: FieldSpec, size: int, entries: Dict[Tuple[int, int], FieldElement]) -> Matrix:
    m = Matrix.zeros(field, size)
    for (i, j), v in entries.items():
        m.entries[i][j] = v
        m.entries[j][i] = -v
    return m


def _offdiagonal_pair(field: FieldSpec, n: int, upper_a: Matrix, upper_b: Matrix) -> MatrixPair:
    """([0, X; -X^T, 0], [0, Y; -Y^T, 0]) for n x n blocks X, Y."""
    a = {(i, n + j): upper_a[i, j] for i in range(n) for j in range(n) if upper_a[i, j].value != 0}
    b = {(i, n + j): upper_b[i, j] for i in range(n) for j in range(n) if upper_b[i, j].value != 0}
    return MatrixPair(_skew_from_upper(field, 2 * n, a), _skew_from_upper(field, 2 * n, b))


def jordan_block(field: FieldSpec, n: int, eigenvalue: FieldElement) -> Matrix:
    m = Matrix.zeros(field, n)
    for r in range(n):
        m.entries[r][r] = eigenvalue
        if r + 1 < n:
            m.entries[r + 1][r] = field.one
    return m


def realize(block: CanonicalBlock, field: FieldSpec) -> MatrixPair:
    """The exact canonical pair of a block."""
    n = block.n
    one = field.one
    if block.kind == BlockKind.L:
        size = 2 * n - 1
        a = {(t, n - 1 + t): one for t in range(n - 1)}
        b = {(t, n + t): one for t in range(n - 1)}
        return MatrixPair(_skew_from_upper(field, size, a), _skew_from_upper(field, size, b))
    identity = Matrix.identity(field, n)
    if block.kind == BlockKind.K:
        return _offdiagonal_pair(field, n, jordan_block(field, n, field.zero), identity)
    if block.eigenvalue is not None:
        inner = jordan_block(field, n, field.element(block.eigenvalue))
    else:
        inner = companion_matrix(block.polynomial)
    return _offdiagonal_pair(field, n, identity, inner)


def realize_sum(blocks: Sequence[CanonicalBlock], field: FieldSpec) -> MatrixPair:
    return direct_sum([realize(b, field) for b in blocks], field)
