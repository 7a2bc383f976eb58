"""
Univariate polynomials over a FieldSpec.

Covers the characteristic polynomial (Berkowitz, division free), Smith
normal form of polynomial matrices, roots in the base field, squarefree
decomposition and complete factorization over GF(p).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd as math_gcd, lcm
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sympy import divisors

from core.errors import FactorizationLimitError, FieldError, ShapeError

from .field import FieldElement, FieldSpec
from .matrix import Matrix

logger = logging.getLogger(__name__)

DEFAULT_FACTOR_DEGREE_BOUND = 16
DEFAULT_MAX_ENUMERATION_PRIME = 10_000
DEFAULT_MAX_TRIAL_CANDIDATES = 200_000


class Polynomial:
    """Coefficients lowest degree first; the zero polynomial has no coefficients."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldSpec, coeffs: Sequence = ()):
        cs = [field.element(c) for c in coeffs]
        while cs and cs[-1].value == 0:
            cs.pop()
        self.field = field
        self.coeffs: Tuple[FieldElement, ...] = tuple(cs)

    @classmethod
    def zero(cls, field: FieldSpec) -> "Polynomial":
        return cls(field, ())

    @classmethod
    def one(cls, field: FieldSpec) -> "Polynomial":
        return cls(field, (1,))

    @classmethod
    def x(cls, field: FieldSpec) -> "Polynomial":
        return cls(field, (0, 1))

    @classmethod
    def constant(cls, field: FieldSpec, c) -> "Polynomial":
        return cls(field, (c,))

    @classmethod
    def linear(cls, field: FieldSpec, root) -> "Polynomial":
        """x - root."""
        return cls(field, (-field.element(root), 1))

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> FieldElement:
        return self.coeffs[-1] if self.coeffs else self.field.zero

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0].value == 1

    def coefficient(self, k: int) -> FieldElement:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else self.field.zero

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.field != self.field:
                raise FieldError(f"mixed fields {self.field} and {other.field}")
            return other
        return Polynomial(self.field, (other,))

    def __add__(self, other) -> "Polynomial":
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self.field, [self.coefficient(k) + other.coefficient(k) for k in range(n)])

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.field, [-c for c in self.coeffs])

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._lift(other) - self

    def __mul__(self, other) -> "Polynomial":
        other = self._lift(other)
        if self.is_zero() or other.is_zero():
            return Polynomial.zero(self.field)
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.value == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b.value != 0:
                    out[i + j] = out[i + j] + a * b
        return Polynomial(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        result = Polynomial.one(self.field)
        base = self
        while exponent > 0:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __divmod__(self, other) -> Tuple["Polynomial", "Polynomial"]:
        other = self._lift(other)
        if other.is_zero():
            raise FieldError("polynomial division by zero")
        remainder = list(self.coeffs)
        dq = other.degree
        lead_inv = other.leading.inverse()
        quotient = [self.field.zero] * max(len(remainder) - dq, 0)
        for k in range(len(remainder) - 1, dq - 1, -1):
            c = remainder[k]
            if c.value == 0:
                continue
            q = c * lead_inv
            quotient[k - dq] = q
            for t, b in enumerate(other.coeffs):
                remainder[k - dq + t] = remainder[k - dq + t] - q * b
        return Polynomial(self.field, quotient), Polynomial(self.field, remainder[:dq] if dq > 0 else ())

    def __floordiv__(self, other) -> "Polynomial":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "Polynomial":
        return divmod(self, other)[1]

    def divides(self, other: "Polynomial") -> bool:
        return (other % self).is_zero()

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        inv = self.leading.inverse()
        return Polynomial(self.field, [inv * c for c in self.coeffs])

    def derivative(self) -> "Polynomial":
        return Polynomial(self.field, [c * k for k, c in enumerate(self.coeffs)][1:])

    def __call__(self, point) -> FieldElement:
        return self.eval(point)

    def eval(self, point) -> FieldElement:
        point = self.field.element(point)
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * point + c
        return acc

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.field == other.field and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def sort_key(self) -> Tuple:
        """Degree, then coefficients from the top down."""
        return (self.degree, tuple(c.value for c in reversed(self.coeffs)))

    def to_strings(self) -> List[str]:
        return [str(c) for c in self.coeffs]

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c.value == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if k == 0:
                terms.append(str(c))
            elif c.value == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms)

    def __repr__(self) -> str:
        return f"Polynomial[{self.field}]({self})"


def gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Monic gcd; gcd(0, 0) = 0."""
    while not g.is_zero():
        f, g = g, f % g
    return f.monic()


@dataclass
class PolyMatrix:
    """A rows x cols grid of polynomials."""

    field: FieldSpec
    rows: int
    cols: int
    entries: List[List[Polynomial]]

    @classmethod
    def pencil(cls, a: Matrix, b: Matrix) -> "PolyMatrix":
        """x*A - B."""
        if (a.rows, a.cols) != (b.rows, b.cols):
            raise ShapeError("pencil matrices differ in shape")
        f = a.field
        return cls(f, a.rows, a.cols,
                   [[Polynomial(f, (-b[i, j], a[i, j])) for j in range(a.cols)] for i in range(a.rows)])

    @classmethod
    def characteristic(cls, m: Matrix) -> "PolyMatrix":
        """x*I - M."""
        return cls.pencil(Matrix.identity(m.field, m.rows), m)


@dataclass
class Factorization:
    unit: FieldElement
    factors: List[Tuple[Polynomial, int]]

    def expand(self) -> Polynomial:
        field = self.unit.field
        out = Polynomial.constant(field, self.unit)
        for q, e in self.factors:
            out = out * q ** e
        return out

    @property
    def prime_powers(self) -> List[Polynomial]:
        return [q ** e for q, e in self.factors]


def char_poly(m: Matrix) -> Polynomial:
    """det(xI - M) by the Berkowitz recurrence (no divisions)."""
    if not m.is_square:
        raise ShapeError("characteristic polynomial of a non-square matrix")
    field = m.field
    n = m.rows
    if n == 0:
        return Polynomial.one(field)
    e = m.entries
    # coefficient vector, highest degree first
    vec = [field.one, -e[0][0]]
    for r in range(1, n):
        row = e[r][:r]
        column = [e[i][r] for i in range(r)]
        toeplitz = [field.one, -e[r][r]]
        power = column
        for _ in range(r):
            toeplitz.append(-sum((x * y for x, y in zip(row, power)), field.zero))
            power = [sum((e[i][k] * power[k] for k in range(r)), field.zero) for i in range(r)]
        new = []
        for i in range(r + 2):
            acc = field.zero
            for j in range(min(i, r) + 1):
                t = toeplitz[i - j]
                if t.value != 0 and vec[j].value != 0:
                    acc = acc + t * vec[j]
            new.append(acc)
        vec = new
    return Polynomial(field, list(reversed(vec)))


def _height(p: Polynomial) -> int:
    """Bit size of the coefficients; zero over GF(p)."""
    if not p.field.is_rational:
        return 0
    return sum(c.value.numerator.bit_length() + c.value.denominator.bit_length() for c in p.coeffs)


def _primitive(polys: List[Polynomial]) -> List[Polynomial]:
    """Scale rational polynomials by one constant so their coefficients are coprime integers."""
    values = [c.value for p in polys for c in p.coeffs]
    if not values:
        return polys
    denom = lcm(*(v.denominator for v in values))
    content = math_gcd(*(v.numerator * (denom // v.denominator) for v in values))
    factor = Fraction(denom, content)
    if factor == 1:
        return polys
    field = polys[0].field
    scale = field.element(factor)
    return [Polynomial(field, [c * scale for c in p.coeffs]) for p in polys]


def smith_form(pm: PolyMatrix) -> List[Polynomial]:
    """
    Invariant factors d_1 | d_2 | ... | d_r of a polynomial matrix.

    Pivot on a nonzero entry of least degree, smallest coefficients and
    then lowest (row, col) on ties, clear its row and column by division,
    and fold in any entry the pivot does not divide. Over Q every updated
    row and column is rescaled to primitive integer content, which is
    unimodular and keeps the coefficients from growing.

    Returns:
        The r monic invariant factors, r being the rank over F(x).
    """
    field = pm.field
    rational = field.is_rational
    g = [list(r) for r in pm.entries]
    if rational:
        g = [_primitive(r) for r in g]
    rows, cols = pm.rows, pm.cols
    factors = []
    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    p = g[i][j]
                    if p.is_zero():
                        continue
                    key = (p.degree, _height(p))
                    if best is None or key < best[0]:
                        best = (key, i, j)
            if best is None:
                return factors
            _, i, j = best
            g[t], g[i] = g[i], g[t]
            for r in g:
                r[t], r[j] = r[j], r[t]
            pivot = g[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if g[i][t].is_zero():
                    continue
                q, rem = divmod(g[i][t], pivot)
                g[i] = [x - q * y for x, y in zip(g[i], g[t])]
                if rational:
                    g[i] = _primitive(g[i])
                dirty = dirty or not rem.is_zero()
            for j in range(t + 1, cols):
                if g[t][j].is_zero():
                    continue
                q, rem = divmod(g[t][j], pivot)
                for r in g:
                    r[j] = r[j] - q * r[t]
                if rational:
                    for r, entry in zip(g, _primitive([r[j] for r in g])):
                        r[j] = entry
                dirty = dirty or not rem.is_zero()
            if dirty:
                continue
            offender = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                             if not pivot.divides(g[i][j])), None)
            if offender is None:
                break
            g[t] = [x + y for x, y in zip(g[t], g[offender[0]])]
            if rational:
                g[t] = _primitive(g[t])
        factors.append(g[t][t].monic())
    return factors


def roots_in_field(f: Polynomial) -> List[Tuple[FieldElement, int]]:
    """Roots lying in the base field with multiplicities, in ascending order."""
    if f.is_zero():
        raise FieldError("roots of the zero polynomial")
    field = f.field
    if field.is_rational:
        candidates = _rational_root_candidates(f)
    else:
        candidates = list(field.elements())
    roots = []
    for r in candidates:
        if f.eval(r).value != 0:
            continue
        mult = 0
        lin = Polynomial.linear(field, r)
        g = f
        while True:
            q, rem = divmod(g, lin)
            if not rem.is_zero():
                break
            mult += 1
            g = q
        roots.append((r, mult))
    roots.sort(key=lambda item: item[0].sort_key())
    return roots


def _rational_root_candidates(f: Polynomial) -> List[FieldElement]:
    field = f.field
    scale = lcm(*[c.value.denominator for c in f.coeffs])
    ints = [int(c.value * scale) for c in f.coeffs]
    candidates = set()
    low = next(k for k, c in enumerate(ints) if c != 0)
    if low > 0:
        candidates.add(Fraction(0))
    ints = ints[low:]
    if len(ints) > 1:
        for p in divisors(abs(ints[0])):
            for q in divisors(abs(ints[-1])):
                candidates.add(Fraction(p, q))
                candidates.add(Fraction(-p, q))
    return [field.element(c) for c in sorted(candidates)]


def squarefree_decomposition(f: Polynomial) -> List[Tuple[Polynomial, int]]:
    """
    Monic squarefree factors with multiplicities, sorted by multiplicity.

    Over GF(p) the part that is a p-th power is handled by taking p-th roots.
    """
    if f.is_zero():
        raise FieldError("squarefree decomposition of the zero polynomial")
    field = f.field
    p = field.characteristic
    collected: Dict[int, Polynomial] = {}
    g = f.monic()
    scale = 1
    while g.degree > 0:
        derivative = g.derivative()
        if derivative.is_zero():
            g = _pth_root(g)
            scale *= p
            continue
        common = gcd(g, derivative)
        h = g // common
        i = 1
        while h.degree > 0:
            shared = gcd(common, h)
            part = h // shared
            if part.degree > 0:
                key = i * scale
                collected[key] = collected.get(key, Polynomial.one(field)) * part
            common = common // shared
            h = shared
            i += 1
        if common.degree <= 0 or p == 0:
            break
        g = _pth_root(common)
        scale *= p
    return sorted(((q.monic(), e) for e, q in collected.items()), key=lambda item: item[1])


def _pth_root(f: Polynomial) -> Polynomial:
    p = f.field.characteristic
    return Polynomial(f.field, [f.coefficient(k) for k in range(0, f.degree + 1, p)])


def _x_power_mod(exponent: int, modulus: Polynomial) -> Polynomial:
    result = Polynomial.one(modulus.field)
    base = Polynomial.x(modulus.field) % modulus
    while exponent > 0:
        if exponent & 1:
            result = (result * base) % modulus
        base = (base * base) % modulus
        exponent >>= 1
    return result


def _monic_polynomials(field: FieldSpec, degree: int) -> Iterator[Polynomial]:
    p = field.modulus
    for code in range(p ** degree):
        digits = []
        for _ in range(degree):
            code, d = divmod(code, p)
            digits.append(d)
        yield Polynomial(field, digits + [1])


def _distinct_degree_parts(f: Polynomial) -> List[Tuple[int, Polynomial]]:
    """Split a monic squarefree f into products of irreducibles of equal degree."""
    p = f.field.modulus
    x = Polynomial.x(f.field)
    parts = []
    d = 0
    h = x % f if f.degree > 0 else x
    while f.degree > 0:
        d += 1
        if f.degree < 2 * d:
            parts.append((f.degree, f))
            break
        h = _x_power_mod(p, f) if d == 1 else _compose_frobenius(h, f)
        g = gcd(f, h - x)
        if g.degree > 0:
            parts.append((d, g))
            f = f // g
            h = h % f if f.degree > 0 else h
    return parts


def _compose_frobenius(h: Polynomial, f: Polynomial) -> Polynomial:
    """h(x)^p mod f, i.e. x^(p^(d+1)) from x^(p^d)."""
    p = f.field.modulus
    result = Polynomial.one(f.field)
    base = h % f
    exponent = p
    while exponent > 0:
        if exponent & 1:
            result = (result * base) % f
        base = (base * base) % f
        exponent >>= 1
    return result


def _split_equal_degree(g: Polynomial, d: int, max_candidates: int) -> List[Polynomial]:
    """Trial division of a product of degree-d irreducibles by enumerated monic candidates."""
    if g.degree == d:
        return [g]
    field = g.field
    if field.modulus ** d > max_candidates:
        raise FactorizationLimitError(
            f"splitting degree-{d} factors over {field} needs {field.modulus ** d} candidates; "
            f"raise polynomials.max_trial_candidates")
    found = []
    for candidate in _monic_polynomials(field, d):
        if g.degree == 0:
            break
        q, rem = divmod(g, candidate)
        if rem.is_zero():
            found.append(candidate)
            g = q
    if g.degree > 0:
        found.append(g.monic())
    return found


def factor_gfp(f: Polynomial,
               degree_bound: int = DEFAULT_FACTOR_DEGREE_BOUND,
               max_prime: int = DEFAULT_MAX_ENUMERATION_PRIME,
               max_candidates: int = DEFAULT_MAX_TRIAL_CANDIDATES) -> Factorization:
    """
    Complete factorization over GF(p) into monic irreducibles.

    Args:
        f: Nonzero polynomial over a prime field
        degree_bound: Largest degree accepted
        max_prime: Largest characteristic accepted
        max_candidates: Largest number of trial divisors per degree

    Returns:
        Factorization with factors sorted by degree and coefficients
    """
    field = f.field
    if field.is_rational:
        raise FieldError("factor_gfp needs a prime field")
    if f.is_zero():
        raise FieldError("factorization of the zero polynomial")
    if f.degree > degree_bound:
        raise FactorizationLimitError(
            f"degree {f.degree} exceeds the factorization bound {degree_bound}; "
            f"raise polynomials.factor_degree_bound")
    if field.modulus > max_prime:
        raise FactorizationLimitError(
            f"characteristic {field.modulus} exceeds {max_prime}; raise polynomials.max_enumeration_prime")
    factors: Dict[Polynomial, int] = {}
    for part, multiplicity in squarefree_decomposition(f):
        for d, product in _distinct_degree_parts(part):
            for q in _split_equal_degree(product, d, max_candidates):
                factors[q] = factors.get(q, 0) + multiplicity
    ordered = sorted(factors.items(), key=lambda item: item[0].sort_key())
    logger.debug(f"factored {f} over {field} into {len(ordered)} irreducible factors")
    return Factorization(f.leading, ordered)


def companion_matrix(f: Polynomial) -> Matrix:
    """Frobenius block of a monic f: ones below the diagonal, -coefficients in the last column."""
    f = f.monic()
    n = f.degree
    field = f.field
    c = Matrix.zeros(field, n)
    for r in range(n):
        if r + 1 < n:
            c.entries[r + 1][r] = field.one
        c.entries[r][n - 1] = -f.coefficient(r)
    return c
