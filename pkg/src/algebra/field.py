"""
Exact scalar fields: the rationals and prime fields GF(p) with p odd.

Rationals are carried as fractions.Fraction, prime field elements as
reduced integer residues in [0, p).
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Tuple, Union

from sympy import isprime

from core.errors import FieldError

Number = Union[int, Fraction]

_GF_PATTERN = re.compile(r"^\s*(?:GF|F)\s*\(?\s*(\d+)\s*\)?\s*$", re.IGNORECASE)
_RATIONAL_NAMES = ("Q", "QQ", "RATIONAL", "RATIONALS")


@dataclass(frozen=True)
class FieldSpec:
    """Either the rationals (modulus None) or GF(modulus)."""

    modulus: Optional[int] = None

    def __post_init__(self):
        p = self.modulus
        if p is None:
            return
        if not isinstance(p, int) or p < 3 or not isprime(p):
            raise FieldError(f"modulus must be an odd prime, got {p!r}")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(None)

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls(p)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Parse 'Q' or 'GF(p)'."""
        if text is None:
            raise FieldError("field name missing")
        if text.strip().upper() in _RATIONAL_NAMES:
            return cls.rationals()
        match = _GF_PATTERN.match(text)
        if not match:
            raise FieldError(f"unknown field '{text}'")
        return cls.prime(int(match.group(1)))

    @property
    def is_rational(self) -> bool:
        return self.modulus is None

    @property
    def characteristic(self) -> int:
        return 0 if self.modulus is None else self.modulus

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def __call__(self, value: Union[Number, str, "FieldElement"]) -> "FieldElement":
        return self.element(value)

    def element(self, value: Union[Number, str, "FieldElement"]) -> "FieldElement":
        """Coerce an int, Fraction, decimal string or element into this field."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldError(f"element of {value.field} used in {self}")
            return value
        if isinstance(value, str):
            return self.parse_scalar(value)
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            raise FieldError(f"cannot coerce {value!r} into {self}")
        return FieldElement(self, value)

    def parse_scalar(self, text: str) -> "FieldElement":
        """Parse '3', '-7', '2/5' (fractions reduce mod p over GF(p))."""
        try:
            value = Fraction(text.strip())
        except (ValueError, ZeroDivisionError, AttributeError) as e:
            raise FieldError(f"invalid scalar '{text}': {e}")
        if value.denominator != 1 and "." in text:
            raise FieldError(f"invalid scalar '{text}': decimals are not exact input")
        return FieldElement(self, value)

    def elements(self) -> Iterator["FieldElement"]:
        """All elements of GF(p) in residue order."""
        if self.is_rational:
            raise FieldError("the rationals are not enumerable")
        for residue in range(self.modulus):
            yield FieldElement(self, residue)

    def __str__(self) -> str:
        return "Q" if self.modulus is None else f"GF({self.modulus})"


class FieldElement:
    """An immutable element of a FieldSpec."""

    __slots__ = ("field", "value")

    def __init__(self, field: FieldSpec, value: Number):
        p = field.modulus
        if p is None:
            value = Fraction(value)
        elif isinstance(value, Fraction):
            if value.denominator % p == 0:
                raise FieldError(f"denominator of {value} vanishes in {field}")
            value = value.numerator * pow(value.denominator, -1, p) % p
        else:
            value = value % p
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError(f"mixed fields {self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return FieldElement(self.field, other)
        return NotImplemented

    def _make(self, value: Number) -> "FieldElement":
        return FieldElement(self.field, value)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._make(self.value + other.value)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._make(self.value - other.value)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._make(other.value - self.value)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._make(self.value * other.value)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __neg__(self) -> "FieldElement":
        return self._make(-self.value)

    def __pow__(self, exponent: int) -> "FieldElement":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        p = self.field.modulus
        if p is None:
            return self._make(self.value ** exponent)
        return self._make(pow(self.value, exponent, p))

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise FieldError(f"division by zero in {self.field}")
        p = self.field.modulus
        if p is None:
            return self._make(1 / self.value)
        return self._make(pow(self.value, -1, p))

    def is_zero(self) -> bool:
        return self.value == 0

    def is_one(self) -> bool:
        return self.value == 1

    def __bool__(self) -> bool:
        return self.value != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self == FieldElement(self.field, other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.modulus, self.value))

    def sort_key(self) -> Tuple:
        """Numeric order over Q, residue order over GF(p)."""
        return (self.value,)

    def __lt__(self, other: "FieldElement") -> bool:
        other = self._coerce(other)
        return self.value < other.value

    def __str__(self) -> str:
        return str(self.value)

    def __repr__(self) -> str:
        return f"{self.field}({self.value})"


def add(x: FieldElement, y: FieldElement) -> FieldElement:
    return x + y


def sub(x: FieldElement, y: FieldElement) -> FieldElement:
    return x - y


def mul(x: FieldElement, y: FieldElement) -> FieldElement:
    return x * y


def div(x: FieldElement, y: FieldElement) -> FieldElement:
    return x / y


def neg(x: FieldElement) -> FieldElement:
    return -x


def inv(x: FieldElement) -> FieldElement:
    return x.inverse()


def is_zero(x: FieldElement) -> bool:
    return x.is_zero()
