"""
Aritmética exata no anel Q(√2)[L], com L = log 2.

Um FieldElem é um polinômio em L cujos coeficientes são números
a + b√2 com a, b racionais. Todos os coeficientes da constante de Fermi
vivem no grau 1 em L; graus maiores são aceitos pela álgebra, mas a
pipeline os trata como anomalia.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, Mapping, Optional, Tuple, Union

import mpmath

from .constants import Constants

RationalLike = Union[int, Fraction, str]


def _rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not an exact rational: {value!r}")


class QSqrt2:
    """Element a + b*sqrt2 of the quadratic field Q(sqrt2)."""

    __slots__ = ("_a", "_b")

    def __init__(self, a: RationalLike = 0, b: RationalLike = 0) -> None:
        self._a = _rational(a)
        self._b = _rational(b)

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @classmethod
    def coerce(cls, value: Union[RationalLike, "QSqrt2"]) -> "QSqrt2":
        if isinstance(value, QSqrt2):
            return value
        return cls(value, 0)

    def __repr__(self) -> str:
        return f"QSqrt2({self._a}, {self._b})"

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = QSqrt2(other)
        if not isinstance(other, QSqrt2):
            return NotImplemented
        return self._a == other.a and self._b == other.b

    def __hash__(self) -> int:
        return hash((self._a, self._b))

    def __add__(self, other: Union[RationalLike, "QSqrt2"]) -> "QSqrt2":
        if isinstance(other, (int, Fraction, QSqrt2)):
            other = QSqrt2.coerce(other)
            return QSqrt2(self._a + other.a, self._b + other.b)
        return NotImplemented

    def __radd__(self, other):
        return self + other

    def __neg__(self) -> "QSqrt2":
        return QSqrt2(-self._a, -self._b)

    def __sub__(self, other):
        return self + (-QSqrt2.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other: Union[RationalLike, "QSqrt2"]) -> "QSqrt2":
        if isinstance(other, (int, Fraction, QSqrt2)):
            other = QSqrt2.coerce(other)
            return QSqrt2(self._a * other.a + 2 * self._b * other.b,
                          self._a * other.b + self._b * other.a)
        return NotImplemented

    def __rmul__(self, other):
        return self * other

    @property
    def norm(self) -> Fraction:
        return self._a * self._a - 2 * self._b * self._b

    def conjugate(self) -> "QSqrt2":
        return QSqrt2(self._a, -self._b)

    def inverse(self) -> "QSqrt2":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(sqrt2)")
        # a^2 - 2b^2 vanishes only at zero since sqrt2 is irrational
        n = self.norm
        return QSqrt2(self._a / n, -self._b / n)


class FieldElem:
    """
    Polynomial in L = log 2 with coefficients in Q(sqrt2).

    Instances are immutable and always canonical: zero coefficients are
    dropped and degrees are kept sorted, so structural equality is
    mathematical equality.

    Parameters
    ----------
    coeffs : Mapping[int, QSqrt2 | int | Fraction]
        Coefficient of each power of L.
    """

    __slots__ = ("_coeffs", "_key")

    def __init__(self, coeffs: Optional[Mapping[int, Union[QSqrt2, RationalLike]]] = None) -> None:
        clean: Dict[int, QSqrt2] = {}
        for deg, c in (coeffs or {}).items():
            deg = int(deg)
            if deg < 0:
                raise ValueError(f"negative log2 degree: {deg}")
            c = QSqrt2.coerce(c)
            if not c.is_zero():
                clean[deg] = c
        self._coeffs: Dict[int, QSqrt2] = dict(sorted(clean.items()))
        self._key: Tuple = tuple((d, c.a, c.b) for d, c in self._coeffs.items())

    # construction

    @classmethod
    def coerce(cls, value: Union["FieldElem", QSqrt2, RationalLike]) -> "FieldElem":
        if isinstance(value, FieldElem):
            return value
        if isinstance(value, str):
            value = _rational(value)
        return cls({0: QSqrt2.coerce(value)})

    @classmethod
    def from_parts(cls, *parts: Tuple[int, RationalLike, RationalLike]) -> "FieldElem":
        """Build from (log2 degree, rational part, sqrt2 part) triples."""
        out = FieldElem()
        for deg, a, b in parts:
            out = out + FieldElem({deg: QSqrt2(a, b)})
        return out

    def normalize(self) -> "FieldElem":
        return FieldElem(self._coeffs)

    # inspection

    def items(self) -> Iterator[Tuple[int, QSqrt2]]:
        return iter(self._coeffs.items())

    def coefficient(self, degree: int) -> QSqrt2:
        return self._coeffs.get(degree, QSqrt2())

    def is_zero(self) -> bool:
        return not self._coeffs

    def l_degree(self) -> int:
        """Highest power of log2, -1 for zero."""
        return max(self._coeffs) if self._coeffs else -1

    def is_monomial(self) -> bool:
        """True when exactly one rational multiplies one symbol product."""
        count = sum((c.a != 0) + (c.b != 0) for c in self._coeffs.values())
        return count == 1

    # ring operations

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, QSqrt2)):
            other = FieldElem.coerce(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other):
        if not isinstance(other, (int, Fraction, QSqrt2, FieldElem)):
            return NotImplemented
        other = FieldElem.coerce(other)
        out = dict(self._coeffs)
        for deg, c in other.items():
            out[deg] = out.get(deg, QSqrt2()) + c
        return FieldElem(out)

    def __radd__(self, other):
        return self + other

    def __neg__(self) -> "FieldElem":
        return FieldElem({d: -c for d, c in self._coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, (int, Fraction, QSqrt2, FieldElem)):
            return NotImplemented
        return self + (-FieldElem.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, (int, Fraction, QSqrt2, FieldElem)):
            return NotImplemented
        other = FieldElem.coerce(other)
        out: Dict[int, QSqrt2] = {}
        for d1, c1 in self._coeffs.items():
            for d2, c2 in other.items():
                out[d1 + d2] = out.get(d1 + d2, QSqrt2()) + c1 * c2
        return FieldElem(out)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, exponent: int) -> "FieldElem":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        out, base = one(), self
        while exponent:
            if exponent & 1:
                out = out * base
            base = base * base
            exponent >>= 1
        return out

    def inverse(self) -> "FieldElem":
        """Inverse of a nonzero element of log2-degree 0."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.l_degree() > 0:
            raise ValueError(f"{self} involves log2 and has no inverse in Q(sqrt2)[L]")
        return FieldElem({0: self._coeffs[0].inverse()})

    def __truediv__(self, other):
        if not isinstance(other, (int, Fraction, QSqrt2, FieldElem)):
            return NotImplemented
        return self * FieldElem.coerce(other).inverse()

    def __rtruediv__(self, other):
        return FieldElem.coerce(other) * self.inverse()

    # rendering

    def __repr__(self) -> str:
        return f"FieldElem({self.to_str()!r})"

    def __str__(self) -> str:
        return self.to_str()

    def to_str(self) -> str:
        """Render as e.g. ``-13*log2 - 71`` with the highest log2 power first."""
        if self.is_zero():
            return "0"
        parts = []
        for deg in sorted(self._coeffs, reverse=True):
            c = self._coeffs[deg]
            for value, root in ((c.a, False), (c.b, True)):
                if value != 0:
                    parts.append((value < 0, _symbol_text(abs(value), root, deg)))
        negative, text = parts[0]
        out = ("-" if negative else "") + text
        for negative, text in parts[1:]:
            out += (" - " if negative else " + ") + text
        return out

    def to_json(self) -> dict:
        return {"terms": [{"Ldeg": d, "a": str(c.a), "b": str(c.b)}
                          for d, c in self._coeffs.items()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "FieldElem":
        try:
            terms = data["terms"]
            return cls({int(t["Ldeg"]): QSqrt2(t["a"], t["b"]) for t in terms})
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed field element: {data!r}") from exc


def _symbol_text(magnitude: Fraction, root: bool, deg: int) -> str:
    symbols = []
    if root:
        symbols.append("sqrt2")
    if deg == 1:
        symbols.append("log2")
    elif deg > 1:
        symbols.append(f"log2^{deg}")
    if not symbols:
        return str(magnitude)
    if magnitude == 1:
        return "*".join(symbols)
    return f"{magnitude}*" + "*".join(symbols)


# module level operations

def from_rational(q: RationalLike) -> FieldElem:
    return FieldElem.coerce(_rational(q))


def zero() -> FieldElem:
    return FieldElem()


def one() -> FieldElem:
    return FieldElem({0: QSqrt2(1)})


def sqrt2() -> FieldElem:
    return FieldElem({0: QSqrt2(0, 1)})


def log2() -> FieldElem:
    return FieldElem({1: QSqrt2(1)})


def inv_sqrt2() -> FieldElem:
    """1/sqrt2 = sqrt2/2."""
    return FieldElem({0: QSqrt2(0, Fraction(1, 2))})


def add(x: FieldElem, y: FieldElem) -> FieldElem:
    return x + y


def neg(x: FieldElem) -> FieldElem:
    return -x


def mul(x: FieldElem, y: FieldElem) -> FieldElem:
    return x * y


def is_zero(x: FieldElem) -> bool:
    return x.is_zero()


def eq(x: FieldElem, y: FieldElem) -> bool:
    return x == y


def _mpf(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


@lru_cache(maxsize=4096)
def _to_float_cached(x: FieldElem, precision: int):
    with mpmath.workprec(precision + 32):
        root2 = mpmath.sqrt(2)
        ln2 = mpmath.log(2)
        total = mpmath.mpf(0)
        for deg, c in x.items():
            total += (_mpf(c.a) + _mpf(c.b) * root2) * ln2 ** deg
    if precision <= Constants.DEFAULT_PRECISION:
        return float(total)
    with mpmath.workprec(precision):
        return +total


def to_float(x: FieldElem, precision: int = Constants.DEFAULT_PRECISION):
    """
    Numeric value of ``x``.

    The sum is formed with 32 guard bits and rounded once, so for the
    default precision the result is within one ulp of the true value.
    Precisions above 53 bits return an ``mpmath.mpf``.
    """
    if precision < 2:
        raise ValueError(f"precision must be at least 2 bits, got {precision}")
    return _to_float_cached(FieldElem.coerce(x), int(precision))
