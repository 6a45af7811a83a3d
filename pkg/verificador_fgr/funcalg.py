"""
Álgebra simbólica de funções da variável x.

Os integrandos são combinações de monômios
x^i · sech^k · tanh^t · (log∘sech)^l · T^m · (T')^n · [cos|sin]
com coeficientes exatos. O produto normaliza tanh² = 1 − sech², de modo
que todo monômio normalizado tem tanh com expoente 0 ou 1.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

import numpy as np

from .basisreduce import BasisCombo, BasisIntegral, Family
from .errors import TrigClash, Unclassifiable
from .exactfield import FieldElem, QSqrt2, inv_sqrt2, log2, sqrt2, to_float

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


class Trig(Enum):
    NONE = "none"
    COS = "cos"
    SIN = "sin"


class Parity(Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class Monomial:
    """
    Product of elementary factors.

    Attributes
    ----------
    sech_pow, tanh_pow, x_pow, logsech_pow, T_pow, Tprime_pow : int
        Non-negative exponents.
    trig : Trig
        Oscillating factor, at most one.
    """
    sech_pow: int = 0
    tanh_pow: int = 0
    x_pow: int = 0
    logsech_pow: int = 0
    T_pow: int = 0
    Tprime_pow: int = 0
    trig: Trig = Trig.NONE

    def __post_init__(self):
        for name in ("sech_pow", "tanh_pow", "x_pow", "logsech_pow", "T_pow", "Tprime_pow"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not isinstance(other, Monomial):
            return NotImplemented
        if self.trig is not Trig.NONE and other.trig is not Trig.NONE:
            raise TrigClash(self.render(), other.render())
        return Monomial(
            sech_pow=self.sech_pow + other.sech_pow,
            tanh_pow=self.tanh_pow + other.tanh_pow,
            x_pow=self.x_pow + other.x_pow,
            logsech_pow=self.logsech_pow + other.logsech_pow,
            T_pow=self.T_pow + other.T_pow,
            Tprime_pow=self.Tprime_pow + other.Tprime_pow,
            trig=self.trig if self.trig is not Trig.NONE else other.trig,
        )

    def sort_key(self) -> Tuple:
        return (self.trig.value, self.T_pow, self.Tprime_pow, self.x_pow,
                self.logsech_pow, self.tanh_pow, self.sech_pow)

    def is_unit(self) -> bool:
        return self == Monomial()

    def needs_T(self) -> bool:
        return self.T_pow > 0 or self.Tprime_pow > 0

    def render(self) -> str:
        factors = []
        for symbol, power in (("x", self.x_pow), ("sech", self.sech_pow), ("tanh", self.tanh_pow),
                              ("log∘sech", self.logsech_pow), ("T", self.T_pow), ("T′", self.Tprime_pow)):
            if power == 1:
                factors.append(symbol)
            elif power > 1:
                factors.append(f"{symbol}^{power}")
        if self.trig is not Trig.NONE:
            factors.append(self.trig.value)
        return "·".join(factors) if factors else "1"

    def __str__(self) -> str:
        return self.render()

    def evaluate(self, x: np.ndarray, T: Optional[np.ndarray] = None,
                 Tp: Optional[np.ndarray] = None) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        val = np.ones_like(x)
        if self.sech_pow:
            val = val * sech_values(x) ** self.sech_pow
        if self.tanh_pow:
            val = val * np.tanh(x) ** self.tanh_pow
        if self.x_pow:
            val = val * x ** self.x_pow
        if self.logsech_pow:
            val = val * log_sech_values(x) ** self.logsech_pow
        if self.T_pow:
            if T is None:
                raise ValueError(f"{self.render()} needs values of T")
            val = val * np.asarray(T) ** self.T_pow
        if self.Tprime_pow:
            if Tp is None:
                raise ValueError(f"{self.render()} needs values of T′")
            val = val * np.asarray(Tp) ** self.Tprime_pow
        if self.trig is Trig.COS:
            val = val * np.cos(x)
        elif self.trig is Trig.SIN:
            val = val * np.sin(x)
        return val


def sech_values(x: np.ndarray) -> np.ndarray:
    """sech without overflow for large |x|."""
    e = np.exp(-np.abs(x))
    return 2.0 * e / (1.0 + e * e)


def log_sech_values(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    return -ax + LN2 - np.log1p(np.exp(-2.0 * ax))


Scalar = Union[int, Fraction, QSqrt2, FieldElem]


class FuncExpr:
    """Finite sum of monomials with FieldElem coefficients."""

    __slots__ = ("_terms", "_key")

    def __init__(self, terms: Union[Mapping[Monomial, Scalar], Iterable[Tuple[Monomial, Scalar]]] = ()) -> None:
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: Dict[Monomial, FieldElem] = {}
        for m, c in items:
            merged[m] = merged.get(m, FieldElem()) + FieldElem.coerce(c)
        ordered = sorted(merged.items(), key=lambda kv: kv[0].sort_key())
        self._terms: Dict[Monomial, FieldElem] = {m: c for m, c in ordered if not c.is_zero()}
        self._key = tuple(self._terms.items())

    @classmethod
    def constant(cls, c: Scalar) -> "FuncExpr":
        return cls([(Monomial(), c)])

    @classmethod
    def zero(cls) -> "FuncExpr":
        return cls()

    def items(self) -> Iterator[Tuple[Monomial, FieldElem]]:
        return iter(self._terms.items())

    def monomials(self) -> List[Monomial]:
        return list(self._terms)

    def coefficient(self, m: Monomial) -> FieldElem:
        return self._terms.get(m, FieldElem())

    def is_zero(self) -> bool:
        return not self._terms

    def is_normalized(self) -> bool:
        return all(m.tanh_pow <= 1 for m in self._terms)

    def needs_T(self) -> bool:
        return any(m.needs_T() for m in self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FuncExpr):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    @staticmethod
    def _lift(other) -> Optional["FuncExpr"]:
        if isinstance(other, FuncExpr):
            return other
        if isinstance(other, (int, Fraction, QSqrt2, FieldElem)):
            return FuncExpr.constant(other)
        return None

    def __add__(self, other) -> "FuncExpr":
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return FuncExpr(list(self._terms.items()) + list(other.items()))

    def __radd__(self, other) -> "FuncExpr":
        return self + other

    def __neg__(self) -> "FuncExpr":
        return FuncExpr([(m, -c) for m, c in self._terms.items()])

    def __sub__(self, other) -> "FuncExpr":
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "FuncExpr":
        return (-self) + other

    def __mul__(self, other) -> "FuncExpr":
        if isinstance(other, FuncExpr):
            return mul(self, other)
        if isinstance(other, (int, Fraction, QSqrt2, FieldElem)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other) -> "FuncExpr":
        return self * other

    def scale(self, c: Scalar) -> "FuncExpr":
        c = FieldElem.coerce(c)
        return FuncExpr([(m, v * c) for m, v in self._terms.items()])

    def filter(self, predicate: Callable[[Monomial], bool]) -> "FuncExpr":
        return FuncExpr([(m, c) for m, c in self._terms.items() if predicate(m)])

    def without_null_direction(self) -> "FuncExpr":
        """Drop the pure c·sech term, orthogonal to the resonance h31."""
        null = Monomial(sech_pow=1)
        if null in self._terms:
            logger.debug("dropping null direction term %s·sech", self._terms[null])
        return self.filter(lambda m: m != null)

    def render(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, c in self._terms.items():
            coeff = c.to_str()
            if m.is_unit():
                parts.append(coeff)
            elif c == 1:
                parts.append(m.render())
            else:
                parts.append(f"({coeff})·{m.render()}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"FuncExpr({self.render()!r})"

    def evaluate(self, x: np.ndarray, T: Optional[np.ndarray] = None,
                 Tp: Optional[np.ndarray] = None) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        for m, c in self._terms.items():
            total = total + to_float(c) * m.evaluate(x, T, Tp)
        return total


def _expand_tanh(m: Monomial) -> List[Tuple[Monomial, int]]:
    # tanh^(2h+r) = tanh^r (1 - sech^2)^h
    half, rest = divmod(m.tanh_pow, 2)
    return [(replace(m, tanh_pow=rest, sech_pow=m.sech_pow + 2 * j), (-1) ** j * math.comb(half, j))
            for j in range(half + 1)]


def normalize(e: FuncExpr) -> FuncExpr:
    out = []
    for m, c in e.items():
        for m2, factor in _expand_tanh(m):
            out.append((m2, c * factor))
    return FuncExpr(out)


def mul(e1: FuncExpr, e2: FuncExpr) -> FuncExpr:
    """Distributed and normalized product."""
    out = []
    for m1, c1 in e1.items():
        for m2, c2 in e2.items():
            out.append((m1 * m2, c1 * c2))
    return normalize(FuncExpr(out))


def parity(m: Monomial) -> Parity:
    # sech, log∘sech, T and cos are even; the other factors are odd
    odd = m.tanh_pow + m.x_pow + m.Tprime_pow + (1 if m.trig is Trig.SIN else 0)
    return Parity.ODD if odd % 2 else Parity.EVEN


# (tanh, x, log∘sech, T, T', trig) of each family integrand, sech^k aside
FAMILY_SIGNATURES: Dict[Family, Tuple[int, int, int, int, int, Trig]] = {
    Family.P: (0, 0, 0, 0, 0, Trig.COS),
    Family.Q: (0, 0, 1, 0, 0, Trig.COS),
    Family.R: (0, 0, 0, 1, 0, Trig.COS),
    Family.S: (1, 0, 0, 1, 0, Trig.SIN),
    Family.A: (1, 1, 0, 0, 0, Trig.COS),
    Family.B: (1, 0, 0, 0, 0, Trig.SIN),
    Family.C: (1, 0, 1, 0, 0, Trig.SIN),
    Family.D: (0, 1, 0, 0, 0, Trig.SIN),
    Family.E: (1, 0, 0, 0, 1, Trig.COS),
    Family.F: (0, 0, 0, 0, 1, Trig.SIN),
}
_BY_SIGNATURE = {sig: fam for fam, sig in FAMILY_SIGNATURES.items()}


def _signature(m: Monomial) -> Tuple[int, int, int, int, int, Trig]:
    return (m.tanh_pow, m.x_pow, m.logsech_pow, m.T_pow, m.Tprime_pow, m.trig)


def classify(m: Monomial) -> BasisIntegral:
    family = _BY_SIGNATURE.get(_signature(m))
    if family is None or m.sech_pow < 1:
        raise Unclassifiable(m, m.render())
    return BasisIntegral(family, m.sech_pow)


def basis_integrand(b: BasisIntegral) -> Monomial:
    tanh, x, logsech, t, tp, trig = FAMILY_SIGNATURES[b.family]
    return Monomial(sech_pow=b.k, tanh_pow=tanh, x_pow=x, logsech_pow=logsech,
                    T_pow=t, Tprime_pow=tp, trig=trig)


def inner_product(f: FuncExpr, g: FuncExpr) -> BasisCombo:
    """∫ f·g over the line, as a combination of basis integrals; odd terms vanish."""
    out = []
    for m, c in mul(f, g).items():
        if parity(m) is Parity.ODD:
            logger.debug("odd term %s·%s integrates to zero", c, m.render())
            continue
        out.append((classify(m), c))
    return BasisCombo(out)


# elementary functions

def _term(c: Scalar = 1, **powers) -> FuncExpr:
    return FuncExpr([(Monomial(**powers), c)])


def one() -> FuncExpr:
    return FuncExpr.constant(1)


def sech(k: int = 1) -> FuncExpr:
    return _term(sech_pow=k)


def tanh() -> FuncExpr:
    return _term(tanh_pow=1)


def x() -> FuncExpr:
    return _term(x_pow=1)


def log_sech() -> FuncExpr:
    return _term(logsech_pow=1)


def T() -> FuncExpr:
    return _term(T_pow=1)


def T_prime() -> FuncExpr:
    return _term(Tprime_pow=1)


def cos() -> FuncExpr:
    return _term(trig=Trig.COS)


def sin() -> FuncExpr:
    return _term(trig=Trig.SIN)


# profiles of the cubic problem

@lru_cache(maxsize=None)
def phi3() -> FuncExpr:
    return sech() * sqrt2()


@lru_cache(maxsize=None)
def phi3_prime() -> FuncExpr:
    return -(sech() * tanh()) * sqrt2()


@lru_cache(maxsize=None)
def phi3_log_derivative() -> FuncExpr:
    """φ3'/φ3."""
    return -tanh()


@lru_cache(maxsize=None)
def log_phi3() -> FuncExpr:
    return log_sech() + log2() * Fraction(1, 2)


@lru_cache(maxsize=None)
def xi31() -> FuncExpr:
    return 1 - phi3() * phi3()


@lru_cache(maxsize=None)
def xi32() -> FuncExpr:
    return one()


@lru_cache(maxsize=None)
def h31_cos() -> FuncExpr:
    return phi3() * phi3() * cos() * Fraction(1, 2)


@lru_cache(maxsize=None)
def h31_sin() -> FuncExpr:
    return phi3_log_derivative() * sin()


@lru_cache(maxsize=None)
def h31() -> FuncExpr:
    return h31_cos() + h31_sin()


@lru_cache(maxsize=None)
def h32() -> FuncExpr:
    return phi3_log_derivative() * sin()


@lru_cache(maxsize=None)
def R1() -> FuncExpr:
    phi = phi3()
    return (-(x() * phi * phi3_prime())
            - (3 - phi * phi) * T() * (inv_sqrt2() * Fraction(1, 4))
            - phi3_log_derivative() * T_prime() * (inv_sqrt2() * Fraction(1, 2)))


@lru_cache(maxsize=None)
def R2() -> FuncExpr:
    phi = phi3()
    return (phi * phi * Fraction(1, 2)
            + T() * (inv_sqrt2() * Fraction(3, 4))
            + phi3_log_derivative() * T_prime() * (inv_sqrt2() * Fraction(1, 2)))


@lru_cache(maxsize=None)
def E() -> FuncExpr:
    phi = phi3()
    return (phi * (Fraction(1, 4) - log_phi3())) * Fraction(1, 2) + x() * phi3_prime() * Fraction(1, 2)


@lru_cache(maxsize=None)
def F() -> FuncExpr:
    return E() + phi3() * log_phi3()


@lru_cache(maxsize=None)
def G32_factor() -> FuncExpr:
    """Weight multiplying G32 in the third term: 6x·tanh·sech² − (7/2)·sech²."""
    return x() * tanh() * sech(2) * 6 - sech(2) * Fraction(7, 2)


@lru_cache(maxsize=None)
def G32() -> FuncExpr:
    return phi3() * xi31() * xi32() * 2


@lru_cache(maxsize=None)
def delta1() -> FuncExpr:
    phi, xi1, xi2 = phi3(), xi31(), xi32()
    return (F() * (xi1 * xi1 * 3 - xi2 * xi2)
            + phi * xi1 * xi1
            + phi * xi1 * R1() * 6
            - phi * xi2 * R2() * 2)


@lru_cache(maxsize=None)
def delta2() -> FuncExpr:
    phi, xi1, xi2 = phi3(), xi31(), xi32()
    return F() * xi1 * xi2 + phi * R1() * xi2 + phi * xi1 * R2()
