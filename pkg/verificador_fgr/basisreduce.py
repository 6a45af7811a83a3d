"""
Integrais de base e as regras de redução.

As dez famílias p, q, r, s, a, b, c, d, e, f indexam integrais
∫ sech^k(x)·(...)·cos|sin(x) dx. As cinco últimas são eliminadas pelas
identidades de integração por partes; as cinco primeiras são reduzidas
por recorrência até os índices 1 (ímpares) ou 2 (pares).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from .constants import Constants
from .exactfield import FieldElem, QSqrt2, sqrt2

logger = logging.getLogger(__name__)


class Family(Enum):
    P = "p"
    Q = "q"
    R = "r"
    S = "s"
    A = "a"
    B = "b"
    C = "c"
    D = "d"
    E = "e"
    F = "f"

    @property
    def is_derived(self) -> bool:
        return self.value in Constants.DERIVED_FAMILIES

    @classmethod
    def from_letter(cls, letter: str) -> "Family":
        return cls(letter)


@dataclass(frozen=True)
class BasisIntegral:
    family: Family
    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"basis index must be a positive integer, got {self.k!r}")

    def sort_key(self, order: Sequence[str] = Constants.FAMILY_ORDER) -> Tuple[int, int]:
        return (order.index(self.family.value), self.k)

    def __lt__(self, other: "BasisIntegral") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"{self.family.value}{self.k}"

    @classmethod
    def parse(cls, name: str) -> "BasisIntegral":
        """Parse a bare name such as ``p3``."""
        name = name.strip()
        if len(name) < 2 or not name[1:].isdigit():
            raise ValueError(f"not a basis integral name: {name!r}")
        return cls(Family.from_letter(name[0]), int(name[1:]))


def basis(family: Union[Family, str], k: int) -> BasisIntegral:
    if isinstance(family, str):
        family = Family.from_letter(family)
    return BasisIntegral(family, k)


Scalar = Union[int, Fraction, QSqrt2, FieldElem]


class BasisCombo:
    """
    Finite linear combination of basis integrals with exact coefficients.

    Canonical on construction: like terms are merged, zero coefficients
    dropped, and terms ordered p < q < r < s < a < b < ... then by index.
    """

    __slots__ = ("_terms", "_key")

    def __init__(self, terms: Union[Mapping[BasisIntegral, Scalar], Iterable[Tuple[BasisIntegral, Scalar]]] = ()) -> None:
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: Dict[BasisIntegral, FieldElem] = {}
        for b, coeff in items:
            merged[b] = merged.get(b, FieldElem()) + FieldElem.coerce(coeff)
        ordered = sorted(merged.items(), key=lambda kv: kv[0].sort_key())
        self._terms: Dict[BasisIntegral, FieldElem] = {b: c for b, c in ordered if not c.is_zero()}
        self._key = tuple(self._terms.items())

    @classmethod
    def single(cls, b: BasisIntegral, coeff: Scalar = 1) -> "BasisCombo":
        return cls([(b, coeff)])

    @classmethod
    def of(cls, *triples: Tuple[str, int, Scalar]) -> "BasisCombo":
        """Shorthand: ``BasisCombo.of(("p", 3, 2), ("p", 1, -1))``."""
        return cls([(basis(f, k), c) for f, k, c in triples])

    def items(self) -> Iterator[Tuple[BasisIntegral, FieldElem]]:
        return iter(self._terms.items())

    def bases(self) -> List[BasisIntegral]:
        return list(self._terms)

    def coefficient(self, b: BasisIntegral) -> FieldElem:
        return self._terms.get(b, FieldElem())

    def is_empty(self) -> bool:
        return not self._terms

    def max_l_degree(self) -> int:
        return max((c.l_degree() for c in self._terms.values()), default=-1)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[BasisIntegral]:
        return iter(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BasisCombo):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __add__(self, other: "BasisCombo") -> "BasisCombo":
        if not isinstance(other, BasisCombo):
            return NotImplemented
        return BasisCombo(list(self._terms.items()) + list(other.items()))

    def __neg__(self) -> "BasisCombo":
        return BasisCombo([(b, -c) for b, c in self._terms.items()])

    def __sub__(self, other: "BasisCombo") -> "BasisCombo":
        if not isinstance(other, BasisCombo):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar: Scalar) -> "BasisCombo":
        if not isinstance(scalar, (int, Fraction, QSqrt2, FieldElem)):
            return NotImplemented
        scalar = FieldElem.coerce(scalar)
        return BasisCombo([(b, c * scalar) for b, c in self._terms.items()])

    def __rmul__(self, scalar: Scalar) -> "BasisCombo":
        return self * scalar

    def __repr__(self) -> str:
        return f"BasisCombo({self.render()!r})"

    def __str__(self) -> str:
        return self.render()

    def render(self, order: Optional[Sequence[str]] = None) -> str:
        """Human readable form, e.g. ``-r1 + s1 + sqrt2*p1``."""
        if not self._terms:
            return "0"
        items = list(self._terms.items())
        if order is not None:
            items.sort(key=lambda kv: kv[0].sort_key(order))
        out = ""
        for i, (b, c) in enumerate(items):
            negative, body = _term_text(b, c)
            if i == 0:
                out = ("-" if negative else "") + body
            else:
                out += (" - " if negative else " + ") + body
        return out

    def to_json(self) -> List[dict]:
        return [{"basis": str(b), "coeff": c.to_str()} for b, c in self._terms.items()]

    @classmethod
    def from_json(cls, data: Iterable[Mapping]) -> "BasisCombo":
        # coefficients are stored in their rendered form
        from .exprparse import parse_field
        return cls([(BasisIntegral.parse(t["basis"]), parse_field(t["coeff"])) for t in data])


def _term_text(b: BasisIntegral, c: FieldElem) -> Tuple[bool, str]:
    if c == 1:
        return False, str(b)
    if c == -1:
        return True, str(b)
    if c.is_monomial():
        text = c.to_str()
        negative = text.startswith("-")
        return negative, f"{text.lstrip('-')}*{b}"
    return False, f"({c.to_str()})*{b}"


def substitute(c: BasisCombo, rule: Callable[[BasisIntegral], Optional[BasisCombo]]) -> BasisCombo:
    """Replace every basis integral the rule knows by its image."""
    out: List[Tuple[BasisIntegral, FieldElem]] = []
    for b, coeff in c.items():
        image = rule(b)
        if image is None:
            out.append((b, coeff))
        else:
            out.extend((b2, coeff * v) for b2, v in image.items())
    return BasisCombo(out)


# integration by parts identities for the derived families

def derived_rule(b: BasisIntegral) -> Optional[BasisCombo]:
    k = b.k
    if b.family is Family.B:
        return BasisCombo.of(("p", k + 2, k + 1), ("p", k, -k))
    if b.family is Family.C:
        return BasisCombo.of(("q", k + 2, k + 1), ("q", k, -k), ("p", k + 2, 1), ("p", k, -1))
    if b.family is Family.D:
        return BasisCombo.of(("a", k, -k), ("p", k, 1))
    if b.family is Family.E:
        return BasisCombo.of(("s", k, 1), ("r", k, k), ("r", k + 2, -(k + 1)))
    if b.family is Family.F:
        return BasisCombo.of(("r", k, -1), ("s", k, k))
    return None


def eliminate_derived(c: BasisCombo) -> BasisCombo:
    out = substitute(c, derived_rule)
    logger.debug("eliminated derived families: %d -> %d terms", len(c), len(out))
    return out


# one step recurrences, family_{k+2} in terms of lower indices

def recurrence_step(family: Family, k: int) -> BasisCombo:
    if k < 1:
        raise ValueError(f"recurrence index must be positive, got {k}")
    root2 = sqrt2()
    if family is Family.P:
        return BasisCombo.of(("p", k, Fraction(1 + k * k, k * (k + 1))))
    if family is Family.Q:
        body = BasisCombo.of(("q", k, 1 + k * k), ("p", k + 2, -(2 * k + 1)), ("p", k, 2 * k))
        return body * Fraction(1, k * (k + 1))
    if family is Family.R:
        body = (BasisCombo.of(("r", k, k * k - 3), ("s", k, 2 * k))
                + BasisCombo.of(("p", k + 2, 2)) * root2)
        return body * Fraction(1, k * (k + 1))
    if family is Family.S:
        body = (BasisCombo.of(("s", k, k * k - 3), ("r", k + 2, 2 * (k + 1)), ("r", k, -2 * k))
                + BasisCombo.of(("p", k + 4, 2 * (k + 3)), ("p", k + 2, -2 * (k + 2))) * root2)
        return body * Fraction(1, (k + 1) * (k + 2))
    if family is Family.A:
        body = BasisCombo.of(("a", k, 1 + k * k), ("p", k, -2 * k), ("p", k + 2, 2 * (k + 1)))
        return body * Fraction(1, (k + 1) * (k + 2))
    raise ValueError(f"family {family.value} has no recurrence, eliminate it first")


@lru_cache(maxsize=None)
def core(family: Family, k: int) -> BasisCombo:
    """Fully reduced form of a single core integral, over indices 1 or 2."""
    b = BasisIntegral(family, k)
    if family.is_derived:
        raise ValueError(f"{b} is derived, eliminate it first")
    if k <= 2:
        return BasisCombo.single(b)
    step = recurrence_step(family, k - 2)
    return substitute(step, lambda x: core(x.family, x.k))


def _stage(families: Tuple[Family, ...]) -> Callable[[BasisCombo], BasisCombo]:
    def reduce_stage(c: BasisCombo) -> BasisCombo:
        return substitute(c, lambda b: core(b.family, b.k) if b.family in families else None)
    return reduce_stage


reduce_p = _stage((Family.P,))
reduce_q = _stage((Family.Q,))
reduce_rs = _stage((Family.R, Family.S))
reduce_a = _stage((Family.A,))

STAGES: Dict[str, Callable[[BasisCombo], BasisCombo]] = {
    "p": reduce_p,
    "q": reduce_q,
    "rs": reduce_rs,
    "a": reduce_a,
}


def reduce_full(c: BasisCombo, order: Sequence[str] = Constants.STAGE_ORDER) -> BasisCombo:
    """
    Rewrite ``c`` over the core bases p1, q1, r1, s1, a1 (and their
    index-2 twins for even indices).

    Parameters
    ----------
    c : BasisCombo
        Any combination, derived families included.
    order : Sequence[str]
        Permutation of the stage names ``p``, ``q``, ``rs``, ``a``; the
        result does not depend on it.
    """
    if sorted(order) != sorted(Constants.STAGE_ORDER):
        raise ValueError(f"stage order must be a permutation of {Constants.STAGE_ORDER}, got {tuple(order)}")
    out = eliminate_derived(c)
    for name in order:
        out = STAGES[name](out)
        logger.debug("after stage %s: %s", name, out)
    return out


def flags(c: BasisCombo) -> List[str]:
    """Notes about terms outside the odd, small-index range the constant needs."""
    notes = []
    for b in c:
        if b.k % 2 == 0:
            notes.append(f"{b}: even index, reduces to index-2 bases")
        elif b.k > Constants.MAX_PAPER_INDEX + 4:
            notes.append(f"{b}: index above the range used for the constant")
    for note in notes:
        logger.warning(note)
    return notes


class RewriteRule(NamedTuple):
    name: str
    lhs: BasisIntegral
    rhs: BasisCombo


def rule_instances(k: int) -> List[RewriteRule]:
    """Every identity used by the reductions, instantiated at index ``k``."""
    rules = []
    for family in (Family.B, Family.C, Family.D, Family.E, Family.F):
        lhs = BasisIntegral(family, k)
        rules.append(RewriteRule(f"parts_{family.value}", lhs, derived_rule(lhs)))
    for family in (Family.P, Family.Q, Family.R, Family.S, Family.A):
        lhs = BasisIntegral(family, k + 2)
        rules.append(RewriteRule(f"recurrence_{family.value}", lhs, recurrence_step(family, k)))
    return rules
