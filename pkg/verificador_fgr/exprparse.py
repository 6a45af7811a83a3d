"""
Leitura de expressões lineares em integrais de base.

Gramática (posições de erro são deslocamentos de caractere, base 0)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := power (('*'|'/') power)*
    power  := atom ['^' INT]
    atom   := INT | 'sqrt2' | 'log2' | FAMILY INDEX | '(' expr ')'

Escalares e combinações são misturados apenas de forma linear:
escalar*combinação, combinação/escalar, somas de mesmo tipo.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Union

from .basisreduce import BasisCombo, BasisIntegral, Family
from .constants import Constants
from .errors import ExpressionSyntaxError, NonPositiveIndex, UnknownFamily
from .exactfield import FieldElem, log2, sqrt2

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_]+\d*)|(?P<op>[-+*/^()]))")

Value = Union[FieldElem, BasisCombo]


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExpressionSyntaxError(f"unexpected character {text[start]!r}", start, text)
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def fail(self, message: str, position: int = None):
        pos = self.current.position if position is None else position
        raise ExpressionSyntaxError(message, pos, self.text)

    def parse(self) -> Value:
        if self.current.kind == "end":
            self.fail("empty expression")
        value = self.expr()
        if self.current.kind != "end":
            self.fail(f"unexpected {self.current.text!r}")
        return value

    def expr(self) -> Value:
        sign = None
        if self.current.kind == "op" and self.current.text in "+-":
            sign = self.advance()
        value = self.term()
        if sign is not None and sign.text == "-":
            value = -value
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.advance()
            rhs = self.term()
            value = self._combine(value, -rhs if op.text == "-" else rhs, op)
        return value

    def _combine(self, lhs: Value, rhs: Value, op: Token) -> Value:
        if isinstance(lhs, FieldElem) and isinstance(rhs, FieldElem):
            return lhs + rhs
        if isinstance(lhs, BasisCombo) and isinstance(rhs, BasisCombo):
            return lhs + rhs
        raise ExpressionSyntaxError("cannot add a number to a basis integral", op.position, self.text)

    def term(self) -> Value:
        value = self.power()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self.advance()
            rhs = self.power()
            if op.text == "*":
                if isinstance(value, BasisCombo) and isinstance(rhs, BasisCombo):
                    raise ExpressionSyntaxError("product of two basis integrals", op.position, self.text)
                value = value * rhs if isinstance(value, BasisCombo) else rhs * value
            else:
                if isinstance(rhs, BasisCombo):
                    raise ExpressionSyntaxError("division by a basis integral", op.position, self.text)
                if rhs.is_zero():
                    raise ExpressionSyntaxError("division by zero", op.position, self.text)
                if rhs.l_degree() > 0:
                    raise ExpressionSyntaxError("division by an expression in log2", op.position, self.text)
                value = value * rhs.inverse()
        return value

    def power(self) -> Value:
        value = self.atom()
        if self.current.kind == "op" and self.current.text == "^":
            op = self.advance()
            if self.current.kind != "num":
                self.fail("exponent must be a non-negative integer")
            exponent_tok = self.advance()
            exponent = int(exponent_tok.text)
            if exponent > Constants.MAX_EXPONENT:
                raise ExpressionSyntaxError(f"exponent {exponent} above {Constants.MAX_EXPONENT}",
                                            exponent_tok.position, self.text)
            if isinstance(value, BasisCombo):
                raise ExpressionSyntaxError("power of a basis integral", op.position, self.text)
            value = value ** exponent
        return value

    def atom(self) -> Value:
        tok = self.current
        if tok.kind == "num":
            self.advance()
            return FieldElem.coerce(Fraction(int(tok.text)))
        if tok.kind == "name":
            self.advance()
            return self._name(tok)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            value = self.expr()
            if not (self.current.kind == "op" and self.current.text == ")"):
                self.fail("missing ')'")
            self.advance()
            return value
        if tok.kind == "end":
            self.fail("unexpected end of expression")
        self.fail(f"unexpected {tok.text!r}")

    def _name(self, tok: Token) -> Value:
        if tok.text == "sqrt2":
            return sqrt2()
        if tok.text == "log2":
            return log2()
        letters = tok.text.rstrip("0123456789")
        digits = tok.text[len(letters):]
        if letters not in Constants.FAMILY_ORDER:
            raise UnknownFamily(f"unknown basis family {letters!r}", tok.position, self.text)
        if not digits:
            raise ExpressionSyntaxError(f"basis family {letters!r} without index", tok.position, self.text)
        k = int(digits)
        if k < 1:
            raise NonPositiveIndex(f"index of {tok.text!r} must be positive", tok.position, self.text)
        return BasisCombo.single(BasisIntegral(Family.from_letter(letters), k))


def parse_expression(text: str) -> Value:
    return _Parser(text).parse()


def parse_basis_expr(text: str) -> BasisCombo:
    """Parse a linear combination of basis integrals, e.g. ``2*sqrt2*b3 - b5``."""
    value = parse_expression(text)
    if isinstance(value, FieldElem):
        if value.is_zero():
            return BasisCombo()
        raise ExpressionSyntaxError("expression has no basis integral", 0, text)
    return value


def parse_field(text: str) -> FieldElem:
    """Parse an exact coefficient, e.g. ``-13*log2 - 71``."""
    value = parse_expression(text)
    if isinstance(value, BasisCombo):
        raise ExpressionSyntaxError("coefficient contains a basis integral", 0, text)
    return value
