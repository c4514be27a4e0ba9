# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
"""
Parser for rational expressions such as ``-(a01 + a21)*x1 + a12*x2`` over
the variables of a rational function field.
"""
import operator
import re
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from typing import Optional

from sympy.polys.fields import FracElement, FracField

from pident.algebra import symbol_names
from pident.common import ExpressionError

#: Identifiers; ``#<digits>`` marks an experiment copy and trailing primes mark derivatives.
IDENTIFIER_PATTERN = r"[A-Za-z_][A-Za-z0-9_]*(?:#[0-9]+)?'*"

_TOKEN_REGEX = re.compile(rf"(?P<number>[0-9]+)|(?P<name>{IDENTIFIER_PATTERN})|(?P<operator>[-+*/^()])")

_BINARY_OPERATORS: dict[str, tuple[int, Callable]] = {
    "+": (1, operator.add),
    "-": (1, operator.sub),
    "*": (2, operator.mul),
    "/": (2, operator.truediv),
}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    column: int


def _tokens(text: str) -> list[_Token]:
    result = []
    position = 0
    while position < len(text):
        if text[position].isspace():
            position += 1
            continue
        match = _TOKEN_REGEX.match(text, position)
        if match is None:
            raise ExpressionError(position + 1, f"unexpected character {text[position]!r}")
        result.append(_Token(match.lastgroup, match.group(), position + 1))
        position = match.end()
    result.append(_Token("end", "", len(text) + 1))
    return result


class _ExpressionParser:
    def __init__(self, text: str, field: FracField, names: Iterable[str]):
        self._tokens = _tokens(text)
        self._index = 0
        self._field = field
        allowed_names = set(names)
        self._name_to_gen = {
            name: gen for name, gen in zip(symbol_names(field), field.gens) if name in allowed_names
        }

    @property
    def _token(self) -> _Token:
        return self._tokens[self._index]

    def _advance(self) -> _Token:
        result = self._token
        self._index += 1
        return result

    def _is_operator(self, text: str) -> bool:
        return self._token.kind == "operator" and self._token.text == text

    def _expected(self, what: str) -> ExpressionError:
        found = "end of expression" if self._token.kind == "end" else f'"{self._token.text}"'
        return ExpressionError(self._token.column, f"expected {what} but found {found}")

    def parse(self) -> FracElement:
        result = self._expression(1)
        if self._token.kind != "end":
            raise self._expected("operator")
        return result

    def _expression(self, min_precedence: int) -> FracElement:
        result = self._unary()
        while self._token.kind == "operator" and self._token.text in _BINARY_OPERATORS:
            precedence, function = _BINARY_OPERATORS[self._token.text]
            if precedence < min_precedence:
                break
            operator_token = self._advance()
            right = self._expression(precedence + 1)
            try:
                result = function(result, right)
            except ZeroDivisionError:
                raise ExpressionError(operator_token.column, "division by zero", semantic=True) from None
        return result

    def _unary(self) -> FracElement:
        if self._is_operator("-"):
            self._advance()
            return -self._unary()
        if self._is_operator("+"):
            self._advance()
            return self._unary()
        return self._power()

    def _power(self) -> FracElement:
        result = self._atom()
        if self._is_operator("^"):
            self._advance()
            if self._token.kind != "number":
                raise self._expected("nonnegative integer exponent")
            result = result ** int(self._advance().text)
        return result

    def _atom(self) -> FracElement:
        token = self._token
        if token.kind == "number":
            self._advance()
            return self._field(int(token.text))
        if token.kind == "name":
            self._advance()
            gen = self._name_to_gen.get(token.text)
            if gen is None:
                raise ExpressionError(token.column, f'unknown symbol "{token.text}"', semantic=True, name=token.text)
            return gen
        if self._is_operator("("):
            self._advance()
            result = self._expression(1)
            if not self._is_operator(")"):
                raise self._expected('")"')
            self._advance()
            return result
        raise self._expected("number, symbol or \"(\"")


def parse_expression(text: str, field: FracField, names: Optional[Iterable[str]] = None) -> FracElement:
    """
    Rational function in ``field`` described by ``text``. Only symbols in
    ``names`` (default: all variables of ``field``) may be used.

    >>> from pident.algebra import rational_function_field
    >>> field = rational_function_field(("k1", "k2"))
    >>> k1, k2 = field.gens
    >>> parse_expression("k1*k2 - (k1 + 1)/2", field) == k1 * k2 - (k1 + 1) / 2
    True
    """
    return _ExpressionParser(text, field, symbol_names(field) if names is None else names).parse()
