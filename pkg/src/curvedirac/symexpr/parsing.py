"""Recursive-descent parser for the expression grammar.

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := primary ('^' unary)?
    primary := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so ``-x^2``
is ``-(x^2)`` and ``2^-1`` is ``1/2``. ``i`` always denotes the imaginary
unit. Decimal literals become exact rationals.
"""

import re
from fractions import Fraction

from ..errors import ExpressionSyntaxError, ReservedNameError
from .core import FUNCTIONS, I, Rational, Symbol, add, div, func, mul, neg, power

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        n = len(text)
        while True:
            while pos < n and text[pos].isspace():
                pos += 1
            if pos >= n:
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ExpressionSyntaxError(
                    f"unexpected character {text[pos]!r}", self._byte(pos), "a number, identifier or operator"
                )
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.tokens.append(("end", "", n))
        self.i = 0

    def _byte(self, char_index):
        return len(self.text[:char_index].encode("utf-8"))

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, value, pos = self.peek()
        found = "end of input" if kind == "end" else repr(value)
        raise ExpressionSyntaxError(f"unexpected {found}", self._byte(pos), expected)

    def expect(self, op):
        kind, value, _ = self.peek()
        if kind != "op" or value != op:
            self.fail(repr(op))
        self.advance()

    def parse(self):
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail("an operator or end of input")
        return e

    def expr(self):
        e = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.term()
                e = add(e, rhs) if value == "+" else add(e, neg(rhs))
            else:
                return e

    def term(self):
        e = self.unary()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                rhs = self.unary()
                e = mul(e, rhs) if value == "*" else div(e, rhs)
            else:
                return e

    def unary(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return neg(self.unary())
        if kind == "op" and value == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.primary()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            return power(base, self.unary())
        return base

    def primary(self):
        kind, value, pos = self.peek()
        if kind == "num":
            self.advance()
            return Rational(Fraction(value))
        if kind == "ident":
            self.advance()
            nxt = self.peek()
            is_call = nxt[0] == "op" and nxt[1] == "("
            if value == "i":
                if is_call:
                    raise ReservedNameError(f"'i' is the imaginary unit, not a function (byte {self._byte(pos)})")
                return I
            if value in FUNCTIONS:
                if not is_call:
                    self.fail(f"'(' after function name {value!r}")
                self.advance()
                arg = self.expr()
                self.expect(")")
                return func(value, arg)
            if is_call:
                raise ExpressionSyntaxError(
                    f"unknown function {value!r}", self._byte(pos), "one of " + ", ".join(FUNCTIONS)
                )
            return Symbol(value)
        if kind == "op" and value == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.fail("a number, identifier, function call or '('")


def parse_expr(text: str):
    """Parse infix text into a canonical :class:`Expr`."""
    return _Parser(text).parse()
