"""Arithmetic expressions in one variable ``t`` for cone-metric specs.

Grammar (whitespace between tokens is ignored)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | "t" | "(" expr ")"
    NUMBER := DIGITS ("." DIGITS?)? (("e" | "E") ("+" | "-")? DIGITS)?
            | "." DIGITS (("e" | "E") ("+" | "-")? DIGITS)?

``^`` is right-associative and binds tighter than unary minus, so ``-t^2``
is ``-(t^2)`` and ``2^-1`` is ``0.5``. Numbers are read exactly as
Fractions; evaluation on a float ``t`` returns a float.
"""

from __future__ import annotations

import re
from fractions import Fraction

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)|(?P<var>t)|(?P<op>[-+*/^()]))")


class ExprError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at column {pos + 1}")
        self.pos = pos


def _tokenize(src: str) -> list:
    out = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m:
            raise ExprError(f"unexpected character {src[pos:].lstrip()[0]!r}",
                            len(src) - len(src[pos:].lstrip()))
        start = m.start(m.lastgroup)
        if m.lastgroup == "num":
            out.append(("num", Fraction(m.group("num")), start))
        elif m.lastgroup == "var":
            out.append(("var", None, start))
        else:
            out.append(("op", m.group("op"), start))
        pos = m.end()
    out.append(("end", None, len(src)))
    return out


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def is_op(self, *ops):
        kind, val, _ = self.peek()
        return kind == "op" and val in ops

    def parse(self):
        node = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ExprError("trailing input", pos)
        return node

    def expr(self):
        node = self.term()
        while self.is_op("+", "-"):
            op = self.take()[1]
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.is_op("*", "/"):
            op = self.take()[1]
            node = (op, node, self.unary())
        return node

    def unary(self):
        if self.is_op("+", "-"):
            op = self.take()[1]
            operand = self.unary()
            return operand if op == "+" else ("neg", operand)
        return self.power()

    def power(self):
        base = self.atom()
        if self.is_op("^"):
            self.take()
            return ("^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return ("num", val)
        if kind == "var":
            return ("t",)
        if kind == "op" and val == "(":
            node = self.expr()
            k2, v2, p2 = self.take()
            if not (k2 == "op" and v2 == ")"):
                raise ExprError("expected ')'", p2)
            return node
        raise ExprError("expected a number, 't' or '('", pos)


def _eval(node, t):
    tag = node[0]
    if tag == "num":
        return node[1] if isinstance(t, Fraction) else float(node[1])
    if tag == "t":
        return t
    if tag == "neg":
        return -_eval(node[1], t)
    a, b = _eval(node[1], t), _eval(node[2], t)
    if tag == "+":
        return a + b
    if tag == "-":
        return a - b
    if tag == "*":
        return a * b
    if tag == "/":
        return a / b
    if isinstance(b, Fraction) and b.denominator != 1:
        b = float(b)
    return a ** b


class Expr:
    """A parsed expression; call it with a value of ``t``."""

    def __init__(self, src: str):
        self.src = src
        self.tree = _Parser(src).parse()

    def __call__(self, t):
        return _eval(self.tree, t)

    def __repr__(self):
        return f"Expr({self.src!r})"


def parse(src: str) -> Expr:
    return Expr(src)
