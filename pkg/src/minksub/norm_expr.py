"""Recursive-descent parser for the norm expression language.

Grammar (whitespace insignificant, precedence ^ then unary minus then */
then +-):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' integer)?
    base   := number | 'y' integer | '(' expr ')' | 'sqrt' '(' expr ')'
            | '-' base

Variables are written y1 .. yN for an N-dimensional norm.  Trees evaluate
over any commutative ring with the usual operators, so the same tree
serves float evaluation and jet evaluation.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .jets import Jet4


class ExprSyntaxError(ValueError):
    """Malformed expression text; carries the character position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class UnknownVariable(ValueError):
    """A variable outside y1..yN was referenced."""

    def __init__(self, name: str, pos: int):
        super().__init__(f"unknown variable {name!r} (at position {pos})")
        self.name = name
        self.pos = pos


class ArityError(ValueError):
    """A function was applied to the wrong number of arguments."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based, as written in the source


@dataclass(frozen=True)
class Bin:
    op: str  # '+', '-', '*', '/'
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Sqrt:
    arg: object


@dataclass(frozen=True)
class Neg:
    arg: object


_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?"
                    r"|([A-Za-z]+\d*)|([-+*/^()]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", at)
        if m.group(1) is not None:
            tokens.append(("num", float(m.group(1) + (m.group(2) or "")),
                           m.start(1)))
        elif m.group(3) is not None:
            tokens.append(("name", m.group(3), m.start(3)))
        else:
            tokens.append(("op", m.group(4), m.start(4)))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, dim: int):
        self.text = text
        self.dim = dim
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected {op!r}", pos)
        self.advance()

    def parse(self):
        node = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError("trailing input", pos)
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                node = Bin(val, node, self.term())
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                node = Bin(val, node, self.factor())
            else:
                return node

    def factor(self):
        # unary minus distributes over the exponent: -y1^2 is -(y1^2)
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            return Neg(self.factor())
        node = self.base()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            node = Pow(node, self.integer())
        return node

    def integer(self) -> int:
        sign = 1
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            sign = -1
            self.advance()
            kind, val, pos = self.peek()
        if kind != "num" or val != int(val):
            raise ExprSyntaxError("exponent must be an integer", pos)
        self.advance()
        return sign * int(val)

    def base(self):
        kind, val, pos = self.advance()
        if kind == "num":
            return Num(val)
        if kind == "name":
            if val == "sqrt":
                self.expect_op("(")
                k, v, p = self.peek()
                if k == "op" and v == ")":
                    raise ArityError(f"sqrt expects one argument (at position {p})")
                node = self.expr()
                self.expect_op(")")
                return Sqrt(node)
            m = re.fullmatch(r"y(\d+)", val)
            if m is None:
                raise UnknownVariable(val, pos)
            idx = int(m.group(1))
            if not 1 <= idx <= self.dim:
                raise UnknownVariable(val, pos)
            return Var(idx)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "op" and val == "-":
            return Neg(self.base())
        raise ExprSyntaxError("expected a number, variable, or '('", pos)


def parse_norm(text: str, dim: int):
    """Parse expression text into a tree, validating variables against dim."""
    return _Parser(text, dim).parse()


def evaluate(node, args):
    """Evaluate a tree over floats or jets; args[i] is the value of y(i+1)."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return args[node.index - 1]
    if isinstance(node, Bin):
        a = evaluate(node.left, args)
        b = evaluate(node.right, args)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    if isinstance(node, Pow):
        base = evaluate(node.base, args)
        if isinstance(base, Jet4):
            return base ** node.exponent
        return float(base) ** node.exponent
    if isinstance(node, Sqrt):
        arg = evaluate(node.arg, args)
        if isinstance(arg, Jet4):
            return arg.sqrt()
        return math.sqrt(arg)
    if isinstance(node, Neg):
        return -evaluate(node.arg, args)
    raise TypeError(f"not an expression node: {node!r}")


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_text(node, _parent_prec: int = 0) -> str:
    """Print a tree so that parse_norm(to_text(t)) reproduces it.

    Round-tripping is structural for any tree the parser itself produces
    (literals come out of the parser nonnegative; negation is a Neg node).
    """
    if isinstance(node, Num):
        v = node.value
        s = repr(int(v)) if v == int(v) and abs(v) < 1e16 else repr(v)
        return f"({s})" if v < 0 else s
    if isinstance(node, Var):
        return f"y{node.index}"
    if isinstance(node, Bin):
        prec = _PREC[node.op]
        # the right operand of - and / needs parens at equal precedence
        left = to_text(node.left, prec)
        right = to_text(node.right, prec + 1)
        s = f"{left} {node.op} {right}"
        return f"({s})" if prec < _parent_prec else s
    if isinstance(node, Pow):
        base = to_text(node.base, 5)  # only atoms may carry '^' unwrapped
        s = f"{base}^{node.exponent}"
        return f"({s})" if _parent_prec >= 5 else s
    if isinstance(node, Sqrt):
        return f"sqrt({to_text(node.arg)})"
    if isinstance(node, Neg):
        s = f"-{to_text(node.arg, 3)}"
        return f"({s})" if _parent_prec > 3 else s
    raise TypeError(f"not an expression node: {node!r}")
