"""Closed-form expression language for scenario fields.

A small recursive-descent parser over ``+ - * / ^``, parentheses, numeric
literals, coordinate symbols and the functions sin, cos, exp, sqrt, log and
pow.  Parsed expressions evaluate over generic scalars so the same source
string yields exact derivatives when fed dual numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import scalars
from .errors import ExpressionError

_FUNCTIONS = {
    "sin": (1, scalars.sin),
    "cos": (1, scalars.cos),
    "exp": (1, scalars.exp),
    "sqrt": (1, scalars.sqrt),
    "log": (1, scalars.log),
    "pow": (2, scalars.generic_pow),
}

_CONSTANTS = {"pi": math.pi}


# -- tokenizer -----------------------------------------------------------------

def _tokenize(src):
    tokens = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            while j < n and (src[j].isdigit() or src[j] == "."):
                j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            try:
                value = float(src[i:j])
            except ValueError:
                raise ExpressionError(f"malformed number {src[i:j]!r}", i)
            tokens.append(("num", value, i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(("name", src[i:j], i))
            i = j
            continue
        if c in "+-*/^(),":
            tokens.append(("op", c, i))
            i += 1
            continue
        raise ExpressionError(f"unexpected character {c!r}", i)
    tokens.append(("end", "", n))
    return tokens


# -- parser --------------------------------------------------------------------

class _Parser:
    """Standard precedence: +- < */ < unary minus < ^ (right associative)."""

    def __init__(self, src, coord_names):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0
        self.coord_names = tuple(coord_names)

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, value, at = self.peek()
        if kind != "op" or value != op:
            raise ExpressionError(f"expected {op!r}, found {value!r}", at)
        return self.advance()

    def parse(self):
        node = self.expr()
        kind, value, at = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected trailing input {value!r}", at)
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.term()
                node = ("add" if value == "+" else "sub", node, rhs)
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                rhs = self.unary()
                node = ("mul" if value == "*" else "div", node, rhs)
            else:
                return node

    def unary(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return ("neg", self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            return ("pow", base, self.unary())
        return base

    def atom(self):
        kind, value, at = self.advance()
        if kind == "num":
            return ("num", value)
        if kind == "name":
            nxt_kind, nxt_value, _ = self.peek()
            if nxt_kind == "op" and nxt_value == "(":
                return self.call(value, at)
            if value in self.coord_names:
                return ("coord", self.coord_names.index(value))
            if value in _CONSTANTS:
                return ("num", _CONSTANTS[value])
            raise ExpressionError(
                f"unknown symbol {value!r} (coordinates here: {', '.join(self.coord_names)})", at)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExpressionError(f"unexpected token {value!r}", at)

    def call(self, name, at):
        if name not in _FUNCTIONS:
            raise ExpressionError(f"unknown function {name!r}", at)
        arity, _ = _FUNCTIONS[name]
        self.expect_op("(")
        args = [self.expr()]
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == ",":
                self.advance()
                args.append(self.expr())
            else:
                break
        self.expect_op(")")
        if len(args) != arity:
            raise ExpressionError(
                f"{name} takes {arity} argument(s), got {len(args)}", at)
        return ("call", name, tuple(args))


def _evaluate(node, coords):
    op = node[0]
    if op == "num":
        return node[1]
    if op == "coord":
        return coords[node[1]]
    if op == "neg":
        return -_evaluate(node[1], coords)
    if op == "add":
        return _evaluate(node[1], coords) + _evaluate(node[2], coords)
    if op == "sub":
        return _evaluate(node[1], coords) - _evaluate(node[2], coords)
    if op == "mul":
        return _evaluate(node[1], coords) * _evaluate(node[2], coords)
    if op == "div":
        return _evaluate(node[1], coords) / _evaluate(node[2], coords)
    if op == "pow":
        return scalars.generic_pow(_evaluate(node[1], coords), _evaluate(node[2], coords))
    if op == "call":
        _, fn = _FUNCTIONS[node[1]]
        return fn(*(_evaluate(arg, coords) for arg in node[2]))
    raise AssertionError(f"unknown AST node {op!r}")


@dataclass(frozen=True)
class ExprMap:
    """A parsed closed-form scalar map over a named coordinate chart."""

    source: str
    coord_names: tuple

    def __post_init__(self):
        ast = _Parser(self.source, self.coord_names).parse()
        object.__setattr__(self, "_ast", ast)

    def __call__(self, coords):
        return _evaluate(self._ast, coords)

    def __repr__(self):
        return f"ExprMap({self.source!r})"


def parse_expression(source, coord_names):
    """Compile a source string into a smooth map over the given coordinates."""
    if not isinstance(source, str):
        raise ExpressionError(f"expression must be a string, got {type(source).__name__}", 0)
    return ExprMap(source, tuple(coord_names))
