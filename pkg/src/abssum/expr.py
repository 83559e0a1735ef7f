"""A small expression language for index sequences.

Grammar (``^`` and ``**`` are right-associative powers)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom (('^' | '**') unary)?
    atom   := NUMBER | 'n' | 'pi' | 'e' | NAME '(' expr ')' | '(' expr ')'

Functions: log, exp, sqrt, sin, cos, tan, abs, floor. ``(-1)^n`` is
evaluated exactly as a parity sign.
"""

from __future__ import annotations

import math
import re
from typing import Callable

import numpy as np

from .errors import ConfigError

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+(?:[eE][-+]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()]))"
)

FUNCTIONS: dict[str, Callable] = {
    "log": np.log,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "abs": np.abs,
    "floor": np.floor,
}
CONSTANTS = {"pi": math.pi, "e": math.e}


def tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ConfigError(f"unexpected character {text[pos]!r} at position {pos} in {text!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


# AST nodes are tuples: ("num", v) | ("var",) | ("call", f, x) | ("neg", x) | (op, l, r)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            want = value or "a token"
            raise ConfigError(f"expected {want} at position {tok[2]} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise ConfigError("empty expression")
        node = self.expr()
        if self.i != len(self.tokens):
            tok = self.peek()
            raise ConfigError(f"unexpected {tok[1]!r} at position {tok[2]} in {self.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = (op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return ("neg", self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.take()
            return ("^", base, self.unary())
        return base

    def atom(self):
        kind, value, pos = self.take()
        if kind == "num":
            return ("num", float(value))
        if kind == "name":
            if value == "n":
                return ("var",)
            if value in CONSTANTS:
                return ("num", CONSTANTS[value])
            if value in FUNCTIONS:
                self.take("(")
                arg = self.expr()
                self.take(")")
                return ("call", value, arg)
            raise ConfigError(f"unknown name {value!r} at position {pos} in {self.text!r}")
        if value == "(":
            node = self.expr()
            self.take(")")
            return node
        raise ConfigError(f"unexpected {value!r} at position {pos} in {self.text!r}")


def parse(text: str):
    return _Parser(text).parse()


def _is_minus_one(node) -> bool:
    return node == ("neg", ("num", 1.0)) or node == ("num", -1.0)


def _eval(node, n: np.ndarray):
    tag = node[0]
    if tag == "num":
        return np.full(n.shape, node[1])
    if tag == "var":
        return n.astype(float)
    if tag == "neg":
        return -_eval(node[1], n)
    if tag == "call":
        return FUNCTIONS[node[1]](_eval(node[2], n))
    left, right = node[1], node[2]
    if tag == "^":
        if _is_minus_one(left) and right == ("var",):
            return np.where(n % 2 == 0, 1.0, -1.0)
        return np.power(_eval(left, n), _eval(right, n))
    a, b = _eval(left, n), _eval(right, n)
    if tag == "+":
        return a + b
    if tag == "-":
        return a - b
    if tag == "*":
        return a * b
    return a / b


def compile_expression(text: str) -> Callable[[np.ndarray], np.ndarray]:
    """Return a vectorised function of the integer index array."""
    tree = parse(text)

    def func(n):
        n = np.asarray(n)
        with np.errstate(divide="ignore", invalid="ignore"):
            return _eval(tree, n)

    func.__name__ = text
    return func
