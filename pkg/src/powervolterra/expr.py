"""Recursive-descent parser for kernel expressions in x and t.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | VAR | FUNC '(' expr (',' expr)* ')' | '(' expr ')'

``^`` binds tighter than unary minus and associates to the right, so
``-x^2`` is ``-(x^2)`` and ``2^3^2`` is ``2^9``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

__all__ = ["KernelSyntaxError", "parse", "Node"]


class KernelSyntaxError(ValueError):
    def __init__(self, message, pos):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)

VARIABLES = ("x", "t")
FUNCTIONS = {
    "exp": (1, np.exp),
    "log": (1, np.log),
    "sqrt": (1, np.sqrt),
    "pow": (2, np.power),
}
_BINARY = {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide, "^": np.power}


def _tokenize(src):
    pos, out = 0, []
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        mt = _TOKEN.match(src, pos)
        if mt is None:
            start = len(src) - len(src[pos:].lstrip())
            raise KernelSyntaxError(f"unexpected character {src[start]!r}", start)
        kind = mt.lastgroup
        out.append((kind, mt.group(kind), mt.start(kind)))
        pos = mt.end()
    out.append(("end", "", len(src)))
    return out


class Node:
    def evaluate(self, x, t):
        raise NotImplementedError

    @property
    def variables(self) -> frozenset:
        return frozenset()


@dataclass(frozen=True)
class Num(Node):
    value: float

    def evaluate(self, x, t):
        return self.value


@dataclass(frozen=True)
class Var(Node):
    name: str

    def evaluate(self, x, t):
        return x if self.name == "x" else t

    @property
    def variables(self):
        return frozenset((self.name,))


@dataclass(frozen=True)
class Neg(Node):
    arg: Node

    def evaluate(self, x, t):
        return np.negative(self.arg.evaluate(x, t))

    @property
    def variables(self):
        return self.arg.variables


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def evaluate(self, x, t):
        return _BINARY[self.op](self.left.evaluate(x, t), self.right.evaluate(x, t))

    @property
    def variables(self):
        return self.left.variables | self.right.variables


@dataclass(frozen=True)
class Call(Node):
    name: str
    args: tuple

    def evaluate(self, x, t):
        return FUNCTIONS[self.name][1](*(a.evaluate(x, t) for a in self.args))

    @property
    def variables(self):
        out = frozenset()
        for a in self.args:
            out |= a.variables
        return out


class _Parser:
    def __init__(self, src):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.take()
        if text != value or kind != "op":
            found = "end of input" if kind == "end" else repr(text)
            raise KernelSyntaxError(f"expected {value!r}, found {found}", pos)

    def parse(self):
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise KernelSyntaxError(f"unexpected {text!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text in ("+", "-"):
            self.take()
            arg = self.unary()
            return Neg(arg) if text == "-" else arg
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text in VARIABLES:
                return Var(text)
            if text in FUNCTIONS:
                arity = FUNCTIONS[text][0]
                self.expect("(")
                args = [self.expr()]
                while self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != arity:
                    raise KernelSyntaxError(
                        f"{text} takes {arity} argument(s), got {len(args)}", pos
                    )
                return Call(text, tuple(args))
            raise KernelSyntaxError(f"unknown identifier {text!r}", pos)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise KernelSyntaxError(f"unexpected {found}", pos)


def parse(src: str) -> Node:
    """Parse ``src`` into an expression tree; raises KernelSyntaxError."""
    return _Parser(src).parse()
