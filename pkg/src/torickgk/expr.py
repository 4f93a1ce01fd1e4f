"""A small arithmetic language for user supplied potentials.

Grammar, loosest binding first::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | "mu1" .. "mu9" | FUNC "(" expr ")" | "(" expr ")"
    FUNC   := "log" | "sqrt" | "exp"

``^`` binds tighter than unary minus and is right associative, so ``-2^2``
is ``-4`` and ``2^3^2`` is ``512``.  There is no implicit multiplication.

Parsing produces an immutable tree of dataclass nodes.  :func:`evaluate`
works on scalars and on numpy arrays (the last axis of ``x`` indexes the
variables), and raises :class:`~torickgk.errors.DomainError` or
:class:`~torickgk.errors.DivByZero` carrying the offending node.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    ArityError,
    DimensionMismatch,
    DivByZero,
    DomainError,
    ExprSyntaxError,
    UnknownIdentifier,
)

FUNCTIONS = {"log": 1, "sqrt": 1, "exp": 1}
_VAR = re.compile(r"mu([1-9])\Z")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # zero based: mu1 -> 0


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]


# ------------------------------------------------------------------ tokenizer

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


def _tokenize(src: str):
    pos = 0
    out = []
    while pos < len(src):
        mt = _TOKEN.match(src, pos)
        if mt is None:
            raise ExprSyntaxError(pos, f"unexpected character {src[pos]!r}")
        kind = mt.lastgroup
        if kind != "ws":
            out.append((kind, mt.group(), pos))
        pos = mt.end()
    out.append(("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src: str, dim: int | None):
        self.toks = _tokenize(src)
        self.i = 0
        self.dim = dim

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, val, pos = self.take()
        if val != text or kind == "end":
            raise ExprSyntaxError(pos, f"expected {text!r}")

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(pos, f"unexpected {val!r}")
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
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val in FUNCTIONS:
                if self.peek()[1] != "(":
                    raise ArityError(val, FUNCTIONS[val], 0, pos)
                self.take()
                args = []
                if self.peek()[1] != ")":
                    args.append(self.expr())
                    while self.peek()[1] == ",":
                        self.take()
                        args.append(self.expr())
                self.expect(")")
                if len(args) != FUNCTIONS[val]:
                    raise ArityError(val, FUNCTIONS[val], len(args), pos)
                return Call(val, args[0])
            mt = _VAR.match(val)
            if mt is None:
                raise UnknownIdentifier(val, pos)
            k = int(mt.group(1))
            if self.dim is not None and k > self.dim:
                raise DimensionMismatch(val, self.dim)
            return Var(k - 1)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise ExprSyntaxError(pos, "unexpected end of input")
        raise ExprSyntaxError(pos, f"unexpected {val!r}")


def parse(src: str, dim: int | None = None) -> Node:
    """Parse source text into an expression tree.

    Parameters
    ----------
    src : str
    dim : int, optional
        If given, variables ``mu{k}`` with ``k > dim`` raise
        :class:`~torickgk.errors.DimensionMismatch`.
    """
    return _Parser(src, dim).parse()


def max_variable(node: Node) -> int:
    """Number of variables needed, i.e. the largest ``k`` such that ``mu{k}`` occurs."""
    if isinstance(node, Var):
        return node.index + 1
    if isinstance(node, Num):
        return 0
    if isinstance(node, (Neg, Call)):
        return max_variable(node.operand if isinstance(node, Neg) else node.arg)
    return max(max_variable(node.left), max_variable(node.right))


# ----------------------------------------------------------------- evaluation


def evaluate(node: Node, x):
    """Evaluate a tree at ``x``; the last axis of ``x`` indexes ``mu1, mu2, ...``.

    Returns a float for a single point and an array otherwise.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval(node, x)
    out = np.broadcast_to(out, x.shape[:-1]) if x.ndim > 1 else out
    return float(out) if np.ndim(out) == 0 else np.array(out)


def _eval(node, x):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.index >= x.shape[-1]:
            raise DimensionMismatch(f"mu{node.index + 1}", x.shape[-1])
        return x[..., node.index]
    if isinstance(node, Neg):
        return -_eval(node.operand, x)
    if isinstance(node, Call):
        a = _eval(node.arg, x)
        if node.func == "log":
            if np.any(np.asarray(a) <= 0):
                raise DomainError(node, "log of a non-positive number")
            return np.log(a)
        if node.func == "sqrt":
            if np.any(np.asarray(a) < 0):
                raise DomainError(node, "sqrt of a negative number")
            return np.sqrt(a)
        return np.exp(a)
    a = _eval(node.left, x)
    b = _eval(node.right, x)
    op = node.op
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if np.any(np.asarray(b) == 0):
            raise DivByZero(node, "division by zero")
        return a / b
    # power
    a_arr, b_arr = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    if np.any((a_arr == 0) & (b_arr < 0)):
        raise DivByZero(node, "zero raised to a negative power")
    if np.any((a_arr < 0) & (b_arr != np.round(b_arr))):
        raise DomainError(node, "negative base with a non-integer exponent")
    return np.power(a, b)


# ------------------------------------------------------------------- printing

def to_source(node: Node) -> str:
    """Canonical, fully parenthesised source text.

    ``parse(to_source(t)) == t`` for every tree returned by :func:`parse`.
    """
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return f"mu{node.index + 1}"
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
