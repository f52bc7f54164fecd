"""A minimal arithmetic expression language for operator coefficients.

Grammar: ``+ - * /``, parentheses, the functions exp, sin, cos, sqrt,
tanh, the variables x1..xd, and numeric literals. One parse produces an
expression that evaluates both ways: vectorised on point arrays and in
interval arithmetic on boxes, so a config file can state a coefficient
once and get a sound enclosure for free.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import CoefficientEnclosureError, EvaluatorFailure, ParseError
from .interval import Box, Interval

__all__ = ["Expression", "parse_expression"]

_FUNCS = ("exp", "sin", "cos", "sqrt", "tanh")

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[+\-*/()])"
    r")"
)


@dataclass(frozen=True)
class _Num:
    value: float


@dataclass(frozen=True)
class _Var:
    index: int  # 0-based; the source spelling is x{index+1}


@dataclass(frozen=True)
class _Neg:
    arg: "_Node"


@dataclass(frozen=True)
class _Bin:
    op: str
    left: "_Node"
    right: "_Node"


@dataclass(frozen=True)
class _Call:
    func: str
    arg: "_Node"


_Node = Union[_Num, _Var, _Neg, _Bin, _Call]


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r} at position {pos}")
        if m.lastgroup is not None:
            out.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r} at position {pos} in {self.text!r}")

    def parse(self) -> _Node:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind is not None:
            raise ParseError(f"unexpected {val!r} at position {pos} in {self.text!r}")
        return node

    def expr(self) -> _Node:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                node = _Bin(val, node, self.term())
            else:
                return node

    def term(self) -> _Node:
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                node = _Bin(val, node, self.factor())
            else:
                return node

    def factor(self) -> _Node:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return _Neg(self.factor())
        if kind == "op" and val == "+":
            self.take()
            return self.factor()
        return self.atom()

    def atom(self) -> _Node:
        kind, val, pos = self.take()
        if kind == "num":
            return _Num(float(val))
        if kind == "ident":
            if val in _FUNCS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return _Call(val, arg)
            m = re.fullmatch(r"x([1-9]\d*)", val)
            if m:
                return _Var(int(m.group(1)) - 1)
            raise ParseError(f"unknown identifier {val!r} at position {pos} in {self.text!r}")
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(f"unexpected {val!r} at position {pos} in {self.text!r}")


def _max_var(node: _Node) -> int:
    if isinstance(node, _Var):
        return node.index + 1
    if isinstance(node, _Neg):
        return _max_var(node.arg)
    if isinstance(node, _Bin):
        return max(_max_var(node.left), _max_var(node.right))
    if isinstance(node, _Call):
        return _max_var(node.arg)
    return 0


def _eval_point(node: _Node, X: np.ndarray):
    if isinstance(node, _Num):
        return node.value
    if isinstance(node, _Var):
        return X[:, node.index]
    if isinstance(node, _Neg):
        return -_eval_point(node.arg, X)
    if isinstance(node, _Bin):
        a = _eval_point(node.left, X)
        b = _eval_point(node.right, X)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    f = getattr(np, node.func)
    return f(_eval_point(node.arg, X))


def _eval_box(node: _Node, K: Box) -> Interval:
    if isinstance(node, _Num):
        return Interval(node.value, node.value)
    if isinstance(node, _Var):
        return K.axis(node.index)
    if isinstance(node, _Neg):
        return -_eval_box(node.arg, K)
    if isinstance(node, _Bin):
        a = _eval_box(node.left, K)
        b = _eval_box(node.right, K)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    arg = _eval_box(node.arg, K)
    if node.func == "sqrt":
        try:
            return arg.sqrt()
        except ValueError as exc:
            raise CoefficientEnclosureError(str(exc)) from exc
    return getattr(arg, node.func)()


@dataclass(frozen=True)
class Expression:
    """A parsed expression, evaluable on points and on boxes."""

    source: str
    root: _Node
    dim_required: int

    def point(self, X: np.ndarray) -> np.ndarray:
        """Evaluate on an (n, d) array of points; returns an (n,) array."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] < self.dim_required:
            raise EvaluatorFailure(
                f"expression {self.source!r} needs points with at least"
                f" {self.dim_required} coordinates, got shape {X.shape}"
            )
        with np.errstate(invalid="ignore", divide="ignore"):
            vals = _eval_point(self.root, X)
        vals = np.broadcast_to(np.asarray(vals, dtype=float), (X.shape[0],))
        if np.any(np.isnan(vals)) or np.any(np.isinf(vals)):
            raise EvaluatorFailure(f"expression {self.source!r} produced NaN or inf")
        return np.array(vals)

    def box(self, K: Box) -> Interval:
        """Enclose the expression's range over a box."""
        if K.dim < self.dim_required:
            raise CoefficientEnclosureError(
                f"expression {self.source!r} needs {self.dim_required} axes,"
                f" box has {K.dim}"
            )
        return _eval_box(self.root, K)


def parse_expression(text: str) -> Expression:
    """Parse the coefficient grammar into a dual-use expression.

    Raises:
        ParseError: on any syntax problem, with the offending position.
    """
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty expression")
    root = _Parser(text).parse()
    return Expression(text, root, _max_var(root))
