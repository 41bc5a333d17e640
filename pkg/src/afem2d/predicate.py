"""Boundary predicates such as ``"x==1"`` or ``"x>0.99 & y<0.5"``.

Grammar (lowest precedence first)::

    expr    := and ( ("|" | "||") and )*
    and     := cmp ( ("&" | "&&") cmp )*
    cmp     := arith ( ("==" | "~=" | "!=" | "<" | ">" | "<=" | ">=") arith )?
    arith   := term ( ("+" | "-") term )*
    term    := unary ( ("*" | "/") unary )*
    unary   := "-" unary | "+" unary | atom
    atom    := NUMBER | "x" | "y" | "(" expr ")"

Predicates are evaluated on numpy arrays of coordinates. ``==`` compares
with a relative tolerance so that "x==1" matches edge midpoints computed in
floating point.
"""

import re
from dataclasses import dataclass

import numpy as np

EQ_TOL = 1e-9

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)"
    r"|(?P<op>==|~=|!=|<=|>=|&&|\|\||[-+*/()<>&|]))"
)

_COMPARISONS = ("==", "~=", "!=", "<", ">", "<=", ">=")


class PredicateSyntaxError(ValueError):
    """Raised when a predicate string cannot be parsed.

    ``pos`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message, text, pos):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise PredicateSyntaxError(f"unexpected character {text[bad]!r}", text, bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise PredicateSyntaxError(message, self.text, tok[2])

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.conj()
        while self.peek()[1] in ("|", "||"):
            self.take()
            node = BinOp("|", node, self.conj())
        return node

    def conj(self):
        node = self.cmp()
        while self.peek()[1] in ("&", "&&"):
            self.take()
            node = BinOp("&", node, self.cmp())
        return node

    def cmp(self):
        node = self.arith()
        if self.peek()[0] == "op" and self.peek()[1] in _COMPARISONS:
            op = self.take()[1]
            op = "!=" if op == "~=" else op
            node = BinOp(op, node, self.arith())
        return node

    def arith(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.atom()

    def atom(self):
        tok = self.take()
        kind, value, _ = tok
        if kind == "num":
            return Num(float(value))
        if kind == "name":
            if value not in ("x", "y"):
                self.error(f"unknown identifier {value!r}", tok)
            return Var(value)
        if value == "(":
            node = self.expr()
            if self.peek()[1] != ")":
                self.error("expected ')'")
            self.take()
            return node
        if kind == "end":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected token {value!r}", tok)


def _is_boolean(node):
    return isinstance(node, BinOp) and node.op in _COMPARISONS + ("&", "|", "!=")


class BoundaryPredicate:
    """A parsed predicate in the coordinates ``x`` and ``y``."""

    def __init__(self, text, tree):
        self.text = text
        self.tree = tree

    def __repr__(self):
        return f"BoundaryPredicate({self.text!r})"

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = self._eval(self.tree, {"x": x, "y": y})
        return np.broadcast_to(out, np.broadcast(x, y).shape).astype(bool)

    def _eval(self, node, env):
        if isinstance(node, Num):
            return node.value
        if isinstance(node, Var):
            return env[node.name]
        if isinstance(node, Neg):
            return -self._eval(node.operand, env)
        a = self._eval(node.left, env)
        b = self._eval(node.right, env)
        op = node.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if np.any(np.asarray(b) == 0):
                raise ZeroDivisionError(f"division by zero evaluating {self.text!r}")
            return a / b
        if op in ("==", "!="):
            close = np.abs(a - b) <= EQ_TOL * np.maximum(1.0, np.abs(b))
            return close if op == "==" else ~close
        if op == "<":
            return a < b
        if op == ">":
            return a > b
        if op == "<=":
            return a <= b
        if op == ">=":
            return a >= b
        if op == "&":
            return np.logical_and(a, b)
        if op == "|":
            return np.logical_or(a, b)
        raise AssertionError(op)


def parse_boundary_predicate(text):
    """Parse `text` into a :class:`BoundaryPredicate`.

    >>> parse_boundary_predicate("x>0.99")(1.0, 0.5)
    array(True)
    """
    if not isinstance(text, str) or not text.strip():
        raise PredicateSyntaxError("empty predicate", str(text), 0)
    tree = _Parser(text).parse()
    if not _is_boolean(tree):
        raise PredicateSyntaxError("predicate must be a comparison", text, 0)
    return BoundaryPredicate(text, tree)
