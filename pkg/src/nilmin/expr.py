"""Parser and jet evaluator for closed-form Gauss maps.

The input language is deliberately tiny: decimal numbers, the variables
z, zbar, x, y (and s for real curvature profiles), the unit j, the
operators + - * / ^ (integer exponents, right-associative), and the
calls conj, exp, sinh, cosh, re, im.  A leading minus binds looser than
addition, so "-a+b" parses as neg(a+b).

Evaluation produces second-order jets in (z, zbar); x and y expand as
(z+zbar)/2 and j(z-zbar)/2.
"""
from __future__ import annotations

import re as _re

from .errors import EvalError, LexError, NullDivisor, ParseError
from .paracomplex import J, Jet2, Paracomplex

__all__ = ["tokenize", "parse", "parse_text", "eval_jet", "eval_real", "render", "Token", "Node"]

_FUNCTIONS = ("conj", "exp", "sinh", "cosh", "re", "im")
_MAX_EXPONENT = 64

_NUMBER_RE = _re.compile(r"\d+(?:\.\d*)?(?:[eE][+-]?\d+)?")
_IDENT_RE = _re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class Token:
    __slots__ = ("kind", "text", "position")

    def __init__(self, kind, text, position):
        self.kind = kind
        self.text = text
        self.position = position

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.position})"


class Node:
    """AST node; children is a tuple of Nodes, value holds literals/names."""

    __slots__ = ("kind", "children", "value", "position")

    def __init__(self, kind, children=(), value=None, position=0):
        self.kind = kind
        self.children = tuple(children)
        self.value = value
        self.position = position

    def __repr__(self):
        if self.kind in ("const", "var", "pow", "call"):
            return f"Node({self.kind}, {self.value!r}, {list(self.children)})"
        return f"Node({self.kind}, {list(self.children)})"

    def __eq__(self, other):
        if not isinstance(other, Node):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.value == other.value
            and self.children == other.children
        )

    def __hash__(self):
        return hash((self.kind, self.value, self.children))


def tokenize(src):
    tokens = []
    i = 0
    n = len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit():
            m = _NUMBER_RE.match(src, i)
            tokens.append(Token("number", m.group(), i))
            i = m.end()
            continue
        if c.isalpha() or c == "_":
            m = _IDENT_RE.match(src, i)
            tokens.append(Token("ident", m.group(), i))
            i = m.end()
            continue
        if c in "+-*/^":
            tokens.append(Token("op", c, i))
            i += 1
            continue
        if c == "(":
            tokens.append(Token("lparen", c, i))
            i += 1
            continue
        if c == ")":
            tokens.append(Token("rparen", c, i))
            i += 1
            continue
        if c == ",":
            tokens.append(Token("comma", c, i))
            i += 1
            continue
        raise LexError(f"unrecognized character {c!r}", i)
    return tokens


class _Parser:
    def __init__(self, tokens, src_len):
        self.tokens = tokens
        self.pos = 0
        self.src_len = src_len

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        t = self.peek()
        if t is not None:
            self.pos += 1
        return t

    def here(self):
        t = self.peek()
        return t.position if t is not None else self.src_len

    def fail(self, expected):
        raise ParseError(f"expected {expected}", self.here(), expected)

    def expect(self, kind, text=None):
        t = self.peek()
        if t is None or t.kind != kind or (text is not None and t.text != text):
            self.fail(text or kind)
        return self.next()

    # expression := ['-'] additive
    def expression(self):
        t = self.peek()
        if t is not None and t.kind == "op" and t.text == "-":
            pos = t.position
            self.next()
            return Node("neg", [self.additive()], position=pos)
        return self.additive()

    def additive(self):
        node = self.term()
        while True:
            t = self.peek()
            if t is not None and t.kind == "op" and t.text in "+-":
                self.next()
                rhs = self.term()
                kind = "add" if t.text == "+" else "sub"
                node = Node(kind, [node, rhs], position=node.position)
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            t = self.peek()
            if t is not None and t.kind == "op" and t.text in "*/":
                self.next()
                rhs = self.factor()
                kind = "mul" if t.text == "*" else "div"
                node = Node(kind, [node, rhs], position=node.position)
            else:
                return node

    def factor(self):
        base = self.atom()
        t = self.peek()
        if t is not None and t.kind == "op" and t.text == "^":
            self.next()
            exponent = self.exponent()
            return Node("pow", [base], value=exponent, position=base.position)
        return base

    def exponent(self):
        sign = 1
        t = self.peek()
        if t is not None and t.kind == "op" and t.text == "-":
            self.next()
            sign = -1
        t = self.peek()
        if t is None or t.kind != "number" or not t.text.isdigit():
            self.fail("integer exponent")
        self.next()
        value = sign * int(t.text)
        if abs(value) > _MAX_EXPONENT:
            raise ParseError(f"exponent magnitude exceeds {_MAX_EXPONENT}", t.position)
        return value

    def atom(self):
        t = self.peek()
        if t is None:
            self.fail("expression")
        if t.kind == "number":
            self.next()
            return Node("const", value=float(t.text), position=t.position)
        if t.kind == "ident":
            self.next()
            name = t.text
            nxt = self.peek()
            if nxt is not None and nxt.kind == "lparen":
                if name not in _FUNCTIONS:
                    raise ParseError(f"unknown function {name!r}", t.position)
                self.next()
                arg = self.expression()
                self.expect("rparen")
                return Node("call", [arg], value=name, position=t.position)
            if name == "j":
                return Node("j", position=t.position)
            if name in ("z", "zbar", "x", "y", "s"):
                return Node("var", value=name, position=t.position)
            raise ParseError(f"unknown identifier {name!r}", t.position)
        if t.kind == "lparen":
            self.next()
            node = self.expression()
            self.expect("rparen")
            return node
        self.fail("expression")


def parse(tokens, src_len=None):
    if src_len is None:
        src_len = tokens[-1].position + len(tokens[-1].text) if tokens else 0
    p = _Parser(tokens, src_len)
    node = p.expression()
    if p.peek() is not None:
        raise ParseError(f"unexpected token {p.peek().text!r}", p.here())
    return node


def parse_text(src):
    return parse(tokenize(src), len(src))


def render(node):
    """Fully parenthesized text that re-parses to an identical AST."""
    k = node.kind
    if k == "const":
        return repr(node.value)
    if k == "var":
        return node.value
    if k == "j":
        return "j"
    if k == "neg":
        return f"-({render(node.children[0])})"
    if k in ("add", "sub", "mul", "div"):
        op = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[k]
        return f"(({render(node.children[0])}){op}({render(node.children[1])}))"
    if k == "pow":
        return f"({render(node.children[0])})^{node.value}"
    if k == "call":
        return f"{node.value}({render(node.children[0])})"
    raise ValueError(f"unknown node kind {k!r}")


def _eval_jet_node(node, env):
    k = node.kind
    try:
        if k == "const":
            return Jet2.const(node.value)
        if k == "j":
            return Jet2.const(J)
        if k == "var":
            if node.value not in env:
                raise EvalError(f"variable {node.value!r} not available here", node.position)
            return env[node.value]
        if k == "neg":
            return -_eval_jet_node(node.children[0], env)
        if k in ("add", "sub", "mul", "div"):
            a = _eval_jet_node(node.children[0], env)
            b = _eval_jet_node(node.children[1], env)
            if k == "add":
                return a + b
            if k == "sub":
                return a - b
            if k == "mul":
                return a * b
            return a / b
        if k == "pow":
            return _eval_jet_node(node.children[0], env) ** node.value
        if k == "call":
            a = _eval_jet_node(node.children[0], env)
            name = node.value
            if name == "conj":
                return a.conj()
            if name == "exp":
                return a.exp()
            if name == "sinh":
                return a.sinh()
            if name == "cosh":
                return a.cosh()
            if name == "re":
                return 0.5 * (a + a.conj())
            if name == "im":
                return Jet2.const(J) * (0.5 * (a - a.conj()))
    except NullDivisor as exc:
        raise EvalError(f"null divisor in expression: {exc}", node.position) from exc
    raise EvalError(f"unknown node kind {k!r}", node.position)


def eval_jet(ast, z0):
    """Second-order jet of the expression at the domain point z0."""
    z0 = z0 if isinstance(z0, Paracomplex) else Paracomplex(z0, 0.0)
    zj = Jet2.var_z(z0)
    zbj = Jet2.var_zbar(z0)
    env = {
        "z": zj,
        "zbar": zbj,
        "x": 0.5 * (zj + zbj),
        "y": Jet2.const(J) * (0.5 * (zj - zbj)),
    }
    return _eval_jet_node(ast, env)


def _eval_real_node(node, s):
    import math

    k = node.kind
    if k == "const":
        return node.value
    if k == "var":
        if node.value != "s":
            raise EvalError(f"variable {node.value!r} not allowed in a real profile", node.position)
        return s
    if k == "j":
        raise EvalError("unit j not allowed in a real profile", node.position)
    if k == "neg":
        return -_eval_real_node(node.children[0], s)
    if k in ("add", "sub", "mul", "div"):
        a = _eval_real_node(node.children[0], s)
        b = _eval_real_node(node.children[1], s)
        if k == "add":
            return a + b
        if k == "sub":
            return a - b
        if k == "mul":
            return a * b
        if b == 0.0:
            raise EvalError("division by zero in real profile", node.position)
        return a / b
    if k == "pow":
        return _eval_real_node(node.children[0], s) ** node.value
    if k == "call":
        a = _eval_real_node(node.children[0], s)
        name = node.value
        if name in ("conj", "re"):
            return a
        if name == "im":
            return 0.0
        return getattr(math, name)(a)
    raise EvalError(f"unknown node kind {k!r}", node.position)


def eval_real(ast, s):
    """Evaluate a real-valued profile expression (variable s only)."""
    return float(_eval_real_node(ast, float(s)))
