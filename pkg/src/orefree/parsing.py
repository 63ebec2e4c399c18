"""Expression parser for field elements, skew polynomials and left fractions.

Grammar (usual precedence, ``^`` binds tightest, ``)(`` is multiplication)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/' | <implicit after ')'>) unary)*
    unary  := '-' unary | power
    power  := atom ('^' ['-'] INT)?
    atom   := INT | NAME | NAME '[' ['-'] INT ']' | NAME '(' args ')' | '(' expr ')'

Values are promoted along int -> FieldElem -> SkewPoly -> LeftFraction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from .basefield import FieldDescriptor, FieldElem
from .skewpoly import LeftFraction, SkewPoly, SkewPolyRing


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


@dataclass(frozen=True)
class Tok:
    kind: str  # "int", "name", "op", "end"
    text: str
    col: int


def tokenize(src: str, line: int = 1, col0: int = 1) -> List[Tok]:
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1):
            out.append(Tok("int", m.group(1), col0 + start))
        elif m.group(2):
            out.append(Tok("name", m.group(2), col0 + start))
        elif m.group(3):
            ch = m.group(3)
            if ch not in "+-*/^()[],":
                raise ParseError(f"unexpected character {ch!r}", line, col0 + start)
            out.append(Tok("op", ch, col0 + start))
        pos = m.end()
    out.append(Tok("end", "", col0 + len(src.rstrip())))
    return out


# AST nodes are tuples: (kind, col, ...)

class _Parser:
    def __init__(self, src: str, line: int, col0: int):
        self.toks = tokenize(src, line, col0)
        self.i = 0
        self.line = line

    def peek(self) -> Tok:
        return self.toks[self.i]

    def next(self) -> Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Optional[Tok] = None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok.col)

    def expect(self, text: str) -> Tok:
        t = self.peek()
        if t.kind != "op" or t.text != text:
            self.error(f"expected {text!r}, found {t.text or 'end of input'!r}")
        return self.next()

    def parse(self):
        node = self.expr()
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.next()
            node = ("bin", op.col, op.text, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while True:
            t = self.peek()
            if t.kind == "op" and t.text in "*/":
                self.next()
                node = ("bin", t.col, t.text, node, self.unary())
            elif t.kind == "op" and t.text == "(" and self._prev_closes():
                node = ("bin", t.col, "*", node, self.unary())
            else:
                return node

    def _prev_closes(self) -> bool:
        prev = self.toks[self.i - 1] if self.i else None
        return prev is not None and prev.kind == "op" and prev.text == ")"

    def unary(self):
        t = self.peek()
        if t.kind == "op" and t.text == "-":
            self.next()
            return ("neg", t.col, self.unary())
        if t.kind == "op" and t.text == "+":
            self.next()
            return self.unary()
        return self.power()

    def signed_int(self) -> int:
        sign = 1
        if self.peek().kind == "op" and self.peek().text == "-":
            self.next()
            sign = -1
        t = self.peek()
        if t.kind != "int":
            self.error("expected an integer")
        self.next()
        return sign * int(t.text)

    def power(self):
        node = self.atom()
        t = self.peek()
        if t.kind == "op" and t.text == "^":
            self.next()
            if self.peek().kind == "op" and self.peek().text == "(":
                self.next()
                n = self.signed_int()
                self.expect(")")
            else:
                n = self.signed_int()
            node = ("pow", t.col, node, n)
        return node

    def atom(self):
        t = self.next()
        if t.kind == "int":
            return ("int", t.col, int(t.text))
        if t.kind == "name":
            nt = self.peek()
            if nt.kind == "op" and nt.text == "[":
                self.next()
                idx = self.signed_int()
                self.expect("]")
                return ("var", t.col, t.text, idx)
            if nt.kind == "op" and nt.text == "(":
                self.next()
                args = []
                if not (self.peek().kind == "op" and self.peek().text == ")"):
                    args.append(self.expr())
                    while self.peek().kind == "op" and self.peek().text == ",":
                        self.next()
                        args.append(self.expr())
                self.expect(")")
                return ("call", t.col, t.text, args)
            return ("var", t.col, t.text, None)
        if t.kind == "op" and t.text == "(":
            node = self.expr()
            self.expect(")")
            return node
        self.error(f"unexpected {t.text or 'end of input'!r}", t)


def parse_ast(src: str, line: int = 1, col0: int = 1):
    return _Parser(src, line, col0).parse()


# evaluation -------------------------------------------------------------------

class Evaluator:
    """Evaluate ASTs in a field, optionally inside a skew polynomial ring.

    ``functions`` maps call names to Python callables receiving evaluated
    arguments.
    """

    def __init__(self, field: FieldDescriptor, ring: Optional[SkewPolyRing] = None,
                 functions: Optional[Dict[str, Callable]] = None, line: int = 1):
        self.field = field
        self.ring = ring
        self.functions = dict(functions or {})
        self.line = line

    def err(self, msg: str, col: int):
        raise ParseError(msg, self.line, col)

    # promotion
    def _level(self, v) -> int:
        if isinstance(v, LeftFraction):
            return 3
        if isinstance(v, SkewPoly):
            return 2
        if isinstance(v, FieldElem):
            return 1
        return 0

    def _to_field(self, v) -> FieldElem:
        return self.field.from_int(v) if isinstance(v, int) else v

    def _to_poly(self, v) -> SkewPoly:
        if isinstance(v, SkewPoly):
            return v
        return self.ring.const(self._to_field(v))

    def _to_frac(self, v) -> LeftFraction:
        if isinstance(v, LeftFraction):
            return v
        return LeftFraction.from_poly(self._to_poly(v))

    def _lift(self, a, b):
        lv = max(self._level(a), self._level(b), 1)
        conv = {1: self._to_field, 2: self._to_poly, 3: self._to_frac}[lv]
        return conv(a), conv(b)

    def eval(self, node):
        kind, col = node[0], node[1]
        try:
            if kind == "int":
                return self.field.from_int(node[2])
            if kind == "var":
                return self._var(node[2], node[3], col)
            if kind == "neg":
                return -self._promote_self(self.eval(node[2]))
            if kind == "pow":
                return self._pow(self.eval(node[2]), node[3], col)
            if kind == "call":
                fn = self.functions.get(node[2])
                if fn is None:
                    self.err(f"unknown function {node[2]!r}", col)
                return fn(*[self.eval(a) for a in node[3]])
            if kind == "bin":
                a, b = self.eval(node[3]), self.eval(node[4])
                op = node[2]
                if op == "/":
                    return self._div(a, b, col)
                a, b = self._lift(a, b)
                if op == "+":
                    return a + b
                if op == "-":
                    return a - b
                return a * b
        except ParseError:
            raise
        except ZeroDivisionError as exc:
            self.err(f"division by zero ({exc})", col)
        except (KeyError, ValueError, TypeError, ArithmeticError) as exc:
            msg = exc.args[0] if exc.args else str(exc)
            self.err(str(msg), col)
        self.err(f"cannot evaluate node {kind}", col)

    def _promote_self(self, v):
        return self._to_field(v) if isinstance(v, int) else v

    def _var(self, name: str, idx: Optional[int], col: int):
        f = self.field
        if self.ring is not None and name == self.ring.var and idx is None:
            return self.ring.gen()
        if f.ext_degree > 1 and name == f.gen and idx is None:
            return f.gen_const()
        if name in f.families and idx is None:
            self.err(f"family {name} needs an index, e.g. {name}[0]", col)
        try:
            return f.var(name, idx)
        except KeyError as exc:
            self.err(str(exc.args[0]), col)

    def _pow(self, a, n: int, col: int):
        a = self._promote_self(a)
        if n >= 0:
            if isinstance(a, FieldElem):
                return a ** n
            out = (self._to_frac(1) if isinstance(a, LeftFraction) else self._to_poly(1))
            for _ in range(n):
                out = out * a
            return out
        if isinstance(a, FieldElem):
            return a.inverse() ** (-n)
        if isinstance(a, SkewPoly) and self.ring.laurent and len(a.coeffs) == 1:
            (k, c), = a.coeffs.items()
            if c.is_one():
                return self.ring.gen(k * n)
        inv = self._to_frac(a).inverse()
        out = inv
        for _ in range(-n - 1):
            out = out * inv
        return out

    def _div(self, a, b, col: int):
        a, b = self._promote_self(a), self._promote_self(b)
        if self._level(b) <= 1:
            if not b:
                self.err("division by zero", col)
            if self._level(a) <= 1:
                return a / b
            return a * self._to_poly(b.inverse()) if isinstance(a, SkewPoly) else a * self._to_frac(b.inverse())
        if self.ring is None:
            self.err("cannot divide by a skew polynomial outside a ring", col)
        return self._to_frac(a) * self._to_frac(b).inverse()


def evaluate(src: str, field: FieldDescriptor, ring: Optional[SkewPolyRing] = None,
             functions: Optional[Dict[str, Callable]] = None, line: int = 1, col0: int = 1):
    node = parse_ast(src, line, col0)
    val = Evaluator(field, ring, functions, line).eval(node)
    if isinstance(val, int):
        val = field.from_int(val)
    return val


def parse_field_elem(src: str, field: FieldDescriptor, line: int = 1, col0: int = 1) -> FieldElem:
    val = evaluate(src, field, None, None, line, col0)
    if not isinstance(val, FieldElem):
        raise ParseError("expected a field element", line, col0)
    return val


def parse_skew(src: str, ring: SkewPolyRing, line: int = 1, col0: int = 1):
    """A SkewPoly when the expression is polynomial, else a LeftFraction."""
    val = evaluate(src, ring.field, ring, None, line, col0)
    if isinstance(val, FieldElem):
        return ring.const(val)
    return val


def split_fraction_ast(node) -> Tuple[object, Optional[object]]:
    """(A, B) when node is A * B^-1 or A / B, else (node, None)."""
    if node[0] == "bin" and node[2] == "/":
        return node[3], node[4]
    if node[0] == "bin" and node[2] == "*":
        right = node[4]
        if right[0] == "pow" and right[3] == -1:
            return node[3], right[2]
    return node, None
