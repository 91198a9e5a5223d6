"""Coordinate expression trees: parsing, printing, structural differentiation.

The grammar is deliberately small. Identifiers are chart coordinates, the
constants ``pi`` and ``e``, or one of the unary functions ``sqrt``, ``sin``,
``cos``, ``exp``. Powers require an integer exponent, so the tree stays
closed under differentiation (the derivative of ``sqrt`` reuses ``sqrt``,
everything else is polynomial in existing nodes).

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom (('^' | '**') factor)?
    atom   := NUMBER | 'pi' | 'e' | FUNC '(' expr ')' | COORD | '(' expr ')'
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParseError, UnknownIdentifierError

FUNCTIONS = ("sqrt", "sin", "cos", "exp")
CONSTANTS = {"pi": math.pi, "e": math.e}


@dataclass(frozen=True)
class Lit:
    value: float


@dataclass(frozen=True)
class Coord:
    index: int
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or one of FUNCTIONS
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # one of + - * /
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Lit | Coord | Unary | Binary | Pow


# Smart constructors. They fold the zeros and ones that structural
# differentiation generates, so derivative trees stay readable; they do
# no other simplification.

def lit(v: float) -> Lit:
    return Lit(float(v))


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Lit) and a.value == 0.0:
        return b
    if isinstance(b, Lit) and b.value == 0.0:
        return a
    if isinstance(a, Lit) and isinstance(b, Lit):
        return lit(a.value + b.value)
    return Binary("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(b, Lit) and b.value == 0.0:
        return a
    if isinstance(a, Lit) and isinstance(b, Lit):
        return lit(a.value - b.value)
    if isinstance(a, Lit) and a.value == 0.0:
        return neg(b)
    return Binary("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Lit):
        if a.value == 0.0:
            return lit(0.0)
        if a.value == 1.0:
            return b
    if isinstance(b, Lit):
        if b.value == 0.0:
            return lit(0.0)
        if b.value == 1.0:
            return a
    if isinstance(a, Lit) and isinstance(b, Lit):
        return lit(a.value * b.value)
    return Binary("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Lit) and a.value == 0.0:
        return lit(0.0)
    if isinstance(b, Lit) and b.value == 1.0:
        return a
    return Binary("/", a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Lit):
        return lit(-a.value)
    if isinstance(a, Unary) and a.op == "neg":
        return a.arg
    return Unary("neg", a)


def pow_int(base: Expr, k: int) -> Expr:
    if k == 0:
        return lit(1.0)
    if k == 1:
        return base
    return Pow(base, k)


# ---------------------------------------------------------------------------
# Tokenizer

_TOK_NUM = "num"
_TOK_IDENT = "ident"
_TOK_OP = "op"
_TOK_END = "end"


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks: list[tuple[str, str, int]] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
                else:
                    raise ParseError("malformed number literal", i)
            toks.append((_TOK_NUM, text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append((_TOK_IDENT, text[i:j], i))
            i = j
            continue
        if text.startswith("**", i):
            toks.append((_TOK_OP, "^", i))
            i += 2
            continue
        if ch in "+-*/^()":
            toks.append((_TOK_OP, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    toks.append((_TOK_END, "", n))
    return toks


class _Parser:
    def __init__(self, text: str, coords: tuple[str, ...]):
        self.text = text
        self.coords = coords
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def advance(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, val, off = self.peek()
        if kind != _TOK_OP or val != op:
            raise ParseError(f"expected {op!r}", off)
        return self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, off = self.peek()
        if kind != _TOK_END:
            raise ParseError(f"unexpected trailing input {val!r}", off)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == _TOK_OP and val in "+-":
                self.advance()
                rhs = self.term()
                e = Binary(val, e, rhs)
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == _TOK_OP and val in "*/":
                self.advance()
                rhs = self.factor()
                e = Binary(val, e, rhs)
            else:
                return e

    def factor(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == _TOK_OP and val == "-":
            self.advance()
            return Unary("neg", self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, val, off = self.peek()
        if kind == _TOK_OP and val == "^":
            self.advance()
            # Exponent is parsed at factor level (binds tighter than '*',
            # and a further '^' nests to the right), then must fold to an
            # integer constant.
            exponent = self.factor()
            k = _const_eval(exponent)
            if k is None or k != int(k):
                raise ParseError("exponent must be an integer constant", off)
            return Pow(base, int(k))
        return base

    def atom(self) -> Expr:
        kind, val, off = self.advance()
        if kind == _TOK_NUM:
            return Lit(float(val))
        if kind == _TOK_IDENT:
            if val in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Unary(val, arg)
            if val in CONSTANTS:
                return Lit(CONSTANTS[val])
            if val in self.coords:
                return Coord(self.coords.index(val), val)
            raise UnknownIdentifierError(val, self.coords, off)
        if kind == _TOK_OP and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ParseError(
            "expected a number, identifier or parenthesized expression", off
        )


def _const_eval(e: Expr) -> float | None:
    """Value of a coordinate-free subtree, or None if it has coordinates."""
    match e:
        case Lit(v):
            return v
        case Coord():
            return None
        case Unary("neg", a):
            v = _const_eval(a)
            return None if v is None else -v
        case Unary(op, a):
            v = _const_eval(a)
            return None if v is None else getattr(math, op)(v)
        case Binary(op, a, b):
            va, vb = _const_eval(a), _const_eval(b)
            if va is None or vb is None:
                return None
            if op == "+":
                return va + vb
            if op == "-":
                return va - vb
            if op == "*":
                return va * vb
            return va / vb
        case Pow(a, k):
            v = _const_eval(a)
            return None if v is None else v**k
    return None


def parse_expr(text: str, coords) -> Expr:
    """Parse `text` over the named chart coordinates.

    Raises ParseError with a byte offset on malformed input, and
    UnknownIdentifierError naming the known coordinates when an identifier
    is not recognized.
    """
    return _Parser(text, tuple(coords)).parse()


# ---------------------------------------------------------------------------
# Printing

_PREC = {"+": 10, "-": 10, "*": 20, "/": 20, "neg": 25, "pow": 30, "atom": 99}


def _fmt_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def pretty(e: Expr) -> str:
    """Render with minimal parentheses; parse(pretty(e)) == e structurally."""

    def go(node: Expr, parent_prec: int) -> str:
        match node:
            case Lit(v):
                s = _fmt_number(v)
                # A negative literal behaves like a negation node.
                return f"({s})" if v < 0 and parent_prec > _PREC["neg"] else s
            case Coord(_, name):
                return name
            case Unary("neg", a):
                s = "-" + go(a, _PREC["neg"])
                return f"({s})" if parent_prec > _PREC["neg"] else s
            case Unary(op, a):
                return f"{op}({go(a, 0)})"
            case Binary(op, a, b):
                prec = _PREC[op]
                s = f"{go(a, prec)} {op} {go(b, prec + 1)}"
                return f"({s})" if parent_prec > prec else s
            case Pow(a, k):
                s = f"{go(a, _PREC['pow'] + 1)}^{k}"
                return f"({s})" if parent_prec > _PREC["pow"] else s
        raise TypeError(f"not an Expr: {node!r}")

    return go(e, 0)


# ---------------------------------------------------------------------------
# Differentiation

def diff(e: Expr, i: int) -> Expr:
    """Partial derivative with respect to coordinate index `i`.

    Purely structural; the result is another tree in the same grammar.
    """
    match e:
        case Lit():
            return lit(0.0)
        case Coord(j, _):
            return lit(1.0 if j == i else 0.0)
        case Unary("neg", a):
            return neg(diff(a, i))
        case Unary("sqrt", a):
            return div(diff(a, i), mul(lit(2.0), Unary("sqrt", a)))
        case Unary("sin", a):
            return mul(Unary("cos", a), diff(a, i))
        case Unary("cos", a):
            return neg(mul(Unary("sin", a), diff(a, i)))
        case Unary("exp", a):
            return mul(Unary("exp", a), diff(a, i))
        case Binary("+", a, b):
            return add(diff(a, i), diff(b, i))
        case Binary("-", a, b):
            return sub(diff(a, i), diff(b, i))
        case Binary("*", a, b):
            return add(mul(diff(a, i), b), mul(a, diff(b, i)))
        case Binary("/", a, b):
            return div(sub(mul(diff(a, i), b), mul(a, diff(b, i))), mul(b, b))
        case Pow(a, k):
            return mul(mul(lit(float(k)), pow_int(a, k - 1)), diff(a, i))
    raise TypeError(f"not an Expr: {e!r}")
