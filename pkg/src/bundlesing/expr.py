"""Formula parsing and evaluation.

Formulas are smooth scalar functions of a fixed list of coordinates, e.g.
``"y^4 + x*y + z + z*y^2"`` over ``("x", "y", "z")``. Grammar (see
``docs/grammar.md``)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom [("^" | "**") exponent]
    exponent := ["-"] INTEGER | "(" ["-"] INTEGER ")"
    atom   := NUMBER | COORD | FUNC "(" expr ")" | "(" expr ")"

so ``-x^2`` is ``-(x^2)`` and ``2*-x`` is legal. Chained powers must be
parenthesised. FUNC is one of ``sin cos exp log sqrt neg``.

Parsed trees are immutable and are evaluated as written, with no
simplification, either to plain floats (:meth:`Expression.evaluate`) or to
truncated Taylor jets (:meth:`Expression.jet`).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from . import jets as J
from .errors import DomainError, ParseError

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "neg")
BINARY_OPS = ("+", "-", "*", "/")


# -- AST ----------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int
    name: str = field(compare=False, default="")
    pos: int = field(compare=False, default=-1)


@dataclass(frozen=True)
class Const:
    value: float
    pos: int = field(compare=False, default=-1)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    pos: int = field(compare=False, default=-1)


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int
    pos: int = field(compare=False, default=-1)


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"
    pos: int = field(compare=False, default=-1)


Node = Union[Var, Const, BinOp, Pow, Call]


# -- lexer --------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\*\*|[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "ident" | "op" | "end"
    text: str
    pos: int


def tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            tokens.append(_Token(kind, "^" if tok == "**" else tok, pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


# -- parser -------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, coords: Sequence[str]):
        self.text = text
        self.coords = {name: i for i, name in enumerate(coords)}
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, pos: int | None = None) -> ParseError:
        return ParseError(message, self.tok.pos if pos is None else pos, self.text)

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Token:
        if self.tok.text != text or self.tok.kind != "op":
            if text == ")":
                raise self.error("unbalanced parentheses: expected ')'")
            raise self.error(f"expected {text!r}")
        return self.advance()

    def parse(self) -> Node:
        if self.tok.kind == "end":
            raise self.error("empty formula")
        node = self.expr()
        if self.tok.kind != "end":
            if self.tok.text == ")":
                raise self.error("unbalanced parentheses: unmatched ')'")
            raise self.error(f"unexpected token {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            t = self.advance()
            node = BinOp(t.text, node, self.term(), pos=t.pos)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            t = self.advance()
            node = BinOp(t.text, node, self.unary(), pos=t.pos)
        return node

    def unary(self) -> Node:
        if self.tok.kind == "op" and self.tok.text == "-":
            t = self.advance()
            return Call("neg", self.unary(), pos=t.pos)
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            t = self.advance()
            exponent = self.exponent()
            if self.tok.kind == "op" and self.tok.text == "^":
                raise self.error("chained powers are ambiguous; add parentheses")
            return Pow(base, exponent, pos=t.pos)
        return base

    def exponent(self) -> int:
        paren = self.tok.kind == "op" and self.tok.text == "("
        if paren:
            self.advance()
        sign = 1
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            sign = -1
        if self.tok.kind != "number" or not self.tok.text.isdigit():
            raise self.error("exponent must be an integer literal")
        value = sign * int(self.advance().text)
        if paren:
            self.expect(")")
        return value

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Const(float(t.text), pos=t.pos)
        if t.kind == "ident":
            self.advance()
            if t.text in FUNCTIONS:
                return self.call(t)
            if t.text in self.coords:
                return Var(self.coords[t.text], t.text, pos=t.pos)
            raise self.error(f"unknown identifier {t.text!r}", t.pos)
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "end":
            raise self.error("unexpected end of input")
        if t.text == ")":
            raise self.error("unbalanced parentheses: unmatched ')'")
        raise self.error(f"unexpected token {t.text!r}")

    def call(self, name: _Token) -> Node:
        if not (self.tok.kind == "op" and self.tok.text == "("):
            raise self.error(f"function {name.text!r} must be followed by '('")
        open_pos = self.advance().pos
        if self.tok.kind == "op" and self.tok.text == ")":
            raise self.error(f"{name.text}() takes exactly 1 argument, got 0", open_pos)
        arg = self.expr()
        if self.tok.kind == "op" and self.tok.text == ",":
            raise self.error(f"{name.text}() takes exactly 1 argument")
        if self.tok.kind == "end":
            raise self.error(f"unbalanced parentheses: '(' at {open_pos} never closed")
        self.expect(")")
        return Call(name.text, arg, pos=name.pos)


# -- printing -------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Call) and node.func == "neg":
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def _format_const(value: float) -> str:
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def to_text(node: Node, coords: Sequence[str]) -> str:
    """Render ``node`` with the minimal parentheses that reparse to the same tree."""

    def wrap(child: Node, min_prec: int) -> str:
        s = go(child)
        return f"({s})" if _prec(child) < min_prec else s

    def go(n: Node) -> str:
        if isinstance(n, Var):
            return coords[n.index]
        if isinstance(n, Const):
            return _format_const(n.value)
        if isinstance(n, BinOp):
            p = _PREC[n.op]
            sep = f" {n.op} " if p == 1 else n.op
            return wrap(n.left, p) + sep + wrap(n.right, p + 1)
        if isinstance(n, Pow):
            return f"{wrap(n.base, 5)}^{n.exponent}"
        if n.func == "neg":
            return "-" + wrap(n.arg, 3)
        return f"{n.func}({go(n.arg)})"

    return go(node)


# -- evaluation -----------------------------------------------------------------


def _jet_eval(node: Node, seeds: Sequence[J.Jet]) -> J.Jet:
    if isinstance(node, Var):
        return seeds[node.index]
    if isinstance(node, Const):
        s = seeds[0]
        return J.Jet.constant(node.value, s.nvars, s.order)
    if isinstance(node, BinOp):
        # constant operands stay scalars: cheaper than building constant jets
        if isinstance(node.right, Const) and node.op != "/":
            a = _jet_eval(node.left, seeds)
            c = node.right.value
            return a + c if node.op == "+" else a - c if node.op == "-" else a * c
        if isinstance(node.left, Const) and node.op != "/":
            b = _jet_eval(node.right, seeds)
            c = node.left.value
            return c + b if node.op == "+" else c - b if node.op == "-" else b * c
        a = _jet_eval(node.left, seeds)
        b = _jet_eval(node.right, seeds)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    if isinstance(node, Pow):
        base = _jet_eval(node.base, seeds)
        if node.exponent < 0 and abs(base.value) <= J.DIV_EPSILON:
            raise DomainError(f"negative power of a value near zero ({base.value!r})")
        return base**node.exponent
    return J.compose(node.func, _jet_eval(node.arg, seeds))


def _scalar_eval(node: Node, values: Sequence, lib) -> object:
    if isinstance(node, Var):
        return values[node.index]
    if isinstance(node, Const):
        return lib.mpf(node.value) if hasattr(lib, "mpf") else node.value
    if isinstance(node, BinOp):
        a = _scalar_eval(node.left, values, lib)
        b = _scalar_eval(node.right, values, lib)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if abs(b) <= J.DIV_EPSILON:
            raise DomainError(f"division by a value near zero ({float(b)!r})")
        return a / b
    if isinstance(node, Pow):
        base = _scalar_eval(node.base, values, lib)
        if node.exponent < 0 and abs(base) <= J.DIV_EPSILON:
            raise DomainError(f"negative power of a value near zero ({float(base)!r})")
        return base**node.exponent
    a = _scalar_eval(node.arg, values, lib)
    if node.func == "neg":
        return -a
    if node.func == "log" and a <= 0:
        raise DomainError(f"log of non-positive value {float(a)!r}")
    if node.func == "sqrt" and a < 0:
        raise DomainError(f"sqrt of negative value {float(a)!r}")
    return getattr(lib, node.func)(a)


def _variables(node: Node) -> set[int]:
    if isinstance(node, Var):
        return {node.index}
    if isinstance(node, Const):
        return set()
    if isinstance(node, BinOp):
        return _variables(node.left) | _variables(node.right)
    if isinstance(node, Pow):
        return _variables(node.base)
    return _variables(node.arg)


# -- public type ----------------------------------------------------------------


Number = Union[int, float]


def _const_node(value: float) -> Node:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"non-finite constant {value!r}")
    if value < 0 or (value == 0 and math.copysign(1.0, value) < 0):
        return Call("neg", Const(-value))
    return Const(value)


@dataclass(frozen=True)
class Expression:
    """A parsed formula bound to its coordinate names."""

    root: Node
    coords: tuple[str, ...]

    @property
    def num_vars(self) -> int:
        return len(self.coords)

    def __str__(self) -> str:
        return to_text(self.root, self.coords)

    def __repr__(self) -> str:
        return f"Expression({str(self)!r}, coords={self.coords})"

    def jet(self, point: Sequence[float], order: int) -> J.Jet:
        """Order-``order`` Taylor jet of the formula at ``point``."""
        if len(point) != self.num_vars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.num_vars}")
        return _jet_eval(self.root, J.jet_variables(point, order))

    def jet_from(self, seeds: Sequence[J.Jet]) -> J.Jet:
        """Evaluate with caller-supplied input jets (one per coordinate)."""
        if len(seeds) != self.num_vars:
            raise ValueError(f"need {self.num_vars} seed jets, got {len(seeds)}")
        return _jet_eval(self.root, seeds)

    def evaluate(self, point: Sequence, lib=math):
        """Direct evaluation; ``lib`` may be ``mpmath`` for extended precision."""
        if len(point) != self.num_vars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.num_vars}")
        return _scalar_eval(self.root, point, lib)

    __call__ = evaluate

    def variables(self) -> set[int]:
        return _variables(self.root)

    # -- building -------------------------------------------------------------

    @classmethod
    def constant(cls, value: float, coords: Sequence[str]) -> Expression:
        return cls(_const_node(value), tuple(coords))

    @classmethod
    def variable(cls, name: str, coords: Sequence[str]) -> Expression:
        coords = tuple(coords)
        return cls(Var(coords.index(name), name), coords)

    def _other(self, other) -> Node | None:
        if isinstance(other, Expression):
            if other.coords != self.coords:
                raise ValueError("expressions over different coordinates")
            return other.root
        if isinstance(other, (int, float)) and not isinstance(other, bool):
            return _const_node(other)
        return None

    def _bin(self, op: str, other, swap: bool = False):
        o = self._other(other)
        if o is None:
            return NotImplemented
        left, right = (o, self.root) if swap else (self.root, o)
        return Expression(BinOp(op, left, right), self.coords)

    def __add__(self, other):
        return self._bin("+", other)

    def __radd__(self, other):
        return self._bin("+", other, swap=True)

    def __sub__(self, other):
        return self._bin("-", other)

    def __rsub__(self, other):
        return self._bin("-", other, swap=True)

    def __mul__(self, other):
        return self._bin("*", other)

    def __rmul__(self, other):
        return self._bin("*", other, swap=True)

    def __truediv__(self, other):
        return self._bin("/", other)

    def __rtruediv__(self, other):
        return self._bin("/", other, swap=True)

    def __neg__(self):
        return Expression(Call("neg", self.root), self.coords)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        return Expression(Pow(self.root, n), self.coords)

    def apply(self, func: str) -> Expression:
        if func not in FUNCTIONS:
            raise ValueError(f"unknown function {func!r}")
        return Expression(Call(func, self.root), self.coords)

    def substitute(
        self, fixed: Mapping[int, float], coords: Sequence[str] | None = None
    ) -> Expression:
        """Replace coordinates by constants and renumber the remaining ones.

        ``coords`` names the surviving coordinates in order; by default the
        original names minus the fixed ones.
        """
        keep = [i for i in range(self.num_vars) if i not in fixed]
        new_coords = tuple(coords) if coords is not None else tuple(self.coords[i] for i in keep)
        if len(new_coords) != len(keep):
            raise ValueError("coordinate list does not match the surviving variables")
        remap = {old: new for new, old in enumerate(keep)}

        def go(n: Node) -> Node:
            if isinstance(n, Var):
                if n.index in fixed:
                    return _const_node(fixed[n.index])
                return Var(remap[n.index], new_coords[remap[n.index]])
            if isinstance(n, Const):
                return n
            if isinstance(n, BinOp):
                return BinOp(n.op, go(n.left), go(n.right))
            if isinstance(n, Pow):
                return Pow(go(n.base), n.exponent)
            return Call(n.func, go(n.arg))

        return Expression(go(self.root), new_coords)


def parse(text: str, coords: Sequence[str] = ("x", "y", "z")) -> Expression:
    """Parse ``text`` into an :class:`Expression` over ``coords``.

    Raises :class:`~bundlesing.errors.ParseError` carrying the 0-based source
    position of the offending token.
    """
    coords = tuple(coords)
    for name in coords:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise ValueError(f"invalid coordinate name {name!r}")
        if name in FUNCTIONS:
            raise ValueError(f"coordinate name {name!r} shadows a function")
    if len(set(coords)) != len(coords):
        raise ValueError(f"duplicate coordinate names in {coords}")
    return Expression(_Parser(text, coords).parse(), coords)


def eval_jet(e: Expression, p: Sequence[float], order: int) -> J.Jet:
    return e.jet(p, order)
