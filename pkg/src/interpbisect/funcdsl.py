"""A tiny closed expression language for one-variable piecewise functions.

Expressions are built from the variable ``x``, rational constants, the
arithmetic operators, integer powers, and the lattice/metric primitives
``min``/``max``/``abs``.  Everything in the language is continuous except
where a division has a vanishing denominator, so min/max compositions of
polynomials (the shapes the iteration is exercised on) evaluate totally.

Concrete syntax, lowest precedence first::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom ('^' INT)?
    atom   := 'x' | NUMBER | '(' expr ')'
            | ('min' | 'max') '(' expr ',' expr ')' | 'abs' '(' expr ')'

Adjacency is multiplication: ``6x^2`` means ``6*x^2``.  NUMBER covers
integers, exact decimals (``0.25`` -> 1/4, never a binary float), and
integer ratios: ``p/q`` with ``q > 0`` is a single rational constant
unless a ``^`` follows, so ``3/4`` is the constant 3/4 while ``3/4^2``
divides 3 by 4 squared.  A ratio never forms in the right operand of a
division; ``x/2/3`` stays left-associative ``(x/2)/3``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Tuple, Union

__all__ = [
    "Var",
    "RationalConst",
    "Neg",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "Min",
    "Max",
    "Abs",
    "FunctionExpr",
    "ParseError",
    "EvalError",
    "parse",
    "eval_exact",
    "eval_float",
    "to_text",
]


@dataclass(frozen=True)
class Var:
    """The single free variable ``x``."""


@dataclass(frozen=True)
class RationalConst:
    value: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Neg:
    operand: "FunctionExpr"


@dataclass(frozen=True)
class Add:
    left: "FunctionExpr"
    right: "FunctionExpr"


@dataclass(frozen=True)
class Sub:
    left: "FunctionExpr"
    right: "FunctionExpr"


@dataclass(frozen=True)
class Mul:
    left: "FunctionExpr"
    right: "FunctionExpr"


@dataclass(frozen=True)
class Div:
    left: "FunctionExpr"
    right: "FunctionExpr"


@dataclass(frozen=True)
class Pow:
    base: "FunctionExpr"
    exponent: int

    def __post_init__(self) -> None:
        if not isinstance(self.exponent, int) or isinstance(self.exponent, bool):
            raise ValueError("power exponent must be an int")
        if self.exponent < 0:
            raise ValueError("power exponent must be non-negative")


@dataclass(frozen=True)
class Min:
    left: "FunctionExpr"
    right: "FunctionExpr"


@dataclass(frozen=True)
class Max:
    left: "FunctionExpr"
    right: "FunctionExpr"


@dataclass(frozen=True)
class Abs:
    operand: "FunctionExpr"


FunctionExpr = Union[Var, RationalConst, Neg, Add, Sub, Mul, Div, Pow, Min, Max, Abs]


class ParseError(ValueError):
    """Syntax error with a byte offset and the token set that was legal there."""

    def __init__(self, offset: int, expected: frozenset, found: str):
        self.offset = offset
        self.expected = frozenset(expected)
        self.found = found
        choices = ", ".join(sorted(self.expected))
        super().__init__(
            f"syntax error at offset {offset}: found {found}, expected one of: {choices}"
        )


class EvalError(ArithmeticError):
    """Division by zero during evaluation, located by a path of node labels."""

    def __init__(self, x, path: Tuple[str, ...]):
        self.x = x
        self.path = tuple(path)
        where = "/".join(self.path) or "(root)"
        super().__init__(f"division by zero at x = {x} in node {where}")


# ---------------------------------------------------------------------------
# Evaluation


def _evaluate(expr: FunctionExpr, x, lift: Callable[[Fraction], object], path: Tuple[str, ...]):
    if isinstance(expr, Var):
        return x
    if isinstance(expr, RationalConst):
        return lift(expr.value)
    if isinstance(expr, Neg):
        return -_evaluate(expr.operand, x, lift, path + ("Neg",))
    if isinstance(expr, Add):
        return _evaluate(expr.left, x, lift, path + ("Add[0]",)) + _evaluate(
            expr.right, x, lift, path + ("Add[1]",)
        )
    if isinstance(expr, Sub):
        return _evaluate(expr.left, x, lift, path + ("Sub[0]",)) - _evaluate(
            expr.right, x, lift, path + ("Sub[1]",)
        )
    if isinstance(expr, Mul):
        return _evaluate(expr.left, x, lift, path + ("Mul[0]",)) * _evaluate(
            expr.right, x, lift, path + ("Mul[1]",)
        )
    if isinstance(expr, Div):
        num = _evaluate(expr.left, x, lift, path + ("Div[0]",))
        den = _evaluate(expr.right, x, lift, path + ("Div[1]",))
        if den == 0:
            raise EvalError(x, path + ("Div",))
        return num / den
    if isinstance(expr, Pow):
        base = _evaluate(expr.base, x, lift, path + ("Pow",))
        if isinstance(base, float):
            try:
                return base**expr.exponent
            except OverflowError:
                sign = -1.0 if (base < 0 and expr.exponent % 2 == 1) else 1.0
                return sign * math.inf
        return base**expr.exponent
    if isinstance(expr, Min):
        return min(
            _evaluate(expr.left, x, lift, path + ("Min[0]",)),
            _evaluate(expr.right, x, lift, path + ("Min[1]",)),
        )
    if isinstance(expr, Max):
        return max(
            _evaluate(expr.left, x, lift, path + ("Max[0]",)),
            _evaluate(expr.right, x, lift, path + ("Max[1]",)),
        )
    if isinstance(expr, Abs):
        return abs(_evaluate(expr.operand, x, lift, path + ("Abs",)))
    raise TypeError(f"not a function expression: {expr!r}")


def eval_exact(expr: FunctionExpr, x: Fraction) -> Fraction:
    """Evaluate with exact rational arithmetic.

    Raises:
        EvalError: if a denominator is exactly zero at ``x``.
    """
    return _evaluate(expr, Fraction(x), lambda q: q, ())


def eval_float(expr: FunctionExpr, x: float) -> float:
    """Evaluate in IEEE binary64, rounding every operation to nearest.

    Constants round once on entry.  Overflow follows float semantics
    (infinities propagate); only an exactly-zero denominator raises.
    """
    return _evaluate(expr, float(x), float, ())


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<number>\d+\.\d+|\.\d+|\d+)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)

_END = "end of input"


@dataclass(frozen=True)
class _Token:
    kind: str  # 'name', 'int', 'decimal', 'op', 'end'
    text: str
    pos: int

    def describe(self) -> str:
        if self.kind == "end":
            return _END
        return repr(self.text)


def _tokenize(text: str) -> Iterator[_Token]:
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(pos, frozenset({"a token"}), repr(text[pos]))
        pos = match.end()
        if match.lastgroup == "ws":
            continue
        value = match.group()
        if match.lastgroup == "name":
            yield _Token("name", value, match.start())
        elif match.lastgroup == "number":
            kind = "decimal" if "." in value else "int"
            yield _Token(kind, value, match.start())
        else:
            yield _Token("op", value, match.start())
    yield _Token("end", "", len(text))


# ---------------------------------------------------------------------------
# Parser

_CALLS = {"min": Min, "max": Max}

_ATOM_STARTERS = frozenset({"'x'", "a number", "'('", "'min'", "'max'", "'abs'"})


class _Parser:
    """Recursive descent over the grammar in the module docstring."""

    def __init__(self, text: str):
        self.tokens = list(_tokenize(text))
        self.index = 0

    def peek(self, ahead: int = 0) -> _Token:
        i = min(self.index + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> _Token:
        tok = self.tokens[self.index]
        if tok.kind != "end":
            self.index += 1
        return tok

    def fail(self, expected) -> "ParseError":
        tok = self.peek()
        raise ParseError(tok.pos, frozenset(expected), tok.describe())

    def expect_op(self, op: str) -> _Token:
        tok = self.peek()
        if tok.kind == "op" and tok.text == op:
            return self.advance()
        self.fail({f"'{op}'"})

    def at_op(self, *ops: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text in ops

    # Implicit multiplication: a factor beginning right after another
    # factor, with no operator in between.  '-' is excluded so 'a-b'
    # stays subtraction.
    def starts_atom(self) -> bool:
        tok = self.peek()
        if tok.kind in ("int", "decimal"):
            return True
        if tok.kind == "name":
            return tok.text in ("x", "min", "max", "abs")
        return tok.kind == "op" and tok.text == "("

    def parse(self) -> FunctionExpr:
        expr = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            self.fail({"'+'", "'-'", "'*'", "'/'", _END})
        return expr

    def expr(self) -> FunctionExpr:
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> FunctionExpr:
        node = self.factor(allow_ratio=True)
        while True:
            if self.at_op("*", "/"):
                op = self.advance().text
                # A bare 'p/q' reads as one constant only where that
                # cannot change a left-associative chain's value, i.e.
                # never as the right operand of '/'.
                rhs = self.factor(allow_ratio=(op == "*"))
                node = Mul(node, rhs) if op == "*" else Div(node, rhs)
            elif self.starts_atom():
                node = Mul(node, self.factor(allow_ratio=False))
            else:
                return node

    def factor(self, allow_ratio: bool) -> FunctionExpr:
        if self.at_op("-"):
            self.advance()
            return Neg(self.factor(allow_ratio=allow_ratio))
        node = self.atom(allow_ratio=allow_ratio)
        if self.at_op("^"):
            self.advance()
            tok = self.peek()
            if tok.kind != "int":
                self.fail({"a non-negative integer exponent"})
            self.advance()
            node = Pow(node, int(tok.text))
        return node

    def atom(self, allow_ratio: bool) -> FunctionExpr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            # Ratio literal: INT '/' INT with positive denominator, not
            # followed by '^' (so '3/4^2' keeps conventional precedence).
            if (
                allow_ratio
                and self.at_op("/")
                and self.peek(1).kind == "int"
                and int(self.peek(1).text) > 0
                and not (self.peek(2).kind == "op" and self.peek(2).text == "^")
            ):
                self.advance()
                den = self.advance()
                return RationalConst(Fraction(int(tok.text), int(den.text)))
            return RationalConst(Fraction(int(tok.text)))
        if tok.kind == "decimal":
            self.advance()
            # Fraction parses decimal text exactly: '0.1' -> 1/10.
            return RationalConst(Fraction(tok.text))
        if tok.kind == "name":
            if tok.text == "x":
                self.advance()
                return Var()
            if tok.text in _CALLS:
                self.advance()
                self.expect_op("(")
                left = self.expr()
                self.expect_op(",")
                right = self.expr()
                self.expect_op(")")
                return _CALLS[tok.text](left, right)
            if tok.text == "abs":
                self.advance()
                self.expect_op("(")
                operand = self.expr()
                self.expect_op(")")
                return Abs(operand)
            self.fail(_ATOM_STARTERS)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        self.fail(_ATOM_STARTERS)


def parse(text: str) -> FunctionExpr:
    """Parse concrete syntax into an expression tree.

    Raises:
        ParseError: on any syntax error, carrying ``offset`` (bytes into
            ``text``), ``expected`` (legal tokens there), and ``found``.
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printer

# Precedence levels for parenthesization.  A child is wrapped when its
# level is below what its position requires.
_LEVEL_ADD = 1
_LEVEL_MUL = 2
_LEVEL_NEG = 3
_LEVEL_POW = 4
_LEVEL_ATOM = 5


def _level(expr: FunctionExpr) -> int:
    if isinstance(expr, (Add, Sub)):
        return _LEVEL_ADD
    if isinstance(expr, (Mul, Div)):
        return _LEVEL_MUL
    if isinstance(expr, RationalConst) and expr.value.denominator != 1:
        # 'p/q' tokenizes as three tokens, so in print form it binds
        # like a division, not like an atom.
        return _LEVEL_MUL
    if isinstance(expr, Neg):
        return _LEVEL_NEG
    if isinstance(expr, Pow):
        return _LEVEL_POW
    return _LEVEL_ATOM


def _fmt(expr: FunctionExpr, require: int, *, wrap_neg: bool = False) -> str:
    text = _render(expr)
    if _level(expr) < require or (wrap_neg and isinstance(expr, Neg)):
        return f"({text})"
    return text


def _render(expr: FunctionExpr) -> str:
    if isinstance(expr, Var):
        return "x"
    if isinstance(expr, RationalConst):
        q = expr.value
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    if isinstance(expr, Neg):
        return "-" + _fmt(expr.operand, _LEVEL_POW)
    if isinstance(expr, Add):
        return f"{_fmt(expr.left, _LEVEL_ADD)}+{_fmt(expr.right, _LEVEL_MUL, wrap_neg=True)}"
    if isinstance(expr, Sub):
        return f"{_fmt(expr.left, _LEVEL_ADD)}-{_fmt(expr.right, _LEVEL_MUL, wrap_neg=True)}"
    if isinstance(expr, Mul):
        return f"{_fmt(expr.left, _LEVEL_MUL)}*{_fmt(expr.right, _LEVEL_NEG, wrap_neg=True)}"
    if isinstance(expr, Div):
        return f"{_fmt(expr.left, _LEVEL_MUL)}/{_fmt(expr.right, _LEVEL_NEG, wrap_neg=True)}"
    if isinstance(expr, Pow):
        return f"{_fmt(expr.base, _LEVEL_ATOM)}^{expr.exponent}"
    if isinstance(expr, Min):
        return f"min({_render(expr.left)}, {_render(expr.right)})"
    if isinstance(expr, Max):
        return f"max({_render(expr.left)}, {_render(expr.right)})"
    if isinstance(expr, Abs):
        return f"abs({_render(expr.operand)})"
    raise TypeError(f"not a function expression: {expr!r}")


def to_text(expr: FunctionExpr) -> str:
    """Canonical concrete syntax: explicit operators, minimal parentheses.

    For any tree the parser can produce, ``parse(to_text(e)) == e``
    structurally.  Hand-built trees the grammar cannot spell (a negative
    constant, or an integer constant divided by an integer constant)
    reparse to a different tree of equal value.
    """
    return _render(expr)
