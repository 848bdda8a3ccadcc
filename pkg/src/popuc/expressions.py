"""Small arithmetic expression language for parameter-dependent measure data.

Expressions range over the variables ``t`` and ``theta``, the constant
``pi``, the four arithmetic operations, unary minus, and the functions
``sin``, ``cos``, ``exp``, ``sqrt``, ``abs``.  Parsed trees are immutable
and support exact symbolic differentiation (except through ``abs``).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

__all__ = [
    "Expr",
    "Const",
    "Var",
    "BinOp",
    "Neg",
    "Call",
    "ExprError",
    "ExprSyntaxError",
    "EvalError",
    "NonDifferentiableError",
    "parse",
    "evaluate",
    "differentiate",
    "free_vars",
    "to_source",
]

VARIABLES = ("t", "theta")
FUNCTIONS = ("sin", "cos", "exp", "sqrt", "abs")


class ExprError(ValueError):
    """Base class for expression-layer failures."""


class ExprSyntaxError(ExprError):
    """Malformed source text; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class EvalError(ExprError):
    """Unbound variable, division by zero, domain error, or non-finite result."""


class NonDifferentiableError(ExprError):
    """Symbolic derivative requested through a non-differentiable node."""


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Const, Var, BinOp, Neg, Call]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
    r"|\d+(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/()]))"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.end() == pos:
            # skip over whitespace-only tail
            rest = source[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ExprSyntaxError(f"unexpected character {source[bad]!r}", bad)
        kind = m.lastgroup
        text = m.group(kind)
        tokens.append((kind, text, m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(source)))
    return tokens


class _Parser:
    """Recursive descent over: expr := term (('+'|'-') term)*;
    term := factor (('*'|'/') factor)*;
    factor := number | 'pi' | 't' | 'theta' | func '(' expr ')' | '(' expr ')' | '-' factor
    """

    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, text, offset = self.peek()
        if kind != "op" or text != op:
            raise ExprSyntaxError(f"expected {op!r}", offset)
        self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, offset = self.peek()
        if kind != "eof":
            raise ExprSyntaxError(f"unexpected {text!r}", offset)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                e = BinOp(text, e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                e = BinOp(text, e, self.factor())
            else:
                return e

    def factor(self) -> Expr:
        kind, text, offset = self.advance()
        if kind == "number":
            return Const(float(text))
        if kind == "ident":
            if text == "pi":
                return Const(math.pi)
            if text in VARIABLES:
                return Var(text)
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            raise ExprSyntaxError(f"unknown identifier {text!r}", offset)
        if kind == "op":
            if text == "(":
                e = self.expr()
                self.expect_op(")")
                return e
            if text == "-":
                return Neg(self.factor())
        raise ExprSyntaxError(f"unexpected {text or 'end of input'!r}", offset)


def parse(source: str) -> Expr:
    """Parse ``source`` into an expression tree.

    Raises :class:`ExprSyntaxError` with the byte offset on malformed input
    and on identifiers outside the grammar.
    """
    if not isinstance(source, str) or source.strip() == "":
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(source).parse()


_FUNC_IMPL = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sqrt": math.sqrt,
    "abs": abs,
}


def evaluate(e: Expr, bindings: Mapping[str, float]) -> float:
    """Evaluate ``e`` with the given variable bindings.

    Division by zero, function domain errors, and non-finite results all
    raise :class:`EvalError` instead of propagating IEEE specials.
    """
    value = _eval(e, bindings)
    if not math.isfinite(value):
        raise EvalError(f"non-finite result {value!r}")
    return value


def _eval(e: Expr, bindings: Mapping[str, float]) -> float:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        try:
            return float(bindings[e.name])
        except KeyError:
            raise EvalError(f"unbound variable {e.name!r}") from None
    if isinstance(e, Neg):
        return -_eval(e.operand, bindings)
    if isinstance(e, BinOp):
        left = _eval(e.left, bindings)
        right = _eval(e.right, bindings)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        if right == 0.0:
            raise EvalError("division by zero")
        return left / right
    try:
        return _FUNC_IMPL[e.func](_eval(e.arg, bindings))
    except (ValueError, OverflowError) as exc:
        raise EvalError(f"{e.func}: {exc}") from None


def free_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Neg):
        return free_vars(e.operand)
    if isinstance(e, BinOp):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Call):
        return free_vars(e.arg)
    return frozenset()


# Folding constructors keep derivatives readable (0 + x -> x etc.); this is
# peephole constant folding only, not a simplification engine.

def _const(v: float) -> Const:
    return Const(float(v))


def _is_const(e: Expr, v: float | None = None) -> bool:
    return isinstance(e, Const) and (v is None or e.value == v)


def _add(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return _const(a.value + b.value)
    return BinOp("+", a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return _const(a.value - b.value)
    if _is_const(a, 0.0):
        return Neg(b)
    return BinOp("-", a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return _const(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return _const(a.value * b.value)
    return BinOp("*", a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0):
        return _const(0.0)
    if _is_const(b, 1.0):
        return a
    return BinOp("/", a, b)


def differentiate(e: Expr, var: str) -> Expr:
    """Exact symbolic derivative of ``e`` with respect to ``var``.

    Raises :class:`NonDifferentiableError` when ``abs`` appears in ``e``.
    """
    if var not in VARIABLES:
        raise ExprError(f"cannot differentiate with respect to {var!r}")
    return _diff(e, var)


def _diff(e: Expr, var: str) -> Expr:
    if isinstance(e, Const):
        return _const(0.0)
    if isinstance(e, Var):
        return _const(1.0 if e.name == var else 0.0)
    if isinstance(e, Neg):
        d = _diff(e.operand, var)
        return _const(-d.value) if isinstance(d, Const) else Neg(d)
    if isinstance(e, BinOp):
        dl = _diff(e.left, var)
        dr = _diff(e.right, var)
        if e.op == "+":
            return _add(dl, dr)
        if e.op == "-":
            return _sub(dl, dr)
        if e.op == "*":
            return _add(_mul(dl, e.right), _mul(e.left, dr))
        num = _sub(_mul(dl, e.right), _mul(e.left, dr))
        return _div(num, _mul(e.right, e.right))
    da = _diff(e.arg, var)
    if e.func == "sin":
        return _mul(Call("cos", e.arg), da)
    if e.func == "cos":
        inner = _mul(Call("sin", e.arg), da)
        return _const(0.0) if _is_const(inner, 0.0) else Neg(inner)
    if e.func == "exp":
        return _mul(e, da)
    if e.func == "sqrt":
        return _div(da, _mul(_const(2.0), e))
    raise NonDifferentiableError("derivative of abs is not defined")


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_source(e: Expr) -> str:
    """Render ``e`` back to grammar-valid source text.

    ``parse(to_source(parse(s)))`` is structurally equal to ``parse(s)``.
    """
    return _render(e, 0)


def _render(e: Expr, parent_prec: int) -> str:
    if isinstance(e, Const):
        return repr(e.value) if e.value >= 0 else f"({e.value!r})"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({_render(e.arg, 0)})"
    if isinstance(e, Neg):
        inner = _render(e.operand, 3)
        return f"(-{inner})" if parent_prec > 0 else f"-{inner}"
    prec = _PRECEDENCE[e.op]
    left = _render(e.left, prec - 1)
    # right operand gets parens at equal precedence to preserve left associativity
    right = _render(e.right, prec)
    text = f"{left} {e.op} {right}"
    return f"({text})" if prec <= parent_prec else text
