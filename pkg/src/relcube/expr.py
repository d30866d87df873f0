"""Parser and evaluator for integrand/limit expressions given as text.

Grammar (whitespace-insensitive, no implicit multiplication)::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := '-' factor | power
    power   := atom ('^' factor)?          # right-associative
    atom    := NUMBER | NAME '(' expr ')' | NAME | '(' expr ')'

``^`` binds tighter than unary minus (``-x^2`` is ``-(x^2)``).  NAME is a
function (exp, sin, cos, tan, log, sqrt, abs), a constant (pi, e), or one of
the variables allowed for the slot being parsed.

Evaluation uses numpy ufuncs, so compiled expressions accept scalars and
arrays alike; domain errors (log of a negative, 0/0, ...) yield NaN/inf
rather than raising, and are caught downstream at node-evaluation time.
"""

import re
from dataclasses import dataclass

import numpy as np

__all__ = ["ExprError", "Expression", "parse", "evaluate", "unparse",
           "as_function", "FUNCTIONS", "CONSTANTS"]

FUNCTIONS = {
    "exp": np.exp,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}

CONSTANTS = {"pi": np.pi, "e": np.e}


class ExprError(ValueError):
    """Syntax or name error, carrying the 0-based position in the input."""

    def __init__(self, message, position):
        super().__init__(f"{message} (position {position})")
        self.position = position


class Expression:
    """Marker base class for AST nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Num(Expression):
    value: float


@dataclass(frozen=True)
class Var(Expression):
    name: str


@dataclass(frozen=True)
class Const(Expression):
    name: str


@dataclass(frozen=True)
class Neg(Expression):
    operand: Expression


@dataclass(frozen=True)
class BinOp(Expression):
    op: str
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Call(Expression):
    func: str
    arg: Expression


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            remainder = text[pos:].lstrip()
            if not remainder:
                break
            at = len(text) - len(remainder)
            raise ExprError(f"unexpected character {text[at]!r}", at)
        if m.group("num") is not None:
            tokens.append(("num", float(m.group("num")), m.start("num")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, allowed_vars):
        self.tokens = tokens
        self.allowed_vars = set(allowed_vars)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, value, pos = self.peek()
        if kind == "op" and value == op:
            return self.advance()
        raise ExprError(f"expected {op!r}", pos)

    def parse_expr(self):
        node = self.parse_term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                node = BinOp(value, node, self.parse_term())
            else:
                return node

    def parse_term(self):
        node = self.parse_factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                node = BinOp(value, node, self.parse_factor())
            else:
                return node

    def parse_factor(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.parse_factor())
        return self.parse_power()

    def parse_power(self):
        node = self.parse_atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            return BinOp("^", node, self.parse_factor())
        return node

    def parse_atom(self):
        kind, value, pos = self.advance()
        if kind == "num":
            return Num(value)
        if kind == "name":
            nxt_kind, nxt_value, _ = self.peek()
            if nxt_kind == "op" and nxt_value == "(":
                if value not in FUNCTIONS:
                    raise ExprError(f"unknown function {value!r}", pos)
                self.advance()
                arg = self.parse_expr()
                self.expect_op(")")
                return Call(value, arg)
            if value in self.allowed_vars:
                return Var(value)
            if value in CONSTANTS:
                return Const(value)
            raise ExprError(
                f"unknown identifier {value!r}"
                f" (variables here: {', '.join(sorted(self.allowed_vars)) or 'none'})",
                pos,
            )
        if kind == "op" and value == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        if kind == "end":
            raise ExprError("unexpected end of expression", pos)
        raise ExprError(f"unexpected {value!r}", pos)


def parse(text, allowed_vars):
    """Parse ``text`` into an Expression over the given variable names."""
    parser = _Parser(_tokenize(text), allowed_vars)
    node = parser.parse_expr()
    kind, value, pos = parser.peek()
    if kind != "end":
        raise ExprError(f"unexpected {value!r} after expression", pos)
    return node


def evaluate(expr, env):
    """Evaluate an Expression under ``env`` mapping variable names to values."""
    return as_function(expr, tuple(env))(*env.values())


def _compile(expr, arg_names):
    if isinstance(expr, Num):
        v = expr.value
        return lambda *args: v
    if isinstance(expr, Const):
        v = CONSTANTS[expr.name]
        return lambda *args: v
    if isinstance(expr, Var):
        idx = arg_names.index(expr.name)
        return lambda *args: args[idx]
    if isinstance(expr, Neg):
        f = _compile(expr.operand, arg_names)
        return lambda *args: -f(*args)
    if isinstance(expr, Call):
        fn = FUNCTIONS[expr.func]
        f = _compile(expr.arg, arg_names)
        return lambda *args: fn(f(*args))
    if isinstance(expr, BinOp):
        lf = _compile(expr.left, arg_names)
        rf = _compile(expr.right, arg_names)
        op = expr.op
        if op == "+":
            return lambda *args: lf(*args) + rf(*args)
        if op == "-":
            return lambda *args: lf(*args) - rf(*args)
        if op == "*":
            return lambda *args: lf(*args) * rf(*args)
        if op == "/":
            return lambda *args: lf(*args) / rf(*args)
        if op == "^":
            return lambda *args: np.power(lf(*args), rf(*args))
    raise TypeError(f"not an Expression node: {expr!r}")


def as_function(expr, arg_names):
    """Compile an Expression to a callable taking ``arg_names`` positionally.

    The callable accepts floats or numpy arrays and never raises on domain
    errors; invalid operations produce NaN/inf in the result.
    """
    body = _compile(expr, tuple(arg_names))

    def call(*args):
        with np.errstate(all="ignore"):
            return body(*args)

    return call


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}
_ATOM = 5


def _unparse(expr, ctx):
    """Render with the minimum parentheses that preserve the tree.

    ``ctx`` is the precedence the surrounding construct requires of this
    subexpression; anything binding more loosely gets wrapped.
    """
    if isinstance(expr, Num):
        return repr(expr.value)
    if isinstance(expr, (Var, Const)):
        return expr.name
    if isinstance(expr, Call):
        return f"{expr.func}({_unparse(expr.arg, 0)})"
    if isinstance(expr, Neg):
        own = _PRECEDENCE["neg"]
        text = f"-{_unparse(expr.operand, own)}"
    elif isinstance(expr, BinOp):
        own = _PRECEDENCE[expr.op]
        if expr.op == "^":
            # The grammar allows only an atom on the left of '^' and a
            # factor (so unary minus or another power) on the right.
            left = _unparse(expr.left, _ATOM)
            right = _unparse(expr.right, _PRECEDENCE["neg"])
        else:
            left = _unparse(expr.left, own)
            right = _unparse(expr.right, own + 1)
        text = f"{left}{expr.op}{right}"
    else:
        raise TypeError(f"not an Expression node: {expr!r}")
    if own < ctx:
        return f"({text})"
    return text


def unparse(expr):
    """Render an Expression back to text that reparses to an identical tree."""
    return _unparse(expr, 0)
