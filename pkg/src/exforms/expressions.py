"""Scalar expression kernel.

Closed-form scalar fields of N named real variables: parse, evaluate,
differentiate exactly, fold the obvious identities, and zero-test by
seeded sampling.  Everything downstream (forms, physics fixtures, period
integrands) stores its coefficients as these trees.

Simplification is deliberately minimal: constant folding plus x+0, x*1,
x*0, x-x and the power identities.  Equality of expressions is decided by
sampling, never by normal forms.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    EvaluationError,
    ExprSyntaxError,
    InconclusiveZeroTest,
    UnknownFunctionError,
    UnknownIdentifierError,
)

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")

_BINARY = ("add", "sub", "mul", "div")
_UNARY = ("neg",) + FUNCTIONS


@dataclass(frozen=True)
class ScalarExpr:
    """Immutable expression tree.

    ``op`` is one of: ``const`` (payload ``value``), ``var`` (payload
    ``name``), the unary ops ``neg sin cos exp log sqrt``, the binary ops
    ``add sub mul div``, and ``pow`` whose exponent is the constant payload
    ``exponent`` (fractional exponents are defined for positive bases only).
    """

    op: str
    args: tuple = ()
    value: float = 0.0
    name: str = ""
    exponent: float = 1.0

    # -- construction sugar -------------------------------------------------

    def __add__(self, other):
        return add(self, _wrap(other))

    def __radd__(self, other):
        return add(_wrap(other), self)

    def __sub__(self, other):
        return sub(self, _wrap(other))

    def __rsub__(self, other):
        return sub(_wrap(other), self)

    def __mul__(self, other):
        return mul(self, _wrap(other))

    def __rmul__(self, other):
        return mul(_wrap(other), self)

    def __truediv__(self, other):
        return div(self, _wrap(other))

    def __rtruediv__(self, other):
        return div(_wrap(other), self)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __neg__(self):
        return neg(self)

    def __str__(self):
        return format_expr(self)

    # -- queries ------------------------------------------------------------

    def is_const(self, v=None):
        if self.op != "const":
            return False
        return True if v is None else self.value == v

    def variables(self) -> set:
        """Names of variables that actually occur in the tree."""
        if self.op == "var":
            return {self.name}
        out = set()
        for a in self.args:
            out |= a.variables()
        return out

    # -- evaluation ----------------------------------------------------------

    def __call__(self, env):
        return self.evaluate(env)

    def evaluate(self, env):
        """Evaluate at a point, or over numpy arrays.

        With float inputs, domain violations raise EvaluationError.  With
        array inputs the usual numpy semantics apply: invalid nodes come
        back as nan/inf for the caller to detect.
        """
        with np.errstate(all="ignore"):
            return _eval(self, env)

    def evaluate_with_scale(self, env):
        """Evaluate at a point and report the largest absolute value seen
        across all subterms.  Used as the relative-tolerance scale in
        zero testing.  Point (float) inputs only."""
        return _eval_scale(self, env)

    def diff(self, name: str) -> "ScalarExpr":
        """Exact symbolic partial derivative with respect to ``name``."""
        return _diff(self, name)

    def simplify(self) -> "ScalarExpr":
        return simplify(self)

    def substitute(self, mapping) -> "ScalarExpr":
        """Replace variables by expressions.  Unmapped variables survive."""
        if self.op == "var":
            return mapping.get(self.name, self)
        if self.op in ("const",):
            return self
        new_args = tuple(a.substitute(mapping) for a in self.args)
        return ScalarExpr(self.op, new_args, self.value, self.name, self.exponent)


def _wrap(x):
    if isinstance(x, ScalarExpr):
        return x
    return const(float(x))


# -- node constructors (these fold the listed identities) --------------------


def const(v: float) -> ScalarExpr:
    return ScalarExpr("const", value=float(v))


def var(name: str) -> ScalarExpr:
    return ScalarExpr("var", name=name)


ZERO = const(0.0)
ONE = const(1.0)


def add(a, b):
    if a.is_const() and b.is_const():
        return const(a.value + b.value)
    if a.is_const(0.0):
        return b
    if b.is_const(0.0):
        return a
    return ScalarExpr("add", (a, b))


def sub(a, b):
    if a.is_const() and b.is_const():
        return const(a.value - b.value)
    if b.is_const(0.0):
        return a
    if a.is_const(0.0):
        return neg(b)
    if a == b:
        return ZERO
    return ScalarExpr("sub", (a, b))


def mul(a, b):
    if a.is_const() and b.is_const():
        return const(a.value * b.value)
    if a.is_const(0.0) or b.is_const(0.0):
        return ZERO
    if a.is_const(1.0):
        return b
    if b.is_const(1.0):
        return a
    return ScalarExpr("mul", (a, b))


def div(a, b):
    if b.is_const(0.0):
        raise EvaluationError("division by the constant zero")
    if a.is_const() and b.is_const():
        return const(a.value / b.value)
    if a.is_const(0.0):
        return ZERO
    if b.is_const(1.0):
        return a
    return ScalarExpr("div", (a, b))


def neg(a):
    if a.is_const():
        return const(-a.value)
    if a.op == "neg":
        return a.args[0]
    return ScalarExpr("neg", (a,))


def power(base, exponent: float):
    e = float(exponent)
    if e == 0.0:
        return ONE
    if e == 1.0:
        return base
    if base.is_const():
        return const(_pow_float(base.value, e))
    return ScalarExpr("pow", (base,), exponent=e)


def _func(op, a):
    if a.is_const():
        return const(_apply_scalar(op, a.value))
    return ScalarExpr(op, (a,))


def sin(a):
    return _func("sin", _wrap(a))


def cos(a):
    return _func("cos", _wrap(a))


def exp(a):
    return _func("exp", _wrap(a))


def log(a):
    return _func("log", _wrap(a))


def sqrt(a):
    return _func("sqrt", _wrap(a))


def simplify(e: ScalarExpr) -> ScalarExpr:
    """Bottom-up rebuild through the folding constructors."""
    if e.op in ("const", "var"):
        return e
    args = tuple(simplify(a) for a in e.args)
    if e.op == "add":
        return add(*args)
    if e.op == "sub":
        return sub(*args)
    if e.op == "mul":
        return mul(*args)
    if e.op == "div":
        return div(*args)
    if e.op == "neg":
        return neg(args[0])
    if e.op == "pow":
        return power(args[0], e.exponent)
    return _func(e.op, args[0])


# -- evaluation internals -----------------------------------------------------


def _apply_scalar(op, v: float) -> float:
    if op == "sin":
        return math.sin(v)
    if op == "cos":
        return math.cos(v)
    if op == "exp":
        return math.exp(v)
    if op == "log":
        if v <= 0.0:
            raise EvaluationError(f"log of nonpositive value {v}")
        return math.log(v)
    if op == "sqrt":
        if v < 0.0:
            raise EvaluationError(f"sqrt of negative value {v}")
        return math.sqrt(v)
    raise AssertionError(op)


_NP_FUNC = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "log": np.log, "sqrt": np.sqrt}


def _pow_float(b: float, e: float) -> float:
    if b == 0.0 and e < 0.0:
        raise EvaluationError("zero base with negative exponent")
    if b < 0.0 and e != int(e):
        raise EvaluationError(f"fractional power of negative base {b}")
    return math.pow(b, e)


def _eval(e: ScalarExpr, env):
    op = e.op
    if op == "const":
        return e.value
    if op == "var":
        try:
            return env[e.name]
        except KeyError:
            raise EvaluationError(f"no value bound for variable '{e.name}'") from None
    if op == "add":
        return _eval(e.args[0], env) + _eval(e.args[1], env)
    if op == "sub":
        return _eval(e.args[0], env) - _eval(e.args[1], env)
    if op == "mul":
        return _eval(e.args[0], env) * _eval(e.args[1], env)
    if op == "div":
        num = _eval(e.args[0], env)
        den = _eval(e.args[1], env)
        if isinstance(den, np.ndarray) or isinstance(num, np.ndarray):
            return np.asarray(num) / np.asarray(den)
        if den == 0.0:
            raise EvaluationError("division by zero")
        return num / den
    if op == "neg":
        return -_eval(e.args[0], env)
    if op == "pow":
        b = _eval(e.args[0], env)
        if isinstance(b, np.ndarray):
            return np.power(b, e.exponent)
        return _pow_float(b, e.exponent)
    v = _eval(e.args[0], env)
    if isinstance(v, np.ndarray):
        return _NP_FUNC[op](v)
    return _apply_scalar(op, v)


def _eval_scale(e: ScalarExpr, env):
    op = e.op
    if op == "const":
        return e.value, abs(e.value)
    if op == "var":
        v = env[e.name]
        return v, abs(v)
    if op in _BINARY:
        a, sa = _eval_scale(e.args[0], env)
        b, sb = _eval_scale(e.args[1], env)
        if op == "add":
            v = a + b
        elif op == "sub":
            v = a - b
        elif op == "mul":
            v = a * b
        else:
            if b == 0.0:
                raise EvaluationError("division by zero")
            v = a / b
        return v, max(sa, sb, abs(v))
    a, sa = _eval_scale(e.args[0], env)
    if op == "neg":
        v = -a
    elif op == "pow":
        v = _pow_float(a, e.exponent)
    else:
        v = _apply_scalar(op, a)
    return v, max(sa, abs(v))


# -- differentiation ----------------------------------------------------------


def _diff(e: ScalarExpr, x: str) -> ScalarExpr:
    op = e.op
    if op == "const":
        return ZERO
    if op == "var":
        return ONE if e.name == x else ZERO
    if op == "add":
        return add(_diff(e.args[0], x), _diff(e.args[1], x))
    if op == "sub":
        return sub(_diff(e.args[0], x), _diff(e.args[1], x))
    if op == "mul":
        a, b = e.args
        return add(mul(_diff(a, x), b), mul(a, _diff(b, x)))
    if op == "div":
        a, b = e.args
        return div(sub(mul(_diff(a, x), b), mul(a, _diff(b, x))), power(b, 2.0))
    if op == "neg":
        return neg(_diff(e.args[0], x))
    if op == "pow":
        u = e.args[0]
        return mul(mul(const(e.exponent), power(u, e.exponent - 1.0)), _diff(u, x))
    u = e.args[0]
    du = _diff(u, x)
    if op == "sin":
        return mul(cos(u), du)
    if op == "cos":
        return neg(mul(sin(u), du))
    if op == "exp":
        return mul(exp(u), du)
    if op == "log":
        return div(du, u)
    if op == "sqrt":
        return div(du, mul(const(2.0), sqrt(u)))
    raise AssertionError(op)


def partial(e: ScalarExpr, name: str, variables=None) -> ScalarExpr:
    """Symbolic partial derivative, folded through the simplifier.

    If ``variables`` is given, ``name`` must be a member of it.
    """
    if variables is not None and name not in variables:
        raise UnknownIdentifierError(f"unknown variable '{name}'", 0)
    return _diff(e, name)


# -- parsing -------------------------------------------------------------------

_NUM_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class _Parser:
    """Recursive descent over the grammar:

        expr   := term  (('+'|'-') term)*
        term   := factor (('*'|'/') factor)*
        factor := '-' factor | power
        power  := atom ['^' ['-'] power]      (right associative)
        atom   := number | name | name '(' expr ')' | '(' expr ')'

    '^' binds tighter than unary minus on its base, so -x^2 is -(x^2).
    The exponent subtree must fold to a constant.
    """

    def __init__(self, text: str, variables):
        self.text = text
        self.pos = 0
        self.variables = tuple(variables)

    def byte_offset(self, pos=None) -> int:
        p = self.pos if pos is None else pos
        return len(self.text[:p].encode("utf-8"))

    def error(self, message, pos=None):
        raise ExprSyntaxError(message, self.byte_offset(pos))

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        if self.pos >= len(self.text):
            return ""
        return self.text[self.pos]

    def parse(self) -> ScalarExpr:
        e = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error(f"unexpected character '{self.text[self.pos]}'")
        return e

    def expr(self):
        e = self.term()
        while True:
            c = self.peek()
            if c == "+":
                self.pos += 1
                e = ScalarExpr("add", (e, self.term()))
            elif c == "-":
                self.pos += 1
                e = ScalarExpr("sub", (e, self.term()))
            else:
                return e

    def term(self):
        e = self.factor()
        while True:
            c = self.peek()
            if c == "*":
                self.pos += 1
                e = ScalarExpr("mul", (e, self.factor()))
            elif c == "/":
                self.pos += 1
                e = ScalarExpr("div", (e, self.factor()))
            else:
                return e

    def factor(self):
        if self.peek() == "-":
            self.pos += 1
            return ScalarExpr("neg", (self.factor(),))
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            caret = self.pos - 1
            negate = False
            if self.peek() == "-":
                self.pos += 1
                negate = True
            exp_tree = self.power()
            folded = simplify(neg(exp_tree) if negate else exp_tree)
            if not folded.is_const():
                self.error("exponent must fold to a constant", caret)
            return ScalarExpr("pow", (base,), exponent=folded.value)
        return base

    def atom(self):
        self.skip_ws()
        if self.pos >= len(self.text):
            self.error("unexpected end of input")
        c = self.text[self.pos]
        if c == "(":
            self.pos += 1
            e = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return e
        m = _NUM_RE.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return const(float(m.group()))
        m = _NAME_RE.match(self.text, self.pos)
        if m:
            name = m.group()
            start = self.pos
            self.pos = m.end()
            if self.peek() == "(":
                if name not in FUNCTIONS:
                    raise UnknownFunctionError(
                        f"unknown function '{name}'", self.byte_offset(start)
                    )
                self.pos += 1
                arg = self.expr()
                if self.peek() != ")":
                    self.error("expected ')'")
                self.pos += 1
                return ScalarExpr(name, (arg,))
            if name not in self.variables:
                raise UnknownIdentifierError(
                    f"unknown identifier '{name}'", self.byte_offset(start)
                )
            return var(name)
        self.error(f"unexpected character '{c}'")


def parse_expr(text: str, variables) -> ScalarExpr:
    """Parse expression text over an ordered, nonempty variable list."""
    names = tuple(variables)
    if not names or len(set(names)) != len(names):
        raise ExprSyntaxError("variable list must be nonempty and distinct", 0)
    return _Parser(text, names).parse()


# -- pretty printing ------------------------------------------------------------

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_ATOM_PREC = 5
_SYMBOL = {"add": " + ", "sub": " - ", "mul": "*", "div": "/"}


def _prec(e: ScalarExpr) -> int:
    return _PREC.get(e.op, _ATOM_PREC)


def _fmt_const(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def format_expr(e: ScalarExpr) -> str:
    """Render with minimal parentheses; a fixed point under parse/print."""
    op = e.op
    if op == "const":
        if e.value < 0:
            return "-" + _fmt_const(-e.value)
        return _fmt_const(e.value)
    if op == "var":
        return e.name
    if op in _SYMBOL:
        p = _PREC[op]
        left, right = e.args
        ls = format_expr(left)
        if _prec(left) < p:
            ls = f"({ls})"
        rs = format_expr(right)
        # right child needs parens at equal precedence: a - (b - c)
        if _prec(right) <= p:
            rs = f"({rs})"
        return ls + _SYMBOL[op] + rs
    if op == "neg":
        child = e.args[0]
        inner = format_expr(child)
        if _prec(child) <= _PREC["neg"] or inner.startswith("-"):
            inner = f"({inner})"
        return "-" + inner
    if op == "pow":
        child = e.args[0]
        base = format_expr(child)
        if _prec(child) <= _PREC["pow"] or base.startswith("-"):
            base = f"({base})"
        ev = e.exponent
        es = _fmt_const(ev) if ev >= 0 else f"(-{_fmt_const(-ev)})"
        return f"{base}^{es}"
    return f"{op}({format_expr(e.args[0])})"


# -- sampling and zero testing ---------------------------------------------------


@dataclass(frozen=True)
class SampleBox:
    """Axis-aligned sampling region with a reproducible point stream."""

    variables: tuple
    lows: tuple
    highs: tuple
    count: int = 100
    seed: int = 0

    def __post_init__(self):
        if len(self.lows) != len(self.variables) or len(self.highs) != len(self.variables):
            raise ValueError("bounds must match the variable list")
        for lo, hi in zip(self.lows, self.highs):
            if not lo < hi:
                raise ValueError(f"empty interval [{lo}, {hi}]")
        if self.count < 1:
            raise ValueError("sample count must be >= 1")

    @classmethod
    def cube(cls, variables, low=-1.0, high=1.0, count=100, seed=0):
        n = len(tuple(variables))
        return cls(tuple(variables), (low,) * n, (high,) * n, count, seed)

    def points(self):
        rng = random.Random(self.seed)
        pts = []
        for _ in range(self.count):
            pts.append(
                {
                    v: rng.uniform(lo, hi)
                    for v, lo, hi in zip(self.variables, self.lows, self.highs)
                }
            )
        return pts


@dataclass(frozen=True)
class TolerancePolicy:
    """Zero-test tolerances plus an optional excluded region.

    Points where |exclusion| <= exclusion_min are skipped, which is how
    integrands stay away from the null set of their denominators.
    """

    abs_tol: float = 1e-9
    rel_tol: float = 0.0
    exclusion: ScalarExpr = None
    exclusion_min: float = 0.0

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be > 0")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be >= 0")

    def admits(self, point) -> bool:
        if self.exclusion is None:
            return True
        try:
            v = self.exclusion.evaluate(point)
        except EvaluationError:
            return False
        return abs(v) > self.exclusion_min


@dataclass(frozen=True)
class ZeroVerdict:
    """Outcome of a sampled zero test.

    ``witness_component`` is filled by form-level tests with the basis
    index tuple whose coefficient was caught nonzero.
    """

    identically_zero: bool
    witness_point: dict = None
    witness_value: float = None
    witness_component: tuple = None
    samples_used: int = 0
    samples_skipped: int = 0

    def __bool__(self):
        return self.identically_zero


def is_zero(e: ScalarExpr, box: SampleBox, pol: TolerancePolicy) -> ZeroVerdict:
    """Decide whether ``e`` vanishes on the box, by sampling.

    A point passes when |e(p)| <= abs_tol + rel_tol * scale(p), where
    scale(p) is the largest absolute subterm magnitude at p.  Points hit
    by the exclusion predicate or by evaluation errors are skipped; if
    every point is skipped the test is inconclusive and raises.
    """
    used = 0
    skipped = 0
    for p in box.points():
        if not pol.admits(p):
            skipped += 1
            continue
        try:
            v, scale = e.evaluate_with_scale(p)
        except EvaluationError:
            skipped += 1
            continue
        used += 1
        if abs(v) > pol.abs_tol + pol.rel_tol * scale:
            return ZeroVerdict(False, dict(p), v, None, used, skipped)
    if used == 0:
        raise InconclusiveZeroTest(
            f"all {box.count} sample points were excluded or failed to evaluate"
        )
    return ZeroVerdict(True, None, None, None, used, skipped)
