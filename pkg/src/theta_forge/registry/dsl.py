"""Identity DSL: tokenizer, recursive-descent parser, AST and printer.

Grammar (ASCII)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := number | 'i' | 'pi' | 'q' ['^' unary] | name | call | '(' expr ')'

Calls: theta1..theta4(arg|s*tau), dtheta1(arg|s*tau) (and d2theta1, ...),
eta(s*tau), K(y; z|tau), wp(arg|tau), a(tau), exp_i(arg), sin/cos/cot/csc(arg),
sqrt(expr), lambert{field=value, ...}(arg|tau) or lambert{...}(tau),
sum(k, lo, hi, body), psi11(a, b, x|tau), qpoch(a|tau), lsum(x, a|tau).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields
from decimal import Decimal
from fractions import Fraction
from typing import Iterable

from ..errors import DomainError, NonLinearArgumentError, ParseError, UnknownSymbolError
from ..functions import LambertSpec

VARS = ("z", "y", "u", "v", "w", "x", "tau")
FREE_VARS = ("z", "y", "u", "v", "w", "x")
TRIG = ("sin", "cos", "cot", "csc")
RESERVED = {"i", "pi", "q", "tau"}
FUNCTIONS = {"eta", "K", "wp", "a", "exp_i", "sqrt", "lambert", "sum", "psi11", "qpoch", "lsum", *TRIG}
_THETA_RE = re.compile(r"^(d(\d*))?theta([1-4])$")


class Expr:
    """Base class of AST nodes (frozen dataclasses with structural equality)."""

    def children(self) -> tuple["Expr", ...]:
        return tuple(getattr(self, f.name) for f in fields(self) if isinstance(getattr(self, f.name), Expr))


@dataclass(frozen=True)
class Num(Expr):
    value: Fraction  # nonnegative literal


@dataclass(frozen=True)
class ImagUnit(Expr):
    pass


@dataclass(frozen=True)
class Pi(Expr):
    pass


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class QPow(Expr):
    exponent: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class Theta(Expr):
    kind: int
    arg: Expr
    scale: Expr  # coefficient of tau
    deriv: int = 0


@dataclass(frozen=True)
class Eta(Expr):
    scale: Expr


@dataclass(frozen=True)
class WeierstrassP(Expr):
    arg: Expr
    scale: Expr


@dataclass(frozen=True)
class EisensteinA(Expr):
    scale: Expr


@dataclass(frozen=True)
class ExpI(Expr):
    arg: Expr


@dataclass(frozen=True)
class Trig(Expr):
    name: str
    arg: Expr


@dataclass(frozen=True)
class Sqrt(Expr):
    arg: Expr


@dataclass(frozen=True)
class Lambert(Expr):
    spec: LambertSpec
    arg: Expr | None
    scale: Expr


@dataclass(frozen=True)
class FiniteSum(Expr):
    index: str
    lo: Expr
    hi: Expr  # inclusive
    body: Expr


@dataclass(frozen=True)
class Psi11(Expr):
    a: Expr
    b: Expr
    x: Expr
    scale: Expr


@dataclass(frozen=True)
class QPoch(Expr):
    a: Expr
    scale: Expr


@dataclass(frozen=True)
class LSum(Expr):
    x: Expr
    a: Expr
    scale: Expr


ONE = Num(Fraction(1))
TAU = Var("tau")


# ---------------------------------------------------------------------------
# Tokenizer


@dataclass(frozen=True)
class Token:
    kind: str  # num, name, op, end
    text: str
    pos: int


_TOKEN_RE = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1):
            out.append(Token("num", m.group(1), start))
        elif m.group(2):
            out.append(Token("name", m.group(2), start))
        elif m.group(3):
            ch = m.group(3)
            if ch not in "+-*/^()|,;{}=":
                raise ParseError(f"unexpected character {ch!r}", start, text)
            out.append(Token("op", ch, start))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


# ---------------------------------------------------------------------------
# Parser

_LAMBERT_FIELDS = {f.name: f.type for f in fields(LambertSpec)}


class Parser:
    def __init__(self, text: str, symbols: Iterable[str] = ()):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.scopes: list[set[str]] = [set(VARS) | set(symbols)]

    # token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None, cls=ParseError):
        tok = tok or self.tok
        return cls(message, tok.pos, self.text)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r} but found {found!r}")

    def name(self) -> str:
        if self.tok.kind != "name":
            raise self.error("expected a name")
        n = self.tok.text
        self.i += 1
        return n

    def known(self, name: str) -> bool:
        return any(name in s for s in self.scopes)

    # grammar
    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            if self.accept("+"):
                e = Add(e, self.term())
            elif self.accept("-"):
                e = Sub(e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            if self.accept("*"):
                e = Mul(e, self.unary())
            elif self.accept("/"):
                e = Div(e, self.unary())
            else:
                return e

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            return Pow(base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(Fraction(tok.text))
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind != "name":
            raise self.error(f"unexpected {tok.text or 'end of input'!r}")
        name = tok.text
        self.i += 1
        if name == "i":
            return ImagUnit()
        if name == "pi":
            return Pi()
        if name == "q":
            if self.accept("^"):
                return QPow(self.unary())
            return QPow(ONE)
        m = _THETA_RE.match(name)
        if m and self.tok.text == "(":
            deriv = 0 if not m.group(1) else int(m.group(2) or 1)
            return self.theta_call(int(m.group(3)), deriv, tok)
        if name in FUNCTIONS and (self.tok.text == "(" or (name == "lambert" and self.tok.text == "{")):
            return getattr(self, f"call_{name}")(tok)
        if self.known(name):
            return Var(name)
        raise self.error(f"unknown symbol {name!r}", tok, UnknownSymbolError)

    # calls
    def linear_arg(self, tok: Token) -> Expr:
        start = self.tok
        e = self.expr()
        check_linear(e, self.text, start.pos)
        return e

    def tau_scale(self) -> Expr:
        tok = self.tok
        e = self.expr()
        s = extract_tau_scale(e)
        if s is None:
            raise self.error("lattice parameter must be a constant multiple of tau", tok)
        return s

    def theta_call(self, kind: int, deriv: int, tok: Token) -> Expr:
        if deriv > 4:
            raise self.error("derivative order must be at most 4", tok)
        self.expect("(")
        arg = self.linear_arg(tok)
        self.expect("|")
        scale = self.tau_scale()
        self.expect(")")
        return Theta(kind, arg, scale, deriv)

    def call_eta(self, tok):
        self.expect("(")
        s = self.tau_scale()
        self.expect(")")
        return Eta(s)

    def call_a(self, tok):
        self.expect("(")
        s = self.tau_scale()
        self.expect(")")
        return EisensteinA(s)

    def call_wp(self, tok):
        self.expect("(")
        arg = self.linear_arg(tok)
        self.expect("|")
        s = self.tau_scale()
        self.expect(")")
        return WeierstrassP(arg, s)

    def call_K(self, tok):
        self.expect("(")
        y = self.linear_arg(tok)
        self.expect(";")
        z = self.linear_arg(tok)
        self.expect("|")
        s = self.tau_scale()
        self.expect(")")
        return kronecker_expansion(y, z, s)

    def call_exp_i(self, tok):
        self.expect("(")
        arg = self.linear_arg(tok)
        self.expect(")")
        return ExpI(arg)

    def _trig(self, name):
        self.expect("(")
        arg = self.linear_arg(self.tok)
        self.expect(")")
        return Trig(name, arg)

    def call_sin(self, tok):
        return self._trig("sin")

    def call_cos(self, tok):
        return self._trig("cos")

    def call_cot(self, tok):
        return self._trig("cot")

    def call_csc(self, tok):
        return self._trig("csc")

    def call_sqrt(self, tok):
        self.expect("(")
        arg = self.expr()
        self.expect(")")
        return Sqrt(arg)

    def call_lambert(self, tok):
        values = {}
        if self.accept("{"):
            while not self.accept("}"):
                ftok = self.tok
                key = self.name()
                if key not in _LAMBERT_FIELDS:
                    raise self.error(f"unknown lambert field {key!r}", ftok, UnknownSymbolError)
                self.expect("=")
                values[key] = self.lambert_value(key)
                if not self.accept(","):
                    self.expect("}")
                    break
        try:
            spec = LambertSpec(**values)
        except (TypeError, ValueError, DomainError) as exc:
            raise self.error(f"bad lambert spec: {exc}", tok) from None
        self.expect("(")
        arg = None
        if spec.trig != "none":
            arg = self.linear_arg(tok)
            self.expect("|")
        s = self.tau_scale()
        self.expect(")")
        return Lambert(spec, arg, s)

    def lambert_value(self, key):
        tok = self.tok
        if key in ("twist", "trig"):
            return self.name()
        if key == "odd_only":
            v = self.name()
            if v not in ("true", "false"):
                raise self.error("odd_only must be true or false", tok)
            return v == "true"
        sign = -1 if self.accept("-") else 1
        if self.tok.kind != "num":
            raise self.error(f"expected a number for {key}")
        val = Fraction(self.tok.text)
        self.i += 1
        if self.accept("/"):
            if self.tok.kind != "num":
                raise self.error("expected a denominator")
            val /= Fraction(self.tok.text)
            self.i += 1
        val *= sign
        if key in ("num_exponent", "den_exponent"):
            return val
        if val.denominator != 1:
            raise self.error(f"{key} must be an integer", tok)
        return int(val)

    def call_sum(self, tok):
        self.expect("(")
        itok = self.tok
        index = self.name()
        if index in RESERVED or index in FREE_VARS:
            raise self.error(f"{index!r} cannot be a summation index", itok)
        self.expect(",")
        lo = self.expr()
        self.expect(",")
        hi = self.expr()
        self.expect(",")
        self.scopes.append({index})
        try:
            body = self.expr()
        finally:
            self.scopes.pop()
        self.expect(")")
        return FiniteSum(index, lo, hi, body)

    def call_psi11(self, tok):
        self.expect("(")
        a = self.expr()
        self.expect(",")
        b = self.expr()
        self.expect(",")
        x = self.expr()
        self.expect("|")
        s = self.tau_scale()
        self.expect(")")
        return Psi11(a, b, x, s)

    def call_qpoch(self, tok):
        self.expect("(")
        a = self.expr()
        self.expect("|")
        s = self.tau_scale()
        self.expect(")")
        return QPoch(a, s)

    def call_lsum(self, tok):
        self.expect("(")
        x = self.expr()
        self.expect(",")
        a = self.expr()
        self.expect("|")
        s = self.tau_scale()
        self.expect(")")
        return LSum(x, a, s)


def parse_expr(text: str, symbols: Iterable[str] = ()) -> Expr:
    """Parse ``text``; ``symbols`` declares extra names (integer parameters)."""
    return Parser(text, symbols).parse()


def kronecker_expansion(y: Expr, z: Expr, scale: Expr) -> Expr:
    """K_y(z) = theta1'(0) theta1(z+y) / (theta1(z) theta1(y))."""
    zero = Num(Fraction(0))
    num = Mul(Theta(1, zero, scale, 1), Theta(1, Add(z, y), scale))
    return Div(num, Mul(Theta(1, z, scale), Theta(1, y, scale)))


def extract_tau_scale(e: Expr) -> Expr | None:
    """Return s when e is s*tau, tau*s or tau/s with s free of tau."""
    if e == TAU:
        return ONE
    if isinstance(e, Mul):
        if e.right == TAU and not mentions(e.left, {"tau"}):
            return e.left
        if e.left == TAU and not mentions(e.right, {"tau"}):
            return e.right
    if isinstance(e, Div) and e.left == TAU and not mentions(e.right, {"tau"}):
        return Div(ONE, e.right)
    return None


def mentions(e: Expr, names: set[str]) -> bool:
    if isinstance(e, Var):
        return e.name in names
    if isinstance(e, FiniteSum) and e.index in names:
        names = names - {e.index}
    return any(mentions(c, names) for c in e.children())


def free_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name} & set(FREE_VARS)
    out: set[str] = set()
    for c in e.children():
        out |= free_vars(c)
    return out


_NONLINEAR = 99


def degree(e: Expr) -> int:
    """Polynomial degree in the free variables (``_NONLINEAR`` if not polynomial)."""
    if isinstance(e, Var):
        return 1 if e.name in FREE_VARS else 0
    if isinstance(e, (Num, ImagUnit, Pi)):
        return 0
    if isinstance(e, (Add, Sub)):
        return max(degree(e.left), degree(e.right))
    if isinstance(e, Neg):
        return degree(e.operand)
    if isinstance(e, Mul):
        return min(degree(e.left) + degree(e.right), _NONLINEAR)
    if isinstance(e, Div):
        return degree(e.left) if degree(e.right) == 0 else _NONLINEAR
    if isinstance(e, Pow):
        db = degree(e.base)
        if degree(e.exponent) != 0:
            return _NONLINEAR
        if db == 0:
            return 0
        if e.exponent == ONE:
            return db
        return _NONLINEAR
    # any other node (function call) is constant only if free of variables
    return 0 if not free_vars(e) else _NONLINEAR


def check_linear(e: Expr, text: str = "", pos: int = -1):
    if degree(e) > 1:
        raise NonLinearArgumentError("argument is not linear in the variables", pos, text)


# ---------------------------------------------------------------------------
# Printer

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def _prec(e: Expr) -> int:
    return _PREC.get(type(e), 5)


def _fmt_num(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    d = Decimal(v.numerator) / Decimal(v.denominator)
    return format(d, "f")


def _scale_str(s: Expr) -> str:
    return "tau" if s == ONE else f"({to_text(s)})*tau"


_LAMBERT_DEFAULT = LambertSpec()


def _lambert_fields(spec: LambertSpec) -> str:
    parts = []
    for f in fields(LambertSpec):
        val = getattr(spec, f.name)
        if val == getattr(_LAMBERT_DEFAULT, f.name):
            continue
        if isinstance(val, bool):
            val = "true" if val else "false"
        parts.append(f"{f.name}={val}")
    return "{" + ", ".join(parts) + "}" if parts else ""


def to_text(e: Expr) -> str:
    """Print ``e`` so that parse_expr(to_text(e)) == e."""
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, ImagUnit):
        return "i"
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, QPow):
        return f"q^({to_text(e.exponent)})"
    if isinstance(e, (Add, Sub, Mul, Div)):
        op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
        p = _prec(e)
        left = to_text(e.left)
        right = to_text(e.right)
        if _prec(e.left) < p:
            left = f"({left})"
        if _prec(e.right) <= p:
            right = f"({right})"
        sep = f" {op} " if p == 1 else op
        return f"{left}{sep}{right}"
    if isinstance(e, Neg):
        inner = to_text(e.operand)
        return f"-({inner})" if _prec(e.operand) < 3 else f"-{inner}"
    if isinstance(e, Pow):
        base = to_text(e.base)
        exp = to_text(e.exponent)
        if _prec(e.base) <= 4:
            base = f"({base})"
        if _prec(e.exponent) < 4:
            exp = f"({exp})"
        return f"{base}^{exp}"
    if isinstance(e, Theta):
        prefix = "" if e.deriv == 0 else ("d" if e.deriv == 1 else f"d{e.deriv}")
        return f"{prefix}theta{e.kind}({to_text(e.arg)}|{_scale_str(e.scale)})"
    if isinstance(e, Eta):
        return f"eta({_scale_str(e.scale)})"
    if isinstance(e, EisensteinA):
        return f"a({_scale_str(e.scale)})"
    if isinstance(e, WeierstrassP):
        return f"wp({to_text(e.arg)}|{_scale_str(e.scale)})"
    if isinstance(e, ExpI):
        return f"exp_i({to_text(e.arg)})"
    if isinstance(e, Trig):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, Sqrt):
        return f"sqrt({to_text(e.arg)})"
    if isinstance(e, Lambert):
        arg = "" if e.arg is None else f"{to_text(e.arg)}|"
        return f"lambert{_lambert_fields(e.spec)}({arg}{_scale_str(e.scale)})"
    if isinstance(e, FiniteSum):
        return f"sum({e.index}, {to_text(e.lo)}, {to_text(e.hi)}, {to_text(e.body)})"
    if isinstance(e, Psi11):
        return f"psi11({to_text(e.a)}, {to_text(e.b)}, {to_text(e.x)}|{_scale_str(e.scale)})"
    if isinstance(e, QPoch):
        return f"qpoch({to_text(e.a)}|{_scale_str(e.scale)})"
    if isinstance(e, LSum):
        return f"lsum({to_text(e.x)}, {to_text(e.a)}|{_scale_str(e.scale)})"
    raise TypeError(f"cannot print {type(e).__name__}")


def walk(e: Expr):
    yield e
    for c in e.children():
        yield from walk(c)


def additive_terms(e: Expr) -> list[tuple[int, Expr]]:
    """Flatten top-level sums into signed terms (finite sums stay single terms)."""
    if isinstance(e, Add):
        return additive_terms(e.left) + additive_terms(e.right)
    if isinstance(e, Sub):
        return additive_terms(e.left) + [(-s, t) for s, t in additive_terms(e.right)]
    if isinstance(e, Neg):
        return [(-s, t) for s, t in additive_terms(e.operand)]
    return [(1, e)]
