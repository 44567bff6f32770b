"""Compile DSL expressions to exact q-series and compare them.

Every subexpression becomes a fraction num/den of formal series. A
denominator whose leading coefficient is a unit monomial is inverted on the
spot; any other denominator (e.g. sin z = (e^{iz} - e^{-iz})/2i) is carried
along, and the final comparison cross-multiplies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .. import qformal as fq
from ..errors import NotFormalError, NotUnitError, TruncationError
from ..functions import EISENSTEIN_A
from .dsl import (
    FREE_VARS,
    Add,
    Div,
    EisensteinA,
    Eta,
    ExpI,
    Expr,
    FiniteSum,
    ImagUnit,
    Lambert,
    Mul,
    Neg,
    Num,
    Pi,
    Pow,
    QPow,
    Sub,
    Theta,
    Trig,
    Var,
    free_vars,
)
from .evaluate import exact_int, exact_value

MARGINS = (2, 6, 14, 30)  # extra powers of q tried when truncation runs short

# ---------------------------------------------------------------------------
# Linear forms  c_1 v_1 + ... + a pi + b pi tau


@dataclass(frozen=True)
class LinearForm:
    coeffs: dict  # free variable -> Fraction
    pi: Fraction
    pitau: Fraction


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = tuple(sorted(ka + kb))
            out[k] = out.get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


def _poly(e: Expr, env) -> dict:
    """Polynomial in the symbols pi, tau and the free variables, rational coefficients."""
    v = exact_value(e, env)
    if v is not None:
        return {(): v} if v else {}
    if isinstance(e, Pi):
        return {("pi",): Fraction(1)}
    if isinstance(e, Var):
        if e.name == "tau" or e.name in FREE_VARS:
            return {(e.name,): Fraction(1)}
        raise NotFormalError(f"symbol {e.name!r} has no exact value")
    if isinstance(e, (Add, Sub)):
        a, b = _poly(e.left, env), _poly(e.right, env)
        sign = 1 if isinstance(e, Add) else -1
        out = dict(a)
        for k, c in b.items():
            out[k] = out.get(k, 0) + sign * c
        return {k: c for k, c in out.items() if c}
    if isinstance(e, Neg):
        return {k: -c for k, c in _poly(e.operand, env).items()}
    if isinstance(e, Mul):
        return _poly_mul(_poly(e.left, env), _poly(e.right, env))
    if isinstance(e, Div):
        d = exact_value(e.right, env)
        if d is None or d == 0:
            raise NotFormalError("argument divides by a non-constant")
        return {k: c / d for k, c in _poly(e.left, env).items()}
    raise NotFormalError(f"argument node {type(e).__name__} is not a linear form")


def linear_form(e: Expr, env: Mapping[str, object]) -> LinearForm:
    coeffs: dict = {}
    pi = pitau = Fraction(0)
    for k, c in _poly(e, env).items():
        if k == ("pi",):
            pi = c
        elif k == ("pi", "tau"):
            pitau = c
        elif len(k) == 1 and k[0] in FREE_VARS:
            coeffs[k[0]] = c
        else:
            raise NotFormalError(f"term {'*'.join(k) or '1'} is not of the form v, pi or pi*tau")
    return LinearForm(coeffs, pi, pitau)


def exp_monomial(form: LinearForm, vars) -> fq.FormalSeries:
    """e^{i * form} as an exact monomial."""
    exps = []
    for v in vars:
        c = form.coeffs.get(v, Fraction(0))
        if c.denominator != 1:
            raise NotFormalError(f"fractional coefficient of {v} in an exponential")
        exps.append(c.numerator)
    if (2 * form.pi).denominator != 1:
        raise NotFormalError("pi multiple does not give a Gaussian unit")
    grain = Fraction(fq.GRAINS, 2) * form.pitau
    if grain.denominator != 1:
        raise NotFormalError("pi*tau multiple is not a multiple of 1/24 in q")
    poly = fq.LaurentPoly.monomial(tuple(exps), fq.i_power(int(2 * form.pi)), tuple(vars))
    return fq.fs_monomial(grain.numerator, poly)


# ---------------------------------------------------------------------------
# Fractions of series


@dataclass(frozen=True)
class Frac:
    num: fq.FormalSeries
    den: fq.FormalSeries


class Compiler:
    def __init__(self, vars, order: int):
        self.vars = tuple(vars)
        self.order = order  # powers of q built by constructors
        self.one = fq.fs_one(self.vars)

    def const(self, c) -> Frac:
        return Frac(fq.fs_const(c, self.vars), self.one)

    def series(self, s: fq.FormalSeries) -> Frac:
        return Frac(fq.fs_lift(s, self.vars), self.one)

    def normalize(self, f: Frac) -> Frac:
        den = f.den
        if den.is_exact() and den.coeffs == self.one.coeffs:
            return f
        try:
            inv = fq.fs_invert(den, fq.GRAINS * self.order if den.is_exact() else None)
        except NotUnitError:
            return f
        return Frac(fq.fs_mul(f.num, inv), self.one)

    def add(self, a: Frac, b: Frac, sign: int = 1) -> Frac:
        bn = b.num if sign == 1 else fq.fs_neg(b.num)
        if a.den == b.den:
            return Frac(fq.fs_add(a.num, bn), a.den)
        num = fq.fs_add(fq.fs_mul(a.num, b.den), fq.fs_mul(bn, a.den))
        return self.normalize(Frac(num, fq.fs_mul(a.den, b.den)))

    def mul(self, a: Frac, b: Frac) -> Frac:
        return self.normalize(Frac(fq.fs_mul(a.num, b.num), fq.fs_mul(a.den, b.den)))

    def inverse(self, a: Frac) -> Frac:
        if not a.num.coeffs:
            raise NotFormalError("division by an identically zero series")
        return self.normalize(Frac(a.den, a.num))

    def power(self, a: Frac, n: int) -> Frac:
        if n < 0:
            a, n = self.inverse(a), -n
        return self.normalize(Frac(fq.fs_pow(a.num, n), fq.fs_pow(a.den, n)))

    def tau_scale(self, e: Expr, env) -> Fraction:
        s = exact_value(e, env)
        if s is None or s <= 0:
            raise NotFormalError("tau scale must be a positive rational")
        return s

    def __call__(self, e: Expr, env) -> Frac:
        v = exact_value(e, env)
        if v is not None:
            return self.const(v)
        if isinstance(e, ImagUnit):
            return self.const((0, 1))
        if isinstance(e, QPow):
            r = exact_value(e.exponent, env)
            if r is None:
                raise NotFormalError("q exponent must be rational")
            return self.series(fq.fs_monomial(fq._grains(r), vars=self.vars))
        if isinstance(e, (Add, Sub)):
            return self.add(self(e.left, env), self(e.right, env), 1 if isinstance(e, Add) else -1)
        if isinstance(e, Neg):
            a = self(e.operand, env)
            return Frac(fq.fs_neg(a.num), a.den)
        if isinstance(e, Mul):
            return self.mul(self(e.left, env), self(e.right, env))
        if isinstance(e, Div):
            return self.mul(self(e.left, env), self.inverse(self(e.right, env)))
        if isinstance(e, Pow):
            k = exact_value(e.exponent, env)
            if k is None or k.denominator != 1:
                raise NotFormalError("only integer powers are formal")
            return self.power(self(e.base, env), int(k))
        if isinstance(e, Theta):
            form = linear_form(e.arg, env)
            return self.series(
                fq.fs_theta(
                    e.kind,
                    form.coeffs,
                    form.pi,
                    form.pitau,
                    self.tau_scale(e.scale, env),
                    self.order,
                    self.vars,
                    deriv=e.deriv,
                )
            )
        if isinstance(e, Eta):
            s = self.tau_scale(e.scale, env)
            if s.denominator != 1:
                raise NotFormalError("formal eta needs an integer scale")
            return self.series(fq.fs_eta(s.numerator, self.order, self.vars))
        if isinstance(e, EisensteinA):
            s = self.tau_scale(e.scale, env)
            lam = fq.fs_lambert(EISENSTEIN_A, self.order, None, self.vars, s)
            return self.series(fq.fs_add(fq.fs_one(self.vars), fq.fs_scale(lam, 6)))
        if isinstance(e, Lambert):
            s = self.tau_scale(e.scale, env)
            z_var = None
            if e.arg is not None:
                form = linear_form(e.arg, env)
                if form.pi or form.pitau:
                    raise NotFormalError("Lambert argument must be a combination of variables")
                if any(c.denominator != 1 for c in form.coeffs.values()):
                    raise NotFormalError("Lambert argument needs integer coefficients")
                z_var = {k: c.numerator for k, c in form.coeffs.items()}
            return self.series(fq.fs_lambert(e.spec, self.order, z_var, self.vars, s))
        if isinstance(e, ExpI):
            return self.series(exp_monomial(linear_form(e.arg, env), self.vars))
        if isinstance(e, Trig):
            x = exp_monomial(linear_form(e.arg, env), self.vars)
            xinv = fq.fs_invert(x)
            plus = fq.fs_add(x, xinv)
            minus = fq.fs_sub(x, xinv)
            if e.name == "sin":
                return self.series(fq.fs_scale(minus, (0, Fraction(-1, 2))))
            if e.name == "cos":
                return self.series(fq.fs_scale(plus, Fraction(1, 2)))
            if e.name == "cot":
                return self.normalize(Frac(fq.fs_scale(plus, (0, 1)), minus))
            return self.normalize(Frac(fq.fs_const((0, 2), self.vars), minus))
        if isinstance(e, FiniteSum):
            lo = exact_int(e.lo, env, "summation bound")
            hi = exact_int(e.hi, env, "summation bound")
            total = self.const(0)
            inner = dict(env)
            for k in range(lo, hi + 1):
                inner[e.index] = k
                total = self.add(total, self(e.body, inner))
            return total
        if isinstance(e, (Var, Pi)):
            raise NotFormalError(f"bare {type(e).__name__.lower()} outside a function argument")
        raise NotFormalError(f"{type(e).__name__} has no exact q-expansion")


@dataclass(frozen=True)
class FormalResult:
    equal: bool
    order: int  # powers of q compared
    first_mismatch: Fraction | None = None  # q exponent of the first differing coefficient
    left: str | None = None
    right: str | None = None


def compare_formal(lhs: Expr, rhs: Expr, order: int, env: Mapping[str, object] | None = None) -> FormalResult:
    """Exact comparison of lhs and rhs through q^order (exclusive of q^order)."""
    env = dict(env or {})
    vars = tuple(sorted(free_vars(lhs) | free_vars(rhs)))
    last: Exception | None = None
    for margin in MARGINS:
        comp = Compiler(vars, order + margin)
        try:
            left = comp(lhs, env)
            right = comp(rhs, env)
            lv = left.den.valuation() or 0
            rv = right.den.valuation() or 0
            target = fq.GRAINS * order + lv + rv
            a = fq.fs_mul(left.num, right.den)
            b = fq.fs_mul(right.num, left.den)
            res = fq.fs_equal_through(a, b, target)
        except TruncationError as exc:
            last = exc
            continue
        if res.equal:
            return FormalResult(True, order)
        exponent = Fraction(res.exponent - lv - rv, fq.GRAINS)
        return FormalResult(False, order, exponent, str(res.left), str(res.right))
    raise TruncationError(f"series truncation insufficient for order {order}: {last}")


def fmt_q(exponent: Fraction) -> str:
    return f"q^{exponent.numerator}" if exponent.denominator == 1 else f"q^({exponent})"

