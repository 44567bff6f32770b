"""Numeric evaluation of DSL expressions."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from ..core import ModularPoint, is_equivalent, q_pochhammer
from ..errors import DomainError, PoleError, UnboundVariableError
from ..functions import bilateral_lambert, eisenstein_a, lambert_sum, ramanujan_1psi1, weierstrass_p
from ..precision import ops
from ..theta import eta, theta
from . import dsl
from .dsl import (
    Add,
    Div,
    EisensteinA,
    Eta,
    ExpI,
    Expr,
    FiniteSum,
    ImagUnit,
    Lambert,
    LSum,
    Mul,
    Neg,
    Num,
    Pi,
    Pow,
    Psi11,
    QPoch,
    QPow,
    Sqrt,
    Sub,
    Theta,
    Trig,
    Var,
    WeierstrassP,
)

ZERO_TOL = 1e-10  # reduced-coordinate distance treated as "at a zero"


def exact_value(e: Expr, env: Mapping[str, object]) -> Fraction | None:
    """Rational value of ``e`` when it is built from literals and integer parameters."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        val = env.get(e.name)
        if isinstance(val, (int, Fraction)) and not isinstance(val, bool):
            return Fraction(val)
        return None
    if isinstance(e, Neg):
        v = exact_value(e.operand, env)
        return None if v is None else -v
    if isinstance(e, (Add, Sub, Mul, Div)):
        a = exact_value(e.left, env)
        b = exact_value(e.right, env)
        if a is None or b is None:
            return None
        if isinstance(e, Add):
            return a + b
        if isinstance(e, Sub):
            return a - b
        if isinstance(e, Mul):
            return a * b
        if b == 0:
            raise PoleError("division by zero", e)
        return a / b
    if isinstance(e, Pow):
        a = exact_value(e.base, env)
        b = exact_value(e.exponent, env)
        if a is None or b is None or b.denominator != 1:
            return None
        if a == 0 and b < 0:
            raise PoleError("zero to a negative power", e)
        return a ** int(b)
    return None


def exact_int(e: Expr, env, what: str) -> int:
    v = exact_value(e, env)
    if v is None or v.denominator != 1:
        raise DomainError(f"{what} must be an integer")
    return v.numerator


class Evaluator:
    """Evaluates expressions at one modular point; caches the scaled points."""

    def __init__(self, mp: ModularPoint):
        self.mp = mp
        self._points: dict[Fraction, ModularPoint] = {Fraction(1): mp}

    def point(self, scale: Expr, env) -> ModularPoint:
        s = exact_value(scale, env)
        if s is None or s <= 0:
            raise DomainError("tau scale must be a positive rational")
        if s not in self._points:
            self._points[s] = self.mp.scaled(s)
        return self._points[s]

    def __call__(self, e: Expr, env: Mapping[str, object]):
        o = ops()
        if isinstance(e, Num):
            return o.num(e.value.numerator) / e.value.denominator
        if isinstance(e, ImagUnit):
            return o.num(1j)
        if isinstance(e, Pi):
            return o.num(o.pi)
        if isinstance(e, Var):
            if e.name == "tau":
                return self.mp.tau
            if e.name not in env:
                raise UnboundVariableError(f"variable {e.name!r} is not bound")
            return o.num(env[e.name])
        if isinstance(e, QPow):
            r = exact_value(e.exponent, env)
            if r is not None:
                return self.mp.qpow(r)
            return o.exp(2j * o.pi * self.mp.tau * self(e.exponent, env))
        if isinstance(e, Add):
            return self(e.left, env) + self(e.right, env)
        if isinstance(e, Sub):
            return self(e.left, env) - self(e.right, env)
        if isinstance(e, Mul):
            return self(e.left, env) * self(e.right, env)
        if isinstance(e, Neg):
            return -self(e.operand, env)
        if isinstance(e, Div):
            bad = self.zero_factor(e.right, env)
            if bad is not None:
                raise PoleError(f"denominator vanishes at {dsl.to_text(bad)}", bad)
            den = self(e.right, env)
            if den == 0:
                raise PoleError(f"denominator {dsl.to_text(e.right)} is zero", e.right)
            return self(e.left, env) / den
        if isinstance(e, Pow):
            k = exact_value(e.exponent, env)
            if k is not None and k.denominator == 1:
                if k < 0:
                    bad = self.zero_factor(e.base, env)
                    if bad is not None:
                        raise PoleError(f"negative power of a vanishing factor {dsl.to_text(bad)}", bad)
                base = self(e.base, env)
                if base == 0 and k < 0:
                    raise PoleError("zero to a negative power", e)
                return base ** int(k)
            base = self(e.base, env)
            return o.exp(self(e.exponent, env) * o.log(base))
        if isinstance(e, Theta):
            return theta(e.kind, self(e.arg, env), self.point(e.scale, env), e.deriv)
        if isinstance(e, Eta):
            return eta(self.point(e.scale, env))
        if isinstance(e, EisensteinA):
            return eisenstein_a(self.point(e.scale, env))
        if isinstance(e, WeierstrassP):
            try:
                return weierstrass_p(self(e.arg, env), self.point(e.scale, env))
            except PoleError as exc:
                raise PoleError(str(exc), e) from None
        if isinstance(e, ExpI):
            return o.exp(1j * self(e.arg, env))
        if isinstance(e, Trig):
            w = self(e.arg, env)
            if e.name == "sin":
                return o.sin(w)
            if e.name == "cos":
                return o.cos(w)
            s = o.sin(w)
            if self._near_multiple_of_pi(w):
                raise PoleError(f"{e.name} has a pole at {dsl.to_text(e.arg)}", e)
            return o.cos(w) / s if e.name == "cot" else 1 / s
        if isinstance(e, Sqrt):
            return o.sqrt(self(e.arg, env))
        if isinstance(e, Lambert):
            z = 0 if e.arg is None else self(e.arg, env)
            return lambert_sum(e.spec, z, self.point(e.scale, env))
        if isinstance(e, FiniteSum):
            lo = exact_int(e.lo, env, "summation bound")
            hi = exact_int(e.hi, env, "summation bound")
            total = o.num(0)
            inner = dict(env)
            for k in range(lo, hi + 1):
                inner[e.index] = k
                total += self(e.body, inner)
            return total
        if isinstance(e, Psi11):
            mp = self.point(e.scale, env)
            lhs, _ = ramanujan_1psi1(self(e.a, env), self(e.b, env), self(e.x, env), mp.q)
            return lhs
        if isinstance(e, QPoch):
            mp = self.point(e.scale, env)
            return q_pochhammer(self(e.a, env), mp.q)
        if isinstance(e, LSum):
            mp = self.point(e.scale, env)
            try:
                return bilateral_lambert(self(e.x, env), self(e.a, env), mp)
            except PoleError as exc:
                raise PoleError(str(exc), e) from None
        raise TypeError(f"cannot evaluate {type(e).__name__}")

    def _near_multiple_of_pi(self, w) -> bool:
        o = ops()
        n = round(float(w.real) / float(o.pi)) if hasattr(w, "real") else 0
        return abs(complex(w) - n * complex(o.pi)) < ZERO_TOL

    def zero_factor(self, e: Expr, env) -> Expr | None:
        """A multiplicative factor of ``e`` that sits at a known zero, if any."""
        if isinstance(e, Mul):
            return self.zero_factor(e.left, env) or self.zero_factor(e.right, env)
        if isinstance(e, Div):
            return self.zero_factor(e.left, env)
        if isinstance(e, Neg):
            return self.zero_factor(e.operand, env)
        if isinstance(e, Pow):
            k = exact_value(e.exponent, env)
            if k is not None and k > 0:
                return self.zero_factor(e.base, env)
            return None
        if isinstance(e, Theta) and e.deriv == 0:
            mp = self.point(e.scale, env)
            w = complex(self(e.arg, env))
            pi = complex(ops().pi)
            pitau = pi * complex(mp.tau)
            root = {1: 0, 2: pi / 2, 3: (pi + pitau) / 2, 4: pitau / 2}[e.kind]
            if is_equivalent(w - root, 0, complex(mp.tau), ZERO_TOL):
                return e
            return None
        if isinstance(e, Trig) and e.name == "sin":
            return e if self._near_multiple_of_pi(self(e.arg, env)) else None
        return None


def eval_expr(e: Expr, bindings: Mapping[str, object], mp: ModularPoint):
    """Numeric value of ``e`` with the given variable and parameter bindings."""
    return Evaluator(mp)(e, dict(bindings))
