"""Exact truncated q-series with Laurent-polynomial coefficients.

Exponents of q are stored as integers counting units of q^{1/24} ("grains").
Coefficients are Laurent polynomials over the Gaussian rationals in
unit-circle variables; a variable named ``z`` stands for e^{iz}, so the
monomial z^k means e^{ikz}.

A series knows its coefficients exactly below ``truncation_order`` (in
grains) and nothing at or above it; ``math.inf`` marks an exact finite sum.
Constructors that build series from scratch (``fs_eta``, ``fs_lambert``,
``fs_theta``) take ``order`` in whole powers of q; everything that inspects
an existing series (``fs_coefficient``, ``fs_equal_through``) works in grains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import NotFormalError, NotUnitError, TruncationError, VariableMismatchError
from .functions import LambertSpec

GRAINS = 24

# ---------------------------------------------------------------------------
# Gaussian rationals as (re, im) pairs of int/Fraction


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def gauss(c) -> tuple:
    """Coerce int, Fraction, (re, im) or a complex with integral parts."""
    if isinstance(c, tuple):
        return (_norm(c[0]), _norm(c[1]))
    if isinstance(c, complex):
        re, im = c.real, c.imag
        if re != int(re) or im != int(im):
            raise NotFormalError(f"coefficient {c} is not a Gaussian integer")
        return (int(re), int(im))
    if isinstance(c, (int, Fraction)):
        return (_norm(c), 0)
    raise NotFormalError(f"cannot use {c!r} as an exact coefficient")


ZERO = (0, 0)
ONE = (1, 0)
I_UNIT = (0, 1)


def g_add(a, b):
    return (_norm(a[0] + b[0]), _norm(a[1] + b[1]))


def g_mul(a, b):
    return (_norm(a[0] * b[0] - a[1] * b[1]), _norm(a[0] * b[1] + a[1] * b[0]))


def g_neg(a):
    return (-a[0], -a[1])


def g_inv(a):
    n = a[0] * a[0] + a[1] * a[1]
    if n == 0:
        raise ZeroDivisionError("inverse of zero")
    return (_norm(Fraction(a[0]) / n), _norm(Fraction(-a[1]) / n))


def g_is_unit(a) -> bool:
    return a in ((1, 0), (-1, 0), (0, 1), (0, -1))


def g_complex(a) -> complex:
    return complex(float(a[0]), float(a[1]))


def g_str(a) -> str:
    re, im = a
    if im == 0:
        return str(re)
    if re == 0:
        return f"{im}i"
    return f"({re}{'+' if im > 0 else '-'}{abs(im)}i)"


def i_power(k: int):
    return ((1, 0), (0, 1), (-1, 0), (0, -1))[k % 4]


# ---------------------------------------------------------------------------
# Laurent polynomials


@dataclass(frozen=True, eq=True)
class LaurentPoly:
    """Sparse Laurent polynomial in unit-circle variables ``vars``."""

    vars: tuple[str, ...]
    terms: Mapping[tuple[int, ...], tuple] = field(default_factory=dict)

    @staticmethod
    def zero(vars: tuple[str, ...] = ()) -> "LaurentPoly":
        return LaurentPoly(tuple(vars), {})

    @staticmethod
    def const(c, vars: tuple[str, ...] = ()) -> "LaurentPoly":
        c = gauss(c)
        vars = tuple(vars)
        return LaurentPoly(vars, {} if c == ZERO else {(0,) * len(vars): c})

    @staticmethod
    def monomial(exps: Iterable[int], c=1, vars: tuple[str, ...] = ()) -> "LaurentPoly":
        c = gauss(c)
        exps = tuple(exps)
        if len(exps) != len(vars):
            raise VariableMismatchError("exponent vector does not match variables")
        return LaurentPoly(tuple(vars), {} if c == ZERO else {exps: c})

    def _check(self, other: "LaurentPoly"):
        if self.vars != other.vars:
            raise VariableMismatchError(f"variables {self.vars} vs {other.vars}")

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = g_add(out.get(e, ZERO), c)
            if s == ZERO:
                out.pop(e, None)
            else:
                out[e] = s
        return LaurentPoly(self.vars, out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.vars, {e: g_neg(c) for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = g_add(out.get(e, ZERO), g_mul(c1, c2))
                if s == ZERO:
                    out.pop(e, None)
                else:
                    out[e] = s
        return LaurentPoly(self.vars, out)

    def scale(self, c) -> "LaurentPoly":
        c = gauss(c)
        if c == ZERO:
            return LaurentPoly.zero(self.vars)
        return LaurentPoly(self.vars, {e: g_mul(v, c) for e, v in self.terms.items()})

    def shift(self, exps: tuple[int, ...]) -> "LaurentPoly":
        return LaurentPoly(
            self.vars, {tuple(a + b for a, b in zip(e, exps)): c for e, c in self.terms.items()}
        )

    def unit_monomial(self):
        """(exponents, coefficient) if this is a single term with a unit coefficient."""
        if len(self.terms) != 1:
            return None
        (e, c), = self.terms.items()
        return (e, c) if g_is_unit(c) else None

    def lift(self, vars: tuple[str, ...]) -> "LaurentPoly":
        """Embed into a polynomial ring over a superset of variables."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        missing = [v for v in self.vars if v not in vars]
        if missing:
            raise VariableMismatchError(f"cannot drop variables {missing}")
        index = [self.vars.index(v) if v in self.vars else None for v in vars]
        out = {tuple(0 if j is None else e[j] for j in index): c for e, c in self.terms.items()}
        return LaurentPoly(vars, out)

    def evaluate(self, angles: Mapping[str, complex]) -> complex:
        import cmath

        total = 0j
        for e, c in self.terms.items():
            phase = sum(k * complex(angles[v]) for k, v in zip(e, self.vars))
            total += g_complex(c) * cmath.exp(1j * phase)
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            mono = "*".join(f"e^(i*{k}*{v})" for k, v in zip(e, self.vars) if k)
            coef = g_str(self.terms[e])
            parts.append(f"{coef}*{mono}" if mono else coef)
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Formal series


@dataclass(frozen=True)
class FormalSeries:
    vars: tuple[str, ...]
    coeffs: Mapping[int, LaurentPoly]
    truncation_order: float  # grains; math.inf for an exact (finite) series

    def __post_init__(self):
        for g, p in self.coeffs.items():
            if g >= self.truncation_order:
                raise TruncationError(f"stored exponent {g} beyond truncation {self.truncation_order}")
            if p.is_zero():
                raise ValueError("zero coefficient stored")

    def valuation(self):
        return min(self.coeffs) if self.coeffs else None

    def is_exact(self) -> bool:
        return self.truncation_order == math.inf

    def __str__(self) -> str:
        parts = [f"[{p}]*q^({g}/24)" for g, p in sorted(self.coeffs.items())]
        tail = "" if self.is_exact() else f" + O(q^({self.truncation_order}/24))"
        return (" + ".join(parts) or "0") + tail


def _build(vars, coeffs: dict, trunc) -> FormalSeries:
    clean = {g: p for g, p in coeffs.items() if g < trunc and not p.is_zero()}
    return FormalSeries(tuple(vars), clean, trunc)


def fs_zero(vars=(), trunc=math.inf) -> FormalSeries:
    return FormalSeries(tuple(vars), {}, trunc)


def fs_const(c, vars=()) -> FormalSeries:
    return _build(vars, {0: LaurentPoly.const(c, tuple(vars))}, math.inf)


def fs_one(vars=()) -> FormalSeries:
    return fs_const(1, vars)


def fs_monomial(grain: int, poly: LaurentPoly | None = None, vars=()) -> FormalSeries:
    vars = tuple(vars) if poly is None else poly.vars
    poly = LaurentPoly.const(1, vars) if poly is None else poly
    return _build(vars, {grain: poly}, math.inf)


def fs_lift(a: FormalSeries, vars) -> FormalSeries:
    vars = tuple(vars)
    if a.vars == vars:
        return a
    return FormalSeries(vars, {g: p.lift(vars) for g, p in a.coeffs.items()}, a.truncation_order)


def fs_truncate(a: FormalSeries, trunc) -> FormalSeries:
    if trunc >= a.truncation_order:
        return a
    return _build(a.vars, dict(a.coeffs), trunc)


def _check_vars(a: FormalSeries, b: FormalSeries):
    if a.vars != b.vars:
        raise VariableMismatchError(f"variable sets differ: {a.vars} vs {b.vars}")


def fs_add(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    _check_vars(a, b)
    trunc = min(a.truncation_order, b.truncation_order)
    out = {g: p for g, p in a.coeffs.items() if g < trunc}
    for g, p in b.coeffs.items():
        if g >= trunc:
            continue
        out[g] = out[g] + p if g in out else p
    return _build(a.vars, out, trunc)


def fs_neg(a: FormalSeries) -> FormalSeries:
    return FormalSeries(a.vars, {g: -p for g, p in a.coeffs.items()}, a.truncation_order)


def fs_sub(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    return fs_add(a, fs_neg(b))


def fs_scale(a: FormalSeries, c) -> FormalSeries:
    c = gauss(c)
    return _build(a.vars, {g: p.scale(c) for g, p in a.coeffs.items()}, a.truncation_order)


def fs_mul_poly(a: FormalSeries, poly: LaurentPoly, grain: int = 0) -> FormalSeries:
    """Multiply by the exact monomial-in-q ``poly * q^(grain/24)``."""
    if poly.vars != a.vars:
        raise VariableMismatchError("polynomial variables differ from series variables")
    return _build(
        a.vars, {g + grain: p * poly for g, p in a.coeffs.items()}, a.truncation_order + grain
    )


def _low(a: FormalSeries):
    v = a.valuation()
    return a.truncation_order if v is None else v


def fs_mul(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    """Cauchy product, valid through min(N_a + val(b), N_b + val(a))."""
    _check_vars(a, b)
    trunc = min(a.truncation_order + _low(b), b.truncation_order + _low(a))
    out: dict[int, LaurentPoly] = {}
    for ga, pa in a.coeffs.items():
        for gb, pb in b.coeffs.items():
            g = ga + gb
            if g >= trunc:
                continue
            prod = pa * pb
            out[g] = out[g] + prod if g in out else prod
    return _build(a.vars, out, trunc)


def fs_invert(a: FormalSeries, order: float | None = None) -> FormalSeries:
    """Multiplicative inverse of a series whose leading coefficient is a unit monomial.

    ``order`` (grains) bounds the result when ``a`` is exact but not a
    single term; for truncated input the result is valid through
    N - 2 * val(a).
    """
    v = a.valuation()
    if v is None:
        raise NotUnitError("cannot invert the zero series")
    lead = a.coeffs[v].unit_monomial()
    if lead is None:
        raise NotUnitError(f"leading coefficient {a.coeffs[v]} is not a unit monomial")
    exps, c = lead
    inv_lead = LaurentPoly.monomial(tuple(-e for e in exps), g_inv(c), a.vars)
    if len(a.coeffs) == 1 and a.is_exact():
        return _build(a.vars, {-v: inv_lead}, math.inf)
    if a.is_exact():
        if order is None:
            raise TruncationError("order required to invert an exact multi-term series")
        trunc = order
    else:
        trunc = a.truncation_order - 2 * v
        if order is not None:
            trunc = min(trunc, order)
    # work relative to the leading term: a = q^v * lead * (1 + r)
    rel = {g - v: p * inv_lead for g, p in a.coeffs.items() if g != v}
    length = trunc + v  # relative exponents needed: 0 .. length-1
    out: dict[int, LaurentPoly] = {0: LaurentPoly.const(1, a.vars)}
    keys = sorted(rel)
    k = 1
    while k < length:
        acc = None
        for j in keys:
            if j > k:
                break
            prev = out.get(k - j)
            if prev is None:
                continue
            term = rel[j] * prev
            acc = term if acc is None else acc + term
        if acc is not None and not acc.is_zero():
            out[k] = -acc
        k += 1
    return _build(a.vars, {g - v: p * inv_lead for g, p in out.items()}, trunc)


def fs_pow(a: FormalSeries, n: int, order: float | None = None) -> FormalSeries:
    if n < 0:
        return fs_pow(fs_invert(a, order), -n)
    result = fs_one(a.vars)
    base = a
    while n:
        if n & 1:
            result = fs_mul(result, base)
        n >>= 1
        if n:
            base = fs_mul(base, base)
    return result


# ---------------------------------------------------------------------------
# Constructors


def _int_series(vars, ints: Mapping[int, object], trunc) -> FormalSeries:
    vars = tuple(vars)
    return _build(vars, {g: LaurentPoly.const(c, vars) for g, c in ints.items() if c}, trunc)


def fs_eta(scale: int = 1, order: int = 40, vars=()) -> FormalSeries:
    """eta(scale*tau) = q^{scale/24} prod (1 - q^{scale n}) through q^order."""
    if order < 1:
        raise ValueError("order must be at least 1")
    if scale < 1 or int(scale) != scale:
        raise NotFormalError("formal eta needs a positive integer scale")
    trunc = GRAINS * order
    step = GRAINS * scale
    poly = {scale: 1}
    n = 1
    while scale + step * n < trunc:
        shift = step * n
        nxt = dict(poly)
        for g, c in poly.items():
            if g + shift < trunc:
                nxt[g + shift] = nxt.get(g + shift, 0) - c
        poly = {g: c for g, c in nxt.items() if c}
        n += 1
    return _int_series(vars, poly, trunc)


def _trig_poly(kind: str, k: int, var_coeffs: Mapping[str, int], vars) -> LaurentPoly:
    """sin, cos or sin^2 of k * (linear form) as a Laurent polynomial."""
    base = tuple(var_coeffs.get(v, 0) for v in vars)
    up = tuple(k * e for e in base)
    down = tuple(-k * e for e in base)
    if kind == "sin":
        half_i = (0, Fraction(-1, 2))  # 1/(2i)
        return LaurentPoly.monomial(up, half_i, vars) + LaurentPoly.monomial(down, g_neg(half_i), vars)
    if kind == "cos":
        h = Fraction(1, 2)
        return LaurentPoly.monomial(up, h, vars) + LaurentPoly.monomial(down, h, vars)
    if kind == "sin2":
        up2 = tuple(2 * e for e in up)
        down2 = tuple(2 * e for e in down)
        q = Fraction(-1, 4)
        return (
            LaurentPoly.const(Fraction(1, 2), vars)
            + LaurentPoly.monomial(up2, q, vars)
            + LaurentPoly.monomial(down2, q, vars)
        )
    raise NotFormalError(f"unsupported trig {kind!r}")


def _grains(x: Fraction) -> int:
    g = Fraction(x) * GRAINS
    if g.denominator != 1:
        raise NotFormalError(f"exponent {x} is not a multiple of 1/24")
    return g.numerator


def fs_lambert(
    spec: LambertSpec,
    order: int = 40,
    z_var: str | Mapping[str, int] | None = None,
    vars=None,
    tau_scale: int = 1,
) -> FormalSeries:
    """Exact expansion of sum_n (spec summand) through q^order.

    ``z_var`` names the trig variable (or gives an integer linear form in
    several variables); it is required unless ``spec.trig`` is none.
    """
    if spec.trig != "none" and z_var is None:
        raise NotFormalError("a trig Lambert series needs a z variable")
    if isinstance(z_var, str):
        z_var = {z_var: 1}
    z_var = dict(z_var or {})
    if vars is None:
        vars = tuple(sorted(z_var))
    vars = tuple(vars)
    trunc = GRAINS * order
    a = spec.num_exponent * tau_scale
    b = spec.den_exponent * tau_scale
    out: dict[int, LaurentPoly] = {}
    n = 1
    while _grains(a * n) < trunc:
        c = spec.outer(n)
        if c:
            trig = LaurentPoly.const(c, vars)
            if spec.trig != "none":
                trig = _trig_poly(spec.trig, spec.freq * n, z_var, vars).scale(c)
            j = 0
            while True:
                if spec.inner_modulus > 1:
                    g = _grains(a * n * (j + 1))
                else:
                    g = _grains(n * (a + b * j))
                if g >= trunc:
                    break
                w = spec.inner(j)
                if w:
                    term = trig.scale(w)
                    out[g] = out[g] + term if g in out else term
                j += 1
        n += 1
    return _build(vars, out, trunc)


def _alt(n: int) -> int:
    return -1 if n % 2 else 1


def _theta_terms(kind: int):
    """Bilateral form theta = unit * sum_n sign(n) Q^{e(n)} e^{i k(n) w}."""
    if kind == 3:
        return ONE, lambda n: 1, lambda n: Fraction(n * n, 2), lambda n: 2 * n
    if kind == 4:
        return ONE, _alt, lambda n: Fraction(n * n, 2), lambda n: 2 * n
    if kind == 2:
        return ONE, lambda n: 1, lambda n: Fraction((2 * n + 1) ** 2, 8), lambda n: 2 * n + 1
    if kind == 1:
        return (0, -1), _alt, lambda n: Fraction((2 * n + 1) ** 2, 8), lambda n: 2 * n + 1
    raise NotFormalError(f"theta kind must be 1..4, got {kind}")


def fs_theta(
    kind: int,
    lin: Mapping[str, Fraction | int],
    pi_shift=Fraction(0),
    tau_shift=Fraction(0),
    tau_scale=1,
    order: int = 10,
    vars=None,
    deriv: int = 0,
) -> FormalSeries:
    """theta_kind(sum lin[v]*v + pi_shift*pi + tau_shift*pi*tau | tau_scale*tau).

    ``deriv`` > 0 gives the derivative of that order with respect to the
    argument (each term e^{ikw} picks up (ik)^deriv).

    Every exponential must reduce to a Gaussian unit times a monomial in
    q^{1/24} and the variables, otherwise :class:`NotFormalError`.
    """
    lin = {v: Fraction(c) for v, c in lin.items() if c}
    if vars is None:
        vars = tuple(sorted(lin))
    vars = tuple(vars)
    for v in lin:
        if v not in vars:
            raise VariableMismatchError(f"variable {v} not in {vars}")
    pi_shift, tau_shift, s = Fraction(pi_shift), Fraction(tau_shift), Fraction(tau_scale)
    if s <= 0:
        raise NotFormalError("tau scale must be positive")
    unit, sign, qexp, freq = _theta_terms(kind)
    trunc = GRAINS * order
    out: dict[int, LaurentPoly] = {}
    # grain(n) = 24 s e(n) + 12 k(n) d grows quadratically; scan a window
    span = int(math.isqrt(int(trunc / float(s)) + 1)) + int(abs(4 * tau_shift / s)) + 4
    for n in range(-span, span + 1):
        k = freq(n)
        g = s * qexp(n) * GRAINS + 12 * k * tau_shift
        if g.denominator != 1:
            raise NotFormalError("theta term exponent is not a multiple of 1/24")
        g = g.numerator
        if g >= trunc:
            continue
        phase = k * pi_shift  # e^{i pi phase}
        if (2 * phase).denominator != 1:
            raise NotFormalError(f"pi shift {pi_shift} does not give a Gaussian unit")
        exps = []
        for v in vars:
            e = k * lin.get(v, 0)
            if e.denominator != 1:
                raise NotFormalError(f"coefficient of {v} gives a fractional frequency")
            exps.append(e.numerator)
        c = g_mul(g_mul(unit, gauss(sign(n))), i_power(int(2 * phase)))
        if deriv:
            if k == 0:
                continue
            c = g_mul(c, g_mul(gauss(k**deriv), i_power(deriv)))
        term = LaurentPoly.monomial(tuple(exps), c, vars)
        out[g] = out[g] + term if g in out else term
    return _build(vars, out, trunc)


def fs_theta_x(kind: int, z_scale: int = 1, tau_scale: int = 1, order: int = 10, var: str = "z") -> FormalSeries:
    """theta_kind(z_scale*z | tau_scale*tau) with coefficients in e^{iz}."""
    return fs_theta(kind, {var: z_scale}, tau_scale=tau_scale, order=order, vars=(var,))


def fs_trig(kind: str, lin: Mapping[str, int], vars) -> FormalSeries:
    """sin, cos or e^{i*} of an integer linear form, as an exact series."""
    vars = tuple(vars)
    if kind == "exp":
        exps = tuple(int(lin.get(v, 0)) for v in vars)
        return fs_monomial(0, LaurentPoly.monomial(exps, 1, vars))
    return fs_monomial(0, _trig_poly(kind, 1, lin, vars))


# ---------------------------------------------------------------------------
# Inspection


def fs_coefficient(a: FormalSeries, grain_exponent: int) -> LaurentPoly:
    if grain_exponent >= a.truncation_order:
        raise TruncationError(
            f"exponent {grain_exponent} is beyond the truncation order {a.truncation_order}"
        )
    return a.coeffs.get(grain_exponent, LaurentPoly.zero(a.vars))


@dataclass(frozen=True)
class SeriesComparison:
    equal: bool
    order: float
    exponent: int | None = None  # first mismatching grain exponent
    left: LaurentPoly | None = None
    right: LaurentPoly | None = None

    def __bool__(self) -> bool:
        return self.equal


def fs_equal_through(a: FormalSeries, b: FormalSeries, order: float) -> SeriesComparison:
    """Exact comparison of all coefficients with grain exponent below ``order``."""
    _check_vars(a, b)
    if order > min(a.truncation_order, b.truncation_order):
        raise TruncationError(
            f"order {order} exceeds the shared validity "
            f"{min(a.truncation_order, b.truncation_order)}"
        )
    keys = sorted(g for g in set(a.coeffs) | set(b.coeffs) if g < order)
    zero = LaurentPoly.zero(a.vars)
    for g in keys:
        pa, pb = a.coeffs.get(g, zero), b.coeffs.get(g, zero)
        if pa != pb:
            return SeriesComparison(False, order, g, pa, pb)
    return SeriesComparison(True, order)


def fs_evaluate(a: FormalSeries, mp, angles: Mapping[str, complex] | None = None) -> complex:
    """Numeric value of the known part of ``a`` at a :class:`ModularPoint`."""
    angles = angles or {}
    total = 0j
    for g, p in a.coeffs.items():
        total += complex(mp.qpow(Fraction(g, GRAINS))) * p.evaluate(angles)
    return total
