"""Kronecker theta function, bilateral sums, Weierstrass p and Lambert series."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import ModularPoint, is_equivalent, jacobi_symbol, multi_pochhammer
from .errors import ConvergenceError, DomainError, PoleError
from .precision import ops
from .theta import theta, theta1_prime0

POLE_TOL = 1e-12
MAX_TERMS = 200_000


def _check_not_lattice(w, mp: ModularPoint, what: str):
    if is_equivalent(w, 0, mp.tau, POLE_TOL):
        raise PoleError(f"{what} is a lattice point (pole)")


def kronecker_K(y, z, mp: ModularPoint):
    """K_y(z|tau) = theta1'(0) theta1(z+y) / (theta1(z) theta1(y))."""
    _check_not_lattice(z, mp, "z")
    _check_not_lattice(y, mp, "y")
    return theta1_prime0(mp) * theta(1, z + y, mp) / (theta(1, z, mp) * theta(1, y, mp))


def _geometric_side(first, step, ratio_limit, max_terms=MAX_TERMS):
    """Sum a one-sided series whose term ratio tends to ``ratio_limit`` < 1."""
    o = ops()
    total = o.num(0)
    k = 0
    term = first
    while k < max_terms:
        total += term
        nxt = step(k, term)
        r = max(ratio_limit, abs(nxt) / abs(term)) if term != 0 else ratio_limit
        if r < 1 and abs(nxt) * (1 + r / (1 - r)) < o.tail * max(abs(total), 1e-300) and k > 2:
            return total
        term = nxt
        k += 1
    raise ConvergenceError("bilateral series did not converge")


def kronecker_bilateral(y, z, mp: ModularPoint):
    """sum_k e^{2kiy} / (1 - q^k e^{2iz}); converges for 0 < Im y < Im(pi tau).

    The two sides k >= 0 and k < 0 are summed separately, each with its own
    geometric tail bound.
    """
    o = ops()
    q = mp.q
    ey = o.exp(2j * o.num(y))
    ez = o.exp(2j * o.num(z))
    r_plus = abs(ey)
    r_minus = abs(q / ey)
    if not (r_plus < 1 and r_minus < 1):
        raise DomainError("need |q| < |e^{2iy}| < 1 for the bilateral Kronecker sum")
    qinv = 1 / q

    def pos(k, term):
        # term_k = ey^k / (1 - q^k ez)
        qk = q**k
        return term * ey * (1 - qk * ez) / (1 - qk * q * ez)

    def neg(k, term):
        qk = qinv ** (k + 1)
        return term / ey * (1 - qk * ez) / (1 - qk * qinv * ez)

    plus = _geometric_side(1 / (1 - ez), pos, r_plus)
    minus = _geometric_side((1 / ey) / (1 - qinv * ez), neg, r_minus)
    return plus + minus


def bilateral_lambert(x, a, mp: ModularPoint):
    """sum_k x^k / (1 - a q^k) over all integers k; converges for |q| < |x| < 1."""
    o = ops()
    q = mp.q
    x, a = o.num(x), o.num(a)
    if not (abs(q) < abs(x) < 1):
        raise DomainError("need |q| < |x| < 1 for the bilateral Lambert sum")
    for k in range(-64, 64):
        if abs(1 - a * q**k) <= POLE_TOL:
            raise PoleError("a is an integral power of q")

    def pos(k, term):
        qk = q**k
        return term * x * (1 - a * qk) / (1 - a * qk * q)

    def neg(k, term):
        # term_{-j} = x^{-j} q^j / (q^j - a)
        qj = q ** (k + 1)
        return term * q / x * (qj - a) / (qj * q - a)

    plus = _geometric_side(1 / (1 - a), pos, abs(x))
    minus = _geometric_side(q / x / (q - a), neg, abs(q / x))
    return plus + minus


def ramanujan_1psi1(a, b, z, q):
    """Both sides of the 1psi1 summation; returns (bilateral sum, product)."""
    o = ops()
    a, b, z, q = o.num(a), o.num(b), o.num(z), o.num(q)
    if not abs(q) < 1:
        raise DomainError("need |q| < 1")
    if a == 0 or not (abs(b / a) < abs(z) < 1):
        raise DomainError("need |b/a| < |z| < 1")
    for k in range(0, 64):
        if abs(a - q**k) <= 1e-12 * max(1.0, abs(a)):
            raise DomainError("a is an integral power of q")
    if q != 0:
        for k in range(1, 64):
            qk = q ** (-k)
            if abs(a - qk) <= 1e-12 * abs(qk):
                raise DomainError("a is an integral power of q")

    def pos(k, term):
        return term * (1 - a * q**k) / (1 - b * q**k) * z

    def neg(k, term):
        qk = q ** (k + 2)
        return term * (qk - b) / (qk - a) / z

    plus = _geometric_side(o.num(1), pos, abs(z))
    first_neg = (q - b) / (q - a) / z
    minus = _geometric_side(first_neg, neg, abs(b / a) / abs(z)) if first_neg != 0 else 0
    lhs = plus + minus
    rhs = multi_pochhammer([q, b / a, a * z, q / (a * z)], q) / multi_pochhammer(
        [b, q / a, z, b / (a * z)], q
    )
    return lhs, rhs


def weierstrass_p(z, mp: ModularPoint):
    """p(z|tau) for the lattice pi*Z + pi*tau*Z, from the log-derivative of theta1.

    The additive constant theta1'''(0)/(3 theta1'(0)) removes the z^0 term of
    the Laurent expansion at the origin, so p(z) = 1/z^2 + O(z^2).
    """
    _check_not_lattice(z, mp, "z")
    t0 = theta(1, z, mp)
    t1 = theta(1, z, mp, 1)
    t2 = theta(1, z, mp, 2)
    const = theta(1, 0, mp, 3) / (3 * theta(1, 0, mp, 1))
    return -(t2 * t0 - t1 * t1) / (t0 * t0) + const


# ---------------------------------------------------------------------------
# Lambert series


TWISTS = ("none", "alt", "alt1", "chi4")
TRIGS = ("none", "sin", "cos", "sin2")


@dataclass(frozen=True)
class LambertSpec:
    """One summand shape  chi(n) twist(n) n^w  q^{an} / (1 - s q^{bn})^p  trig(freq n z).

    ``modulus`` selects the Jacobi symbol (n/modulus) (1 means trivial).
    ``twist``: none, alt = (-1)^n, alt1 = (-1)^(n-1), chi4 = (-1)^((n-1)/2)
    on odd n. ``inner_modulus`` p > 1 replaces the geometric denominator by
    sum_{k>=1} (k/p) q^{kan}, i.e. (sum_{j<p} (j/p) q^{jan}) / (1 - q^{pan}).
    ``trig`` sin2 means sin(freq n z)^2. ``den_power`` p is 1 or 2.
    """

    modulus: int = 1
    twist: str = "none"
    weight: int = 0
    num_exponent: Fraction = Fraction(1)
    den_exponent: Fraction = Fraction(1)
    den_sign: int = 1
    trig: str = "none"
    freq: int = 2
    odd_only: bool = False
    inner_modulus: int = 1
    den_power: int = 1

    def __post_init__(self):
        if self.modulus < 1 or self.modulus % 2 == 0:
            raise DomainError("character modulus must be odd and positive")
        if self.inner_modulus < 1 or self.inner_modulus % 2 == 0:
            raise DomainError("inner modulus must be odd and positive")
        if self.twist not in TWISTS:
            raise DomainError(f"unknown twist {self.twist!r}")
        if self.trig not in TRIGS:
            raise DomainError(f"unknown trig {self.trig!r}")
        if self.den_sign not in (1, -1):
            raise DomainError("den_sign must be +1 or -1")
        object.__setattr__(self, "num_exponent", Fraction(self.num_exponent))
        object.__setattr__(self, "den_exponent", Fraction(self.den_exponent))
        if self.num_exponent <= 0 or self.den_exponent <= 0:
            raise DomainError("exponents must be positive")
        if self.weight < 0:
            raise DomainError("weight must be nonnegative")
        if self.den_power not in (1, 2):
            raise DomainError("den_power must be 1 or 2")
        if self.den_power == 2 and self.inner_modulus > 1:
            raise DomainError("den_power 2 cannot be combined with an inner character")

    def outer(self, n: int) -> int:
        """Integer coefficient chi(n) * twist(n) * n^weight."""
        if self.odd_only and n % 2 == 0:
            return 0
        c = jacobi_symbol(n, self.modulus) if self.modulus > 1 else 1
        if c == 0:
            return 0
        if self.twist == "alt":
            c *= (-1) ** n
        elif self.twist == "alt1":
            c *= (-1) ** (n - 1)
        elif self.twist == "chi4":
            if n % 2 == 0:
                return 0
            c *= (-1) ** ((n - 1) // 2)
        return c * n**self.weight

    def inner(self, j: int) -> int:
        """Coefficient of q^{n(a + b j)} in the expansion of the fraction."""
        if self.inner_modulus > 1:
            return jacobi_symbol(j + 1, self.inner_modulus)
        return self.den_sign**j * (j + 1 if self.den_power == 2 else 1)

    @property
    def step_exponent(self) -> Fraction:
        # with an inner character the geometric step is q^{an}
        return self.num_exponent if self.inner_modulus > 1 else self.den_exponent


def _trig(spec: LambertSpec, n: int, z, o):
    if spec.trig == "none":
        return 1
    arg = spec.freq * n * z
    if spec.trig == "sin":
        return o.sin(arg)
    if spec.trig == "cos":
        return o.cos(arg)
    s = o.sin(arg)
    return s * s


def lambert_sum(spec: LambertSpec, z, mp: ModularPoint):
    """sum_{n>=1} of the ``spec`` summand, truncated by a geometric tail bound."""
    o = ops()
    z = o.num(z)
    a = spec.num_exponent
    im = abs(float(z.imag))
    growth = 0.0 if spec.trig == "none" else spec.freq * im * (2 if spec.trig == "sin2" else 1)
    decay = 2 * math.pi * float(mp.tau.imag) * float(a)
    if growth >= decay:
        raise ConvergenceError("Lambert series diverges at this z (|Im z| too large)")
    ratio = math.exp(growth - decay)
    qa = mp.qpow(a)
    if spec.inner_modulus > 1:
        p = spec.inner_modulus
        chars = [jacobi_symbol(j, p) for j in range(1, p)]
    else:
        qb = mp.qpow(spec.den_exponent)
    total = o.num(0)
    peak = 0.0
    xa = o.num(1)
    xb = o.num(1)
    for n in range(1, MAX_TERMS):
        xa *= qa
        if spec.inner_modulus == 1:
            xb *= qb
        bound = abs(xa) * math.exp(growth * n) * n ** (spec.weight + spec.den_power - 1)
        peak = max(peak, bound)
        if n > 2 and bound * (1 + ratio / (1 - ratio)) < o.tail * max(abs(total), peak):
            return total
        c = spec.outer(n)
        if c == 0:
            continue
        if spec.inner_modulus > 1:
            num = o.num(0)
            xj = o.num(1)
            for ch in chars:
                xj *= xa
                num += ch * xj
            frac = num / (1 - xj * xa)
        else:
            frac = xa / (1 - spec.den_sign * xb) ** spec.den_power
        total += c * frac * _trig(spec, n, z, o)
    raise ConvergenceError("Lambert series did not converge")


LOGDERIV1 = LambertSpec(trig="sin")
LOGDERIV4 = LambertSpec(num_exponent=Fraction(1, 2), trig="sin")


def logderiv_theta(kind: int, z, mp: ModularPoint):
    """theta_k'(z)/theta_k(z) for k in {1, 4} from its trigonometric series."""
    o = ops()
    z = o.num(z)
    if kind == 1:
        s = o.sin(z)
        if abs(s) < POLE_TOL:
            raise PoleError("theta1'/theta1 has a pole at multiples of pi")
        return o.cos(z) / s + 4 * lambert_sum(LOGDERIV1, z, mp)
    if kind == 4:
        return 4 * lambert_sum(LOGDERIV4, z, mp)
    raise DomainError("logderiv_theta supports kinds 1 and 4")


EISENSTEIN_A = LambertSpec(modulus=3)


def eisenstein_a(mp: ModularPoint):
    """a(tau) = 1 + 6 sum (n/3) q^n / (1 - q^n)."""
    return 1 + 6 * lambert_sum(EISENSTEIN_A, 0, mp)
