"""Nome and lattice arithmetic, q-shifted factorials and the Jacobi symbol."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ConvergenceError, DomainError
from .precision import ops

# lattice equivalence is judged in reduced (fractional) coordinates
EQUIV_TOL = 1e-9
_SNAP = 1e-12


@dataclass(frozen=True)
class ModularPoint:
    """A point tau of the upper half-plane together with its nome."""

    tau: complex
    q: complex
    qpow_unit: complex  # q**(1/24) on the principal branch exp(pi*i*tau/12)

    def qpow(self, r) -> complex:
        """q**r for rational r, on the branch exp(2*pi*i*tau*r)."""
        o = ops()
        return o.exp(2j * o.pi * self.tau * _as_number(r))

    def scaled(self, s) -> "ModularPoint":
        return nome_from_tau(self.tau * _as_number(s))


def _as_number(r):
    if isinstance(r, Fraction):
        return r.numerator / r.denominator if ops().dps <= 15 else ops().num(r.numerator) / r.denominator
    return r


def nome_from_tau(tau) -> ModularPoint:
    o = ops()
    tau = o.num(tau)
    if not tau.imag > 0:
        raise DomainError(f"Im(tau) must be positive, got tau={tau}")
    unit = o.exp(1j * o.pi * tau / 12)
    q = o.exp(2j * o.pi * tau)
    return ModularPoint(tau=tau, q=q, qpow_unit=unit)


def q_pochhammer(a, q, n=math.inf, tail: float | None = None):
    """(a; q)_n for integer n, or the infinite product when n is infinite."""
    o = ops()
    if n == 0:
        return o.num(1)
    if n == math.inf:
        aq = abs(q)
        if aq >= 1:
            raise ConvergenceError(f"(a;q)_inf needs |q| < 1, got |q|={float(aq)}")
        eps = o.tail if tail is None else tail
        bound = eps * (1 - aq)
        prod = o.num(1)
        term = o.num(a)
        for _ in range(200000):
            if abs(term) < bound:
                return prod
            prod *= 1 - term
            term *= q
        raise ConvergenceError("(a;q)_inf did not converge")
    if n != int(n):
        raise DomainError(f"n must be an integer or infinity, got {n}")
    n = int(n)
    if n > 0:
        prod = o.num(1)
        term = o.num(a)
        for _ in range(n):
            prod *= 1 - term
            term *= q
        return prod
    # (a;q)_{-k} = 1 / prod_{j=1..k} (1 - a q^{-j})
    den = o.num(1)
    for j in range(1, -n + 1):
        den *= 1 - a / q**j
    if den == 0:
        raise ZeroDivisionError(f"(a;q)_{n} has a vanishing denominator")
    return 1 / den


def multi_pochhammer(a_list: Sequence, q, n=math.inf):
    prod = ops().num(1)
    for a in a_list:
        prod *= q_pochhammer(a, q, n)
    return prod


def jacobi_symbol(n: int, m: int) -> int:
    """Jacobi symbol (n/m) for odd positive m."""
    if m <= 0 or m % 2 == 0:
        raise DomainError(f"modulus must be odd and positive, got {m}")
    n %= m
    result = 1
    while n:
        while n % 2 == 0:
            n //= 2
            if m % 8 in (3, 5):
                result = -result
        n, m = m, n
        if n % 4 == 3 and m % 4 == 3:
            result = -result
        n %= m
    return result if m == 1 else 0


@dataclass(frozen=True)
class LatticeCoord:
    """w = reduced + m*pi + n*pi*tau with reduced in the fundamental cell."""

    reduced: complex
    m: int
    n: int


def lattice_coords(w, tau) -> tuple[float, float]:
    """Real (x, y) with w = x*pi + y*pi*tau."""
    w = complex(w)
    tau = complex(tau)
    y = w.imag / (math.pi * tau.imag)
    x = (w.real - y * math.pi * tau.real) / math.pi
    return x, y


def _floor_snapped(t: float) -> int:
    r = round(t)
    if abs(t - r) < _SNAP:
        return int(r)
    return math.floor(t)


def lattice_reduce(w, tau) -> LatticeCoord:
    if not complex(tau).imag > 0:
        raise DomainError("Im(tau) must be positive")
    x, y = lattice_coords(w, tau)
    m = _floor_snapped(x)
    n = _floor_snapped(y)
    o = ops()
    reduced = o.num(w) - m * o.pi - n * o.pi * o.num(tau)
    return LatticeCoord(reduced=reduced, m=m, n=n)


def lattice_distance(w, tau) -> float:
    """Distance from w to the nearest lattice point, in reduced coordinates."""
    x, y = lattice_coords(w, tau)
    return math.hypot(x - round(x), y - round(y))


def is_equivalent(w1, w2, tau, tol: float = EQUIV_TOL) -> bool:
    x, y = lattice_coords(complex(w1) - complex(w2), tau)
    # fold both coordinates onto [0, 1/2] so the far corner counts as zero
    return abs(x - round(x)) <= tol and abs(y - round(y)) <= tol
