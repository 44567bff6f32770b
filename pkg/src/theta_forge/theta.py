"""Jacobi theta functions, their z-derivatives and the Dedekind eta function.

Conventions follow q = exp(2*pi*i*tau) with

    theta1(z|tau) = 2 sum_{n>=0} (-1)^n q^{(2n+1)^2/8} sin (2n+1)z

and the analogous series for theta2..theta4, so that the lattice of zeros of
theta1 is pi*Z + pi*tau*Z.
"""

from __future__ import annotations

import enum
import math

from .core import ModularPoint, q_pochhammer
from .errors import ConvergenceError, DomainError
from .precision import ops

MAX_DERIV = 4
MAX_TERMS = 100_000


class ThetaKind(enum.IntEnum):
    ONE = 1
    TWO = 2
    THREE = 3
    FOUR = 4


# sign picked up under z -> z + pi*tau (besides the q^{-1/2} e^{-2iz} factor)
_TAU_SIGN = {1: -1, 2: 1, 3: 1, 4: -1}
# sign picked up under z -> z + pi
_PI_SIGN = {1: -1, 2: -1, 3: 1, 4: 1}


def _kind(kind) -> int:
    k = int(kind)
    if k not in (1, 2, 3, 4):
        raise DomainError(f"theta kind must be 1..4, got {kind}")
    return k


def _dsin(x, order, o):
    r = order % 4
    if r == 0:
        return o.sin(x)
    if r == 1:
        return o.cos(x)
    if r == 2:
        return -o.sin(x)
    return -o.cos(x)


def _dcos(x, order, o):
    return _dsin(x, order + 1, o)


def _series(kind: int, w, mp: ModularPoint, order: int):
    """Truncated Fourier series at a point with |Im w| <= Im(pi tau)/2."""
    o = ops()
    tau = mp.tau
    im_w = abs(w.imag)
    tail = o.tail
    total = o.num(0)
    peak = 0.0
    if kind in (1, 2):
        for n in range(MAX_TERMS):
            N = 2 * n + 1
            bound = math.exp(-math.pi * float(tau.imag) * N * N / 4 + N * float(im_w)) * N**order
            peak = max(peak, bound)
            if bound < tail * peak and n > 0:
                return 2 * total
            coef = o.exp(1j * o.pi * tau * N * N / 4) * N**order
            if kind == 1:
                total += (-1) ** n * coef * _dsin(N * w, order, o)
            else:
                total += coef * _dcos(N * w, order, o)
        raise ConvergenceError("theta series did not converge")
    total = o.num(1 if order == 0 else 0)
    peak = 1.0 if order == 0 else 0.0
    sign = -1 if kind == 4 else 1
    for n in range(1, MAX_TERMS):
        N = 2 * n
        bound = math.exp(-math.pi * float(tau.imag) * n * n + N * float(im_w)) * N**order
        peak = max(peak, bound)
        if bound < tail * peak and n > 1:
            return total
        coef = 2 * o.exp(1j * o.pi * tau * n * n) * N**order
        total += sign**n * coef * _dcos(N * w, order, o)
    raise ConvergenceError("theta series did not converge")


def theta(kind, z, mp: ModularPoint, deriv_order: int = 0):
    """theta_kind(z|tau) or its z-derivative of order ``deriv_order`` (<= 4).

    The argument is first moved into the strip |Im z| <= Im(pi tau)/2 with
    the quasi-periodicity under z -> z + pi*tau; derivatives of the
    exponential factor are folded back in with the Leibniz rule.
    """
    k = _kind(kind)
    if not 0 <= deriv_order <= MAX_DERIV:
        raise DomainError(f"derivative order must be in 0..{MAX_DERIV}")
    o = ops()
    z = o.num(z)
    pitau = o.pi * mp.tau
    shift = int(round(float(z.imag) / float(pitau.imag)))
    w = z - shift * pitau
    real_shift = int(round(float(w.real) / math.pi))
    w = w - real_shift * o.pi
    pi_factor = _PI_SIGN[k] ** (real_shift % 2)
    if shift == 0:
        return pi_factor * _series(k, w, mp, deriv_order)
    # theta(z) = s^n q^{n^2/2} e^{-2inz} theta(z - n pi tau)
    pre = _TAU_SIGN[k] ** (shift % 2) * o.exp(1j * o.pi * mp.tau * shift * shift - 2j * shift * z)
    lam = -2j * shift
    total = o.num(0)
    for j in range(deriv_order + 1):
        total += math.comb(deriv_order, j) * lam ** (deriv_order - j) * _series(k, w, mp, j)
    return pi_factor * pre * total


def theta_product(kind, z, mp: ModularPoint):
    """theta_kind(z|tau) from its Jacobi triple product representation."""
    k = _kind(kind)
    o = ops()
    z = o.num(z)
    q = mp.q
    e2 = o.exp(2j * z)
    e2inv = 1 / e2
    big = max(abs(e2), abs(e2inv))
    aq = abs(q)
    bound = o.tail * (1 - aq)
    if k in (1, 2):
        prod = 2 * mp.qpow_unit**3 * (o.sin(z) if k == 1 else o.cos(z))
        sign = -1 if k == 1 else 1
        qn = q
        for _ in range(MAX_TERMS):
            if abs(qn) * big < bound and abs(qn) < bound:
                return prod
            prod *= (1 - qn) * (1 + sign * qn * e2) * (1 + sign * qn * e2inv)
            qn *= q
        raise ConvergenceError("theta product did not converge")
    sign = 1 if k == 3 else -1
    prod = o.num(1)
    qn = q
    qh = mp.qpow(0.5)  # q^{n - 1/2} starts at q^{1/2}
    for _ in range(MAX_TERMS):
        if abs(qh) * big < bound and abs(qn) < bound:
            return prod
        prod *= (1 - qn) * (1 + sign * qh * e2) * (1 + sign * qh * e2inv)
        qn *= q
        qh *= q
    raise ConvergenceError("theta product did not converge")


def theta1_prime0(mp: ModularPoint):
    """theta1'(0|tau) = 2 q^{1/8} prod (1 - q^n)^3."""
    euler = q_pochhammer(mp.q, mp.q)
    return 2 * mp.qpow_unit**3 * euler**3


def eta(mp: ModularPoint, scale=1):
    """Dedekind eta at scale*tau."""
    point = mp if scale == 1 else mp.scaled(scale)
    return point.qpow_unit * q_pochhammer(point.q, point.q)
