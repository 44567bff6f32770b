"""Independent brute-force oracles used by the tests (never by the library)."""

from __future__ import annotations

import cmath
import math

import numpy as np


def square_shell_sums(z: complex, tau: complex, n_max: int) -> list[complex]:
    """Partial sums of the Weierstrass lattice series over squares |m|,|n| <= N."""
    total = 1 / z**2
    out = [total]
    for n in range(1, n_max + 1):
        shell = set()
        for m in range(-n, n + 1):
            shell |= {(m, n), (m, -n), (n, m), (-n, m)}
        for a, b in sorted(shell):
            w = math.pi * (a + b * tau)
            total += 1 / (z - w) ** 2 - 1 / w**2
        out.append(total)
    return out


def wp_lattice(z: complex, tau: complex, n_max: int = 40, extrapolate: bool = True) -> complex:
    """Lattice-sum value of p(z) from the squares |m|,|n| <= n_max.

    The truncation error of the square partial sum S_N has an asymptotic
    expansion in powers of 1/N; with ``extrapolate`` the shells
    N = n_max/2 .. n_max are fitted to c0 + c2/N^2 + ... + c7/N^7 and c0 is
    returned. No lattice point outside the n_max square is used.
    """
    sums = square_shell_sums(z, tau, n_max)
    if not extrapolate:
        return sums[n_max]
    ns = list(range(n_max // 2, n_max + 1, max(1, n_max // 10)))
    powers = [2, 3, 4, 5, 6, 7]
    a = np.array([[1.0] + [float(n) ** -p for p in powers] for n in ns], dtype=complex)
    b = np.array([sums[n] for n in ns])
    coef = np.linalg.lstsq(a, b, rcond=None)[0]
    return complex(coef[0])


def bilateral_partial(y: complex, z: complex, q: complex, terms: int = 400) -> complex:
    """sum_{|k| <= terms/2} e^{2kiy} / (1 - q^k e^{2iz}) by direct summation."""
    half = terms // 2
    ey, ez = cmath.exp(2j * y), cmath.exp(2j * z)
    pos = sum(ey**k / (1 - q**k * ez) for k in range(0, half + 1))
    # k = -j: e^{-2jiy} / (1 - q^{-j} e^{2iz}) = (q/e^{2iy})^j / (q^j - e^{2iz}); |q/e^{2iy}| < 1
    neg = sum((q / ey) ** j / (q**j - ez) for j in range(1, half + 1))
    return pos + neg


def psi_partial(a, b, z, q, terms: int = 200) -> complex:
    """sum_{|k| <= terms/2} (a;q)_k/(b;q)_k z^k, ratios built term by term."""
    half = terms // 2
    total = 0j
    t = 1 + 0j
    for k in range(half + 1):
        total += t
        t *= (1 - a * q**k) / (1 - b * q**k) * z
    t = 1 + 0j
    for k in range(1, half + 1):
        # (a;q)_{-k}/(b;q)_{-k} = prod_{j=1..k} (1 - b/q^j)/(1 - a/q^j)
        t *= (1 - b / q**k) / (1 - a / q**k) / z
        total += t
    return total


def lambert_direct(coef, z_trig, q: complex, terms: int) -> complex:
    """sum_{n=1}^{terms} coef(n, q) * z_trig(n) with nothing clever."""
    return sum(coef(n, q) * z_trig(n) for n in range(1, terms + 1))
