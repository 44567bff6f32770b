from __future__ import annotations

import cmath
import math
import random
from fractions import Fraction

import pytest

from theta_forge.core import jacobi_symbol, nome_from_tau
from theta_forge.errors import ConvergenceError, DomainError, PoleError
from theta_forge.functions import (
    LambertSpec,
    eisenstein_a,
    kronecker_bilateral,
    kronecker_K,
    lambert_sum,
    logderiv_theta,
    ramanujan_1psi1,
    weierstrass_p,
)
from theta_forge.theta import theta, theta1_prime0

from conftest import random_tau, random_z, rel
from oracles import bilateral_partial, lambert_direct, psi_partial, wp_lattice


def test_kronecker_examples():
    mp = nome_from_tau(0.2 + 1.1j)
    y, z = 0.4 + 0.1j, 0.7 - 0.2j
    assert rel(kronecker_K(y, z, mp), kronecker_K(z, y, mp)) < 1e-14
    mp = nome_from_tau(1j)
    for h in (1e-4, 1e-5):
        assert abs(h * kronecker_K(0.4, h, mp) - 1) < 10 * h
    with pytest.raises(PoleError):
        kronecker_K(0.3, math.pi, mp)
    with pytest.raises(PoleError):
        kronecker_K(math.pi * mp.tau, 0.3, mp)


def _bilateral_points(n, seed):
    rng = random.Random(seed)
    for _ in range(n):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.5))
        band = math.pi * tau.imag
        # strictly inside 0 < Im y < Im(pi tau)
        y = complex(rng.uniform(0, math.pi), rng.uniform(0.25, 0.75) * band)
        z = complex(rng.uniform(0, math.pi), rng.uniform(-0.4, 0.4) * band)
        yield y, z, nome_from_tau(tau)


def test_kronecker_bilateral_bridge():
    for y, z, mp in _bilateral_points(20, 1):
        assert rel(kronecker_bilateral(y, z, mp), 0.5j * kronecker_K(y, z, mp)) < 1e-9


def test_kronecker_bilateral_matches_partial_sum():
    # y = 0.3 is real and sits on the boundary |e^{2iy}| = 1; take y = 0.3 + 0.6i
    mp = nome_from_tau(1.2j)
    y, z = 0.3 + 0.6j, 0.2
    oracle = bilateral_partial(y, z, mp.q, 400)
    assert rel(2 / 1j * oracle, kronecker_K(y, z, mp)) < 1e-10
    with pytest.raises(DomainError):
        kronecker_bilateral(0.3, 0.2, mp)


def test_kronecker_functional_equations():
    rng = random.Random(2)
    for _ in range(50):
        tau = random_tau(rng)
        mp = nome_from_tau(tau)
        y, z = random_z(rng, tau), random_z(rng, tau)
        k = kronecker_K(y, z, mp)
        assert rel(kronecker_K(y, z + math.pi, mp), k) < 1e-10
        assert rel(cmath.exp(2j * y) * kronecker_K(y, z + math.pi * tau, mp), k) < 1e-10


def test_ramanujan_psi_examples():
    a, z, q = 0.3, 0.5, 0.2
    lhs, rhs = ramanujan_1psi1(a, a * q, z, q)
    assert rel(lhs, rhs) < 1e-12
    a, b, z, q = 0.8 + 0.1j, 0.1, 0.6j, 0.3 - 0.2j
    lhs, rhs = ramanujan_1psi1(a, b, z, q)
    assert rel(lhs, psi_partial(a, b, z, q, 200)) < 1e-12
    assert rel(lhs, rhs) < 1e-12
    # q = 0: (a;0)_k/(b;0)_k = (1-a)/(1-b) for k >= 1, and for k <= -1 the
    # ratio is (-b)^{-k}... expanded by hand: sum = 1 + (1-a)/(1-b) z/(1-z)
    #   + sum_{k>=1} (b/a)^k ... with (1 - b/0^j) handled through q^j - b
    a, b, z = 0.5, 0.2, 0.6
    lhs, rhs = ramanujan_1psi1(a, b, z, 0)
    hand = 1 + (1 - a) / (1 - b) * z / (1 - z) + (b / a) / z / (1 - (b / a) / z)
    assert rel(lhs, hand) < 1e-14
    assert rel(lhs, rhs) < 1e-14


def test_ramanujan_psi_domain():
    with pytest.raises(DomainError):
        ramanujan_1psi1(0.3, 0.06, 1.2, 0.2)
    with pytest.raises(DomainError):
        ramanujan_1psi1(0.3, 0.2, 0.5, 0.2)
    with pytest.raises(DomainError):
        ramanujan_1psi1(0.04, 0.001, 0.5, 0.2)  # a = q^2


def test_weierstrass_examples():
    rng = random.Random(3)
    for _ in range(20):
        tau = random_tau(rng)
        mp = nome_from_tau(tau)
        z = random_z(rng, tau)
        p = weierstrass_p(z, mp)
        assert rel(p, weierstrass_p(-z, mp)) < 1e-12
        assert rel(weierstrass_p(z + math.pi, mp), p) < 1e-9
        assert rel(weierstrass_p(z + math.pi * tau, mp), p) < 1e-9
    mp = nome_from_tau(1j)
    errs = [abs(z * z * weierstrass_p(z, mp) - 1) for z in (1e-2, 1e-3)]
    assert errs[1] < 1e-5 and errs[0] / errs[1] > 50  # O(z^4) in fact
    with pytest.raises(PoleError):
        weierstrass_p(math.pi, mp)


def test_weierstrass_lattice_oracle():
    mp = nome_from_tau(1j)
    assert rel(weierstrass_p(0.3, mp), wp_lattice(0.3, 1j)) < 1e-8
    # the raw square sum alone is only good to O(1/N^2)
    assert rel(weierstrass_p(0.3, mp), wp_lattice(0.3, 1j, extrapolate=False)) < 1e-5


def test_weierstrass_addition_formula():
    rng = random.Random(4)
    for _ in range(30):
        tau = random_tau(rng)
        mp = nome_from_tau(tau)
        x, y = random_z(rng, tau), random_z(rng, tau)
        lhs = weierstrass_p(x, mp) - weierstrass_p(y, mp)
        d = theta1_prime0(mp)
        rhs = -d * d * theta(1, x + y, mp) * theta(1, x - y, mp) / (
            theta(1, x, mp) ** 2 * theta(1, y, mp) ** 2
        )
        assert rel(lhs, rhs) < 1e-9


def test_logderiv_examples():
    mp = nome_from_tau(1j)
    ref = theta(1, 0.7, mp, 1) / theta(1, 0.7, mp)
    assert rel(logderiv_theta(1, 0.7, mp), ref) < 1e-11
    tiny = nome_from_tau(50j)
    assert rel(logderiv_theta(1, 0.7, tiny), 1 / math.tan(0.7)) < 1e-15
    z = 0.3 + 0.2j
    assert rel(logderiv_theta(4, -z, mp), -logderiv_theta(4, z, mp)) < 1e-15
    ref = theta(4, z, mp, 1) / theta(4, z, mp)
    assert rel(logderiv_theta(4, z, mp), ref) < 1e-11
    with pytest.raises(PoleError):
        logderiv_theta(1, math.pi, mp)
    with pytest.raises(DomainError):
        logderiv_theta(2, 0.3, mp)


def test_lambert_examples():
    mp = nome_from_tau(1.1j)
    assert lambert_sum(LambertSpec(weight=1, trig="sin"), 0, mp) == 0
    k7 = LambertSpec(modulus=5, trig="sin")
    oracle = lambert_direct(
        lambda n, q: jacobi_symbol(n, 5) * q**n / (1 - q**n),
        lambda n: cmath.sin(2 * n * 0.4),
        mp.q,
        300,
    )
    assert abs(lambert_sum(k7, 0.4, mp) - oracle) < 1e-13
    k10 = LambertSpec(weight=1, num_exponent=1, den_exponent=5, inner_modulus=5)
    rearranged = lambert_direct(
        lambda n, q: jacobi_symbol(n, 5) * q**n / (1 - q**n) ** 2, lambda n: 1, mp.q, 300
    )
    assert rel(lambert_sum(k10, 0, mp), rearranged) < 1e-13


def test_lambert_spec_validation():
    with pytest.raises(DomainError):
        LambertSpec(modulus=4)
    with pytest.raises(DomainError):
        LambertSpec(twist="bogus")
    with pytest.raises(DomainError):
        LambertSpec(num_exponent=0)
    spec = LambertSpec(num_exponent=Fraction(1, 2))
    assert spec.num_exponent == Fraction(1, 2)


def test_lambert_divergence_guard():
    mp = nome_from_tau(0.5j)
    with pytest.raises(ConvergenceError):
        lambert_sum(LambertSpec(trig="sin"), 3j, mp)


def test_eisenstein_a():
    assert abs(eisenstein_a(nome_from_tau(60j)) - 1) < 1e-15
    mp = nome_from_tau(1j)
    lhs = math.sqrt(3) * theta(1, math.pi / 3, mp, 1) / theta(1, math.pi / 3, mp)
    assert rel(lhs, eisenstein_a(mp)) < 1e-10
    # q = 0.1: tau with exp(2 pi i tau) = 0.1
    mp = nome_from_tau(1j * math.log(10) / (2 * math.pi))
    assert abs(mp.q - 0.1) < 1e-15
    direct = 1 + 6 * sum(jacobi_symbol(n, 3) * 0.1**n / (1 - 0.1**n) for n in range(1, 201))
    assert rel(eisenstein_a(mp), direct) < 1e-14
