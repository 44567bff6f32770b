from __future__ import annotations

import cmath
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from theta_forge.core import (
    is_equivalent,
    jacobi_symbol,
    lattice_reduce,
    multi_pochhammer,
    nome_from_tau,
    q_pochhammer,
)
from theta_forge.errors import ConvergenceError, DomainError

from conftest import random_tau


def test_nome_examples():
    assert nome_from_tau(1j).q == pytest.approx(0.00186744, rel=1e-5)
    assert nome_from_tau(1j).q == pytest.approx(math.exp(-2 * math.pi), rel=1e-14)
    assert nome_from_tau(0.5 + 1j).q == pytest.approx(-math.exp(-2 * math.pi), rel=1e-14)
    assert abs(nome_from_tau(40j).q) < 1e-100


@pytest.mark.parametrize("tau", [0, -1j, 2 + 0j, 1 - 0.1j])
def test_nome_rejects_lower_half_plane(tau):
    with pytest.raises(DomainError):
        nome_from_tau(tau)


def test_nome_root_of_unity_branch(rng):
    for _ in range(100):
        mp = nome_from_tau(random_tau(rng))
        assert abs(mp.q) < 1
        assert abs(mp.qpow_unit**24 - mp.q) <= 1e-14 * abs(mp.q)
        assert abs(mp.qpow(1 / 8) - mp.qpow_unit**3) <= 1e-14 * abs(mp.qpow_unit**3)


def test_pochhammer_examples():
    assert q_pochhammer(0.7, 0.3, 0) == 1
    assert q_pochhammer(2, 0.5, -1) == pytest.approx(-1 / 3, rel=1e-15)
    brute = 1.0
    for k in range(1, 61):
        brute *= 1 - 0.1**k
    assert q_pochhammer(0.1, 0.1) == pytest.approx(brute, rel=1e-14)


def test_pochhammer_errors():
    with pytest.raises(ConvergenceError):
        q_pochhammer(0.5, 1.0)
    with pytest.raises(ZeroDivisionError):
        q_pochhammer(0.25, 0.5, -2)  # 1 - a/q^2 = 0


def test_multi_pochhammer():
    assert multi_pochhammer([], 0.3, 5) == 1
    a, q = 0.4 + 0.2j, 0.3 - 0.1j
    assert multi_pochhammer([a, a], q, 7) == pytest.approx(q_pochhammer(a, q, 7) ** 2, rel=1e-14)
    q = 0.2
    both = multi_pochhammer([q, q**2], q**3)
    assert both == pytest.approx(q_pochhammer(q, q**3) * q_pochhammer(q**2, q**3), rel=1e-15)


def test_pochhammer_shift_recurrence(rng):
    for _ in range(20):
        a = cmath.rect(rng.uniform(0.2, 0.9), rng.uniform(0, 2 * math.pi))
        q = cmath.rect(rng.uniform(0.2, 0.8), rng.uniform(0, 2 * math.pi))
        for n in range(-10, 11):
            lhs = q_pochhammer(a, q, n + 1)
            rhs = q_pochhammer(a, q, n) * (1 - a * q**n)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_jacobi_examples():
    assert jacobi_symbol(1, 5) == 1
    assert jacobi_symbol(2, 5) == -1
    assert jacobi_symbol(2, 15) == 1
    assert jacobi_symbol(5, 15) == 0
    assert jacobi_symbol(3, 1) == 1
    for m in (0, -3, 4):
        with pytest.raises(DomainError):
            jacobi_symbol(1, m)


def test_jacobi_legendre_agrees_with_euler_criterion():
    for p in (3, 5, 7, 11, 13):
        for n in range(1, 3 * p):
            euler = pow(n, (p - 1) // 2, p)
            expected = 0 if n % p == 0 else (1 if euler == 1 else -1)
            assert jacobi_symbol(n, p) == expected


def test_jacobi_multiplicative_and_periodic():
    for m in (3, 5, 15):
        for n in range(1, 101):
            assert jacobi_symbol(n, m) == jacobi_symbol(n + m, m)
            for k in range(1, 101):
                assert jacobi_symbol(n * k, m) == jacobi_symbol(n, m) * jacobi_symbol(k, m)


def test_lattice_reduce_examples():
    tau = 0.3 + 1.1j
    c = lattice_reduce(0, tau)
    assert (c.reduced, c.m, c.n) == (0, 0, 0)
    c = lattice_reduce(math.pi + math.pi * tau, tau)
    assert (c.m, c.n) == (1, 1) and abs(c.reduced) < 1e-12
    c = lattice_reduce(2.5 * math.pi + 0.25 * math.pi * tau, tau)
    assert (c.m, c.n) == (2, 0)
    assert abs(c.reduced - (0.5 * math.pi + 0.25 * math.pi * tau)) < 1e-12


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-50, 50), st.floats(-50, 50), st.floats(-0.5, 0.5), st.floats(0.3, 2.0)
)
def test_lattice_reassembly(x, y, tr, ti):
    tau = complex(tr, ti)
    w = x + 1j * y
    c = lattice_reduce(w, tau)
    back = c.reduced + c.m * math.pi + c.n * math.pi * tau
    assert abs(back - w) < 1e-12 * max(1.0, abs(w))
    from theta_forge.core import lattice_coords

    rx, ry = lattice_coords(c.reduced, tau)
    assert -1e-9 <= rx < 1 + 1e-9 and -1e-9 <= ry < 1 + 1e-9


def test_is_equivalent_examples():
    z = 0.4 + 0.1j
    assert is_equivalent(z, z + math.pi, 1j)
    assert not is_equivalent(z, z + math.pi * 1j / 2, 1j)
    tau = 1j
    assert is_equivalent(0.3 * math.pi + math.pi * tau, 0.3 * math.pi, tau)
    # just below the far corner of the cell still counts as zero
    assert is_equivalent(math.pi + math.pi * tau - 1e-12, 0, tau)


def test_random_tau_helper_domain():
    rng = random.Random(0)
    for _ in range(50):
        t = random_tau(rng)
        assert 0.5 <= t.imag <= 1.5 and abs(t.real) <= 0.5
