from __future__ import annotations

import cmath
import math
import random

import pytest

from theta_forge.core import nome_from_tau
from theta_forge.decompose import (
    Decomposition,
    FunctionalEquationPattern,
    addition_constant,
    check_functional_equations,
    decompose_FG,
    decompose_simple_poles,
    elliptic_decompose,
    residue_at,
    residue_limit,
)
from theta_forge.errors import (
    CommonZeroError,
    DomainError,
    InconsistencyError,
    NonSimplePoleError,
    ReconstructionError,
    ResidueSumError,
)
from theta_forge.functions import kronecker_K, weierstrass_p
from theta_forge.theta import eta, theta, theta1_prime0

from instances import theorem19_instance, theorem19_scaled_instance

MP = nome_from_tau(0.13 + 0.94j)
Y = 0.31 + 0.12j
PI = math.pi


def t(k, z, mp=MP, d=0):
    return theta(k, z, mp, d)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def test_residue_examples():
    assert rel(residue_at(lambda z: 1 / t(1, z), 0, MP), 1 / theta1_prime0(MP)) < 1e-12
    assert rel(residue_at(lambda z: kronecker_K(Y, z - 0.3, MP), 0.3, MP), 1) < 1e-12
    assert rel(residue_at(lambda z: 1 / cmath.tan(z), 0, MP), 1) < 1e-12


@pytest.mark.parametrize(
    "f, a",
    [
        (lambda z: 1 / t(1, z), 0),
        (lambda z: kronecker_K(Y, z - 0.3, MP), 0.3),
        (lambda z: t(3, z + Y) / t(1, z - 0.2), 0.2),
        (lambda z: 1 / t(4, z), PI * MP.tau / 2),
        (lambda z: t(1, z + Y) / t(1, 2 * z), PI / 2),
    ],
)
def test_contour_matches_limit_oracle(f, a):
    assert rel(residue_at(f, a, MP), residue_limit(f, a)) < 1e-9


def test_double_pole_rejected():
    with pytest.raises(NonSimplePoleError):
        residue_at(lambda z: weierstrass_p(z, MP), 0, MP)
    with pytest.raises(NonSimplePoleError):
        residue_at(lambda z: 1 / t(1, z) ** 2, 0, MP)


@pytest.mark.parametrize("kernel", ["kronecker", "theta3", "logderiv"])
def test_kernel_principal_part(kernel):
    dec = Decomposition(kernel=kernel, terms=[(0j, 1)], mp=MP, y=Y)
    assert rel(residue_limit(dec.kernel_value, 0), 1) < 1e-9


def test_functional_equation_examples():
    assert check_functional_equations(lambda z: t(1, z + Y) / t(1, z), FunctionalEquationPattern(y=Y), MP)
    assert check_functional_equations(lambda z: kronecker_K(Y, z, MP), FunctionalEquationPattern(y=Y), MP)
    assert not check_functional_equations(lambda z: t(2, z) / t(1, z), FunctionalEquationPattern(), MP)


def test_pattern_mode_and_degeneracy():
    assert FunctionalEquationPattern(y=Y).mode == "kronecker"
    assert FunctionalEquationPattern(-1, -1, 0, Y).mode == "theta3"
    with pytest.raises(DomainError):
        FunctionalEquationPattern(1, -1, 0, Y).mode
    assert FunctionalEquationPattern(y=PI * MP.tau).degenerate(MP)
    assert FunctionalEquationPattern(-1, -1, 0, PI / 2 + PI * MP.tau / 2).degenerate(MP)
    with pytest.raises(DomainError):
        decompose_simple_poles(lambda z: 1 / t(1, z), [0], FunctionalEquationPattern(), MP)


def test_fixed_point_kronecker():
    dec = decompose_simple_poles(lambda z: kronecker_K(Y, z, MP), [0], FunctionalEquationPattern(y=Y), MP)
    assert len(dec.terms) == 1 and rel(dec.terms[0][1], 1) < 1e-12


def test_four_pole_theorem111_form():
    ys = [0.1 + 0.05j, 0.2 - 0.1j, -0.3 + 0.02j, 0.15 + 0.1j]
    y = sum(ys)
    f = lambda z: math.prod(t(1, z + v) for v in ys) / t(1, 2 * z)
    poles = [0, PI / 2, (PI + PI * MP.tau) / 2, PI * MP.tau / 2]
    dec = decompose_simple_poles(f, poles, FunctionalEquationPattern(y=y), MP)
    assert dec.max_error < 1e-9


def test_two_pole_generic():
    u, v, w = 0.3 + 0.1j, -0.5 + 0.2j, 0.21 - 0.07j
    f = lambda z: t(1, z + u + w) * t(1, z - u) / (t(1, z + v) * t(1, z - v))
    dec = decompose_simple_poles(f, [-v, v], FunctionalEquationPattern(y=w), MP)
    assert dec.max_error < 1e-9
    # with theta1(z+v+w) below the quotient is elliptic: Kronecker mode is degenerate
    g = lambda z: t(1, z + u + w) * t(1, z - u) / (t(1, z + v + w) * t(1, z - v))
    with pytest.raises(DomainError):
        decompose_simple_poles(g, [-v - w, v], FunctionalEquationPattern(), MP)
    ell = elliptic_decompose(g, [-v - w, v], MP)
    assert rel(ell.terms[0][1], -ell.terms[1][1]) < 1e-9


def test_theta3_mode():
    f = lambda z: t(3, z + Y) / t(1, z)
    dec = decompose_simple_poles(f, [0], FunctionalEquationPattern(-1, -1, 0, Y), MP)
    assert rel(dec.terms[0][1], t(3, Y) / theta1_prime0(MP)) < 1e-12


def test_missed_pole_detected():
    ys = [0.1 + 0.05j, 0.2 - 0.1j, -0.3 + 0.02j, 0.15 + 0.1j]
    f = lambda z: math.prod(t(1, z + v) for v in ys) / t(1, 2 * z)
    with pytest.raises(ReconstructionError) as err:
        decompose_simple_poles(f, [0, PI / 2, PI * MP.tau / 2], FunctionalEquationPattern(y=sum(ys)), MP)
    assert err.value.max_error > 1e-9


@pytest.mark.parametrize("n, m", [(1, 0), (3, 1), (4, 2), (5, -2)])
def test_theorem34_instance(n, m):
    mn = nome_from_tau(n * MP.tau)
    F = lambda z: cmath.exp(2j * m * z) * theta(1, n * z + m * PI * MP.tau + Y, mn)
    G = lambda z: theta(1, n * z, mn)
    dec = decompose_FG(F, G, [k * PI / n for k in range(n)], FunctionalEquationPattern(y=Y), MP,
                       G_prime=lambda z: n * theta(1, n * z, mn, 1))
    for k, (_, r) in enumerate(dec.terms):
        expected = F(k * PI / n) / ((-1) ** k * n * theta1_prime0(mn))
        assert rel(r, expected) < 1e-12
    if n == 1:
        assert rel(dec.terms[0][1], t(1, Y) / theta1_prime0(MP)) < 1e-12
        assert rel(dec(0.4 + 0.3j), t(1, 0.4 + 0.3j + Y) / t(1, 0.4 + 0.3j)) < 1e-12


def test_theorem35_instance():
    m3 = nome_from_tau(3 * MP.tau)
    F = lambda z: t(1, z + Y / 3) ** 3
    G = lambda z: theta(1, 3 * z, m3)
    dec = decompose_FG(F, G, [0, PI / 3, 2 * PI / 3], FunctionalEquationPattern(y=Y), MP)
    z = 0.27 - 0.18j
    rhs = sum(t(1, k * PI / 3 + Y / 3) ** 3 / ((-1) ** k * 3 * theta1_prime0(m3)) * kronecker_K(Y, z - k * PI / 3, MP)
              for k in range(3))
    assert rel(F(z) / G(z), rhs) < 1e-9
    assert dec.max_error < 1e-9


def test_common_zero():
    F = lambda z: t(1, z) * t(1, z + Y)
    G = lambda z: t(1, z) * t(1, z - 0.4)
    with pytest.raises(CommonZeroError):
        decompose_FG(F, G, [0, 0.4], FunctionalEquationPattern(y=Y + 0.4), MP)


def test_theta1_prime_zero_section62():
    m5 = nome_from_tau(5 * MP.tau)
    c = 2 * math.sqrt(5) * eta(MP, 5) ** 2 / eta(MP)
    f = lambda z: t(1, z) * t(1, 2 * z) / theta(1, 5 * z, m5) * c
    dec = elliptic_decompose(f, [PI / 5, -PI / 5, 2 * PI / 5, -2 * PI / 5], MP)
    signs = [r.real for _, r in dec.terms]
    assert signs[0] < 0 and signs[1] < 0 and signs[2] > 0 and signs[3] > 0
    assert abs(dec.constant) < 1e-10


def test_elliptic_logderiv_difference():
    f = lambda z: t(1, z, MP, 1) / t(1, z) - t(4, z, MP, 1) / t(4, z)
    with pytest.raises(ResidueSumError):
        elliptic_decompose(f, [0], MP)
    dec = elliptic_decompose(f, [0, PI * MP.tau / 2], MP)
    assert rel(dec.terms[0][1], 1) < 1e-12 and rel(dec.terms[1][1], -1) < 1e-12
    assert abs(dec.constant - 1j) < 1e-10


def test_elliptic_rejects_double_pole():
    with pytest.raises(NonSimplePoleError):
        elliptic_decompose(lambda z: weierstrass_p(z, MP), [0], MP)


def test_addition_constant_examples():
    u = 0.37 + 0.11j
    F = lambda z: t(1, z) ** 2 * weierstrass_p(z, MP)
    G = lambda z: t(1, z - u) * t(1, z + u)
    assert rel(addition_constant(F, G, 0, MP, 0.41 + 0.2j), -t(1, u) ** 2 * weierstrass_p(u, MP)) < 1e-9
    u, v, w = 0.3 + 0.1j, -0.5 + 0.2j, 0.21 - 0.07j
    F = lambda z: t(1, z + u + w) * t(1, z - u)
    G = lambda z: t(1, z + v + w) * t(1, z - v)
    c = addition_constant(F, G, w, MP, 0.41 + 0.2j)
    assert rel(c, t(1, u + v + w) * t(1, u - v)) < 1e-9
    assert addition_constant(F, F, w, MP, 0.41 + 0.2j) == 0
    # probe symmetry
    assert rel(addition_constant(F, G, w, MP, -0.41 - 0.2j), c) < 1e-10
    assert rel(addition_constant(F, G, w, MP, 0.1 - 0.3j, 0.41 + 0.2j), c) < 1e-10


def test_addition_constant_inconsistent():
    F = lambda z: t(1, z + 0.3) * t(1, z - 0.5)
    G = lambda z: t(2, z + 0.1) * t(1, z - 0.2)
    with pytest.raises(InconsistencyError):
        addition_constant(F, G, 0.4, MP, 0.41 + 0.2j)


def test_random_theorem19_reconstruction():
    rng = random.Random(19)
    for i in range(50):
        inst = theorem19_instance(rng) if i % 3 else theorem19_scaled_instance(rng)
        dec = decompose_FG(inst.F, inst.G, inst.zeros, inst.pattern, inst.mp, samples=20, seed=i)
        assert dec.max_error < 1e-9


def test_random_theorem17_reconstruction():
    rng = random.Random(17)
    for i in range(20):
        inst = theorem19_instance(rng)
        dec = decompose_simple_poles(inst.f, inst.zeros, inst.pattern, inst.mp, samples=20, seed=i)
        assert dec.max_error < 1e-9
