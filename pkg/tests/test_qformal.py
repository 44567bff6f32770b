from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from theta_forge.core import nome_from_tau, q_pochhammer
from theta_forge.errors import NotFormalError, NotUnitError, TruncationError, VariableMismatchError
from theta_forge.functions import LambertSpec, lambert_sum
from theta_forge.qformal import (
    GRAINS,
    LaurentPoly,
    fs_add,
    fs_coefficient,
    fs_equal_through,
    fs_eta,
    fs_evaluate,
    fs_invert,
    fs_lambert,
    fs_lift,
    fs_monomial,
    fs_mul,
    fs_neg,
    fs_one,
    fs_pow,
    fs_scale,
    fs_sub,
    fs_theta,
    fs_theta_x,
    fs_truncate,
    fs_zero,
    g_complex,
)
from theta_forge.theta import eta, theta

O = 40


def series_from_ints(ints: dict[int, int], trunc_q: int) -> "FormalSeries":
    out = fs_zero((), trunc=GRAINS * trunc_q)
    for k, c in ints.items():
        out = fs_add(out, fs_scale(fs_monomial(GRAINS * k), c))
    return out


def coeffs_q(s, n, offset=0):
    """Integer coefficients of q^{k + offset/24}, k < n."""
    vals = []
    for k in range(n):
        p = fs_coefficient(s, GRAINS * k + offset)
        c = p.terms.get((), (0, 0)) if p.terms else (0, 0)
        assert c[1] == 0
        vals.append(c[0])
    return vals


def eta_quotient(*pairs, order=O + 5):
    r = fs_one()
    for s, e in pairs:
        r = fs_mul(r, fs_pow(fs_eta(s, order), e))
    return r


def pentagonal(n_max):
    out = {}
    for k in range(-20, 21):
        out[k * (3 * k - 1) // 2] = (-1) ** (k % 2)
    return [out.get(n, 0) for n in range(n_max)]


def test_eta_pentagonal_through_60():
    e = fs_eta(1, 61)
    assert e.valuation() == 1
    assert coeffs_q(e, 61, offset=1) == pentagonal(61)
    assert fs_coefficient(fs_eta(1), 25) == LaurentPoly.const(-1)  # q^{25/24}


def test_eta_scaled_is_substitution():
    e1, e5 = fs_eta(1, 8), fs_eta(5, 40)
    for g, p in e1.coeffs.items():
        assert fs_coefficient(e5, 5 * g) == p
    assert fs_equal_through(fs_truncate(e5, 5 * e1.truncation_order), e5, 5 * e1.truncation_order)


def test_add_examples():
    a = fs_eta(1, 10)
    assert fs_equal_through(fs_add(a, fs_zero()), a, 240)
    assert not fs_add(a, fs_neg(a)).coeffs
    one_minus_q = fs_sub(fs_one(), fs_monomial(24))
    assert fs_equal_through(fs_add(one_minus_q, fs_monomial(24)), fs_one(), 10**6)


def test_mul_and_invert_examples():
    one_minus_q = fs_sub(fs_one(), fs_monomial(24))
    geo = fs_invert(one_minus_q, order=24 * 20)
    assert coeffs_q(geo, 20) == [1] * 20
    assert fs_equal_through(fs_mul(one_minus_q, geo), fs_one(), 24 * 20)
    assert fs_equal_through(fs_invert(fs_one()), fs_one(), 10**6)
    e = fs_eta(1, 30)
    prod = fs_mul(e, fs_invert(e))
    assert prod.truncation_order == e.truncation_order - 1
    assert fs_equal_through(prod, fs_one(), prod.truncation_order)


def test_invert_requires_unit():
    with pytest.raises(NotUnitError):
        fs_invert(fs_scale(fs_eta(1, 5), 2))
    with pytest.raises(NotUnitError):
        fs_invert(fs_zero())
    # theta1 leads with -i (e^{iz} - e^{-iz}) q^{1/8}: not a unit monomial
    with pytest.raises(NotUnitError):
        fs_invert(fs_theta_x(1, order=3))


def test_truncation_contract():
    e = fs_eta(1, 10)
    assert e.truncation_order == 240
    with pytest.raises(TruncationError):
        fs_coefficient(e, 240)
    with pytest.raises(TruncationError):
        fs_equal_through(e, fs_eta(1, 12), 241)
    # product validity: min(N_a + val(b), N_b + val(a))
    p = fs_mul(fs_eta(1, 10), fs_eta(5, 10))
    assert p.truncation_order == min(240 + 5, 240 + 1)


def test_variable_mismatch():
    with pytest.raises(VariableMismatchError):
        fs_add(fs_theta_x(3, order=3), fs_eta(1, 3))
    assert fs_lift(fs_eta(1, 3), ("z",)).vars == ("z",)


def test_ring_laws_random():
    rng = random.Random(7)

    def rand_series():
        ints = {k: rng.randint(-3, 3) for k in range(rng.randint(0, 2), 12)}
        return series_from_ints(ints, 12)

    for _ in range(20):
        a, b, c = rand_series(), rand_series(), rand_series()
        n = 24 * 12
        assert fs_equal_through(fs_mul(a, b), fs_mul(b, a), n)
        assert fs_equal_through(fs_mul(a, fs_add(b, c)), fs_add(fs_mul(a, b), fs_mul(a, c)), n)
        assert fs_equal_through(fs_mul(fs_mul(a, b), c), fs_mul(a, fs_mul(b, c)), n)
        assert fs_equal_through(fs_add(a, b), fs_add(b, a), n)


def test_pochhammer_oracle():
    mp = nome_from_tau(0.1 + 0.8j)
    e = fs_eta(1, 30)
    assert abs(fs_evaluate(e, mp) - mp.qpow(Fraction(1, 24)) * q_pochhammer(mp.q, mp.q)) < 1e-14
    assert abs(fs_evaluate(e, mp) - eta(mp)) < 1e-14


@pytest.mark.parametrize("kind", [1, 2, 3, 4])
def test_theta_series_numeric(kind):
    mp = nome_from_tau(0.2 + 0.9j)
    for zs, ts in [(1, 1), (2, 1), (1, 3)]:
        s = fs_theta_x(kind, zs, ts, order=12)
        z = 0.3 + 0.1j
        v = theta(kind, zs * z, nome_from_tau(ts * mp.tau))
        assert abs(fs_evaluate(s, mp, {"z": z}) - v) < 1e-12


def test_theta_shifted_numeric():
    mp = nome_from_tau(0.2 + 0.9j)
    z = 0.3 + 0.1j
    s = fs_theta(1, {"z": 1}, pi_shift=Fraction(1, 2), tau_shift=Fraction(1, 2), order=12)
    v = theta(1, z + math.pi / 2 + math.pi * mp.tau / 2, mp)
    assert abs(fs_evaluate(s, mp, {"z": z}) - v) < 1e-12
    with pytest.raises(NotFormalError):
        fs_theta(1, {"z": 1}, pi_shift=Fraction(1, 3), order=4)


SPECS = [
    LambertSpec(modulus=5, weight=1),
    LambertSpec(modulus=5, den_power=2),
    LambertSpec(modulus=15, twist="alt"),
    LambertSpec(modulus=5, twist="chi4", den_exponent=2),
    LambertSpec(modulus=3, twist="alt1", inner_modulus=5),
    LambertSpec(num_exponent=Fraction(1, 2), den_sign=-1, trig="cos"),
    LambertSpec(modulus=1, den_sign=-1, trig="sin"),
]


@pytest.mark.parametrize("spec", SPECS)
def test_lambert_formal_matches_numeric(spec):
    mp = nome_from_tau(0.15 + 1.1j)
    z = 0.4 - 0.2j
    s = fs_lambert(spec, 30, z_var=None if spec.trig == "none" else "z")
    formal = fs_evaluate(s, mp, {"z": z})
    assert abs(formal - lambert_sum(spec, z, mp)) < 1e-12 * max(1, abs(formal))


def _check(lhs, rhs):
    return fs_equal_through(lhs, rhs, GRAINS * O)


def test_kiepert_eta_identities_exact():
    one = fs_one()
    L = LambertSpec
    assert _check(fs_sub(one, fs_scale(fs_lambert(L(modulus=5, weight=1), O), 5)), eta_quotient((1, 5), (5, -1)))
    assert _check(fs_lambert(L(modulus=5, den_power=2), O), eta_quotient((5, 5), (1, -1)))
    assert _check(fs_add(one, fs_lambert(L(modulus=5, twist="alt", weight=1), O)),
                  eta_quotient((1, 1), (2, 2), (5, 3), (10, -2)))
    assert _check(fs_sub(one, fs_scale(fs_lambert(L(modulus=3, weight=2), O), 9)), eta_quotient((1, 9), (3, -3)))


def test_weight_zero_corrections_hold():
    one = fs_one()
    L = LambertSpec
    assert _check(fs_add(one, fs_lambert(L(modulus=15, twist="alt"), O)),
                  eta_quotient((1, 1), (6, 1), (10, 1), (15, 1), (2, -1), (30, -1)))
    assert _check(fs_add(one, fs_lambert(L(modulus=5, twist="chi4"), O)),
                  eta_quotient((2, 1), (4, 1), (5, 1), (10, 1), (1, -1), (20, -1)))
    assert _check(fs_lambert(L(modulus=15, den_exponent=2), O),
                  eta_quotient((2, 1), (3, 1), (5, 1), (30, 1), (1, -1), (15, -1)))
    assert _check(fs_lambert(L(twist="alt1", weight=1, inner_modulus=5), O),
                  eta_quotient((1, 3), (5, 1), (10, 2), (2, -2)))


def test_printed_forms_fail():
    """The displayed K13, K14, K20 (extra factor n) and K17 (eta^3(2 tau)) are not identities."""
    one = fs_one()
    L = LambertSpec
    cases = [
        (fs_add(one, fs_lambert(L(modulus=15, twist="alt", weight=1), O)),
         eta_quotient((1, 1), (6, 1), (10, 1), (15, 1), (2, -1), (30, -1)), 2),
        (fs_add(one, fs_lambert(L(modulus=5, twist="chi4", weight=1), O)),
         eta_quotient((2, 1), (4, 1), (5, 1), (10, 1), (1, -1), (20, -1)), 3),
        (fs_lambert(L(modulus=15, weight=1, den_exponent=2), O),
         eta_quotient((2, 1), (3, 1), (5, 1), (30, 1), (1, -1), (15, -1)), 2),
    ]
    for lhs, rhs, first_bad in cases:
        res = _check(lhs, rhs)
        assert not res and res.exponent == GRAINS * first_bad
    k17 = _check(fs_lambert(L(twist="alt1", weight=1, inner_modulus=5), O), eta_quotient((2, 3), (5, 1), (10, 2), (2, -2)))
    assert not k17


def test_gaussian_coefficients_exact():
    s = fs_lambert(LambertSpec(trig="sin"), 4, z_var="z")
    c = fs_coefficient(s, 24).terms
    assert {k: g_complex(v) for k, v in c.items()} == {(2,): -0.5j, (-2,): 0.5j}
