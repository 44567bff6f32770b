"""Residue-based decomposition engine for elliptic and quasi-elliptic functions.

Inputs are black-box callables f(z) together with analytically known pole
(or zero) sets; the engine computes residues numerically, assembles the
Kronecker-type decomposition and verifies it by reconstruction at random
points before returning.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .core import ModularPoint, is_equivalent, lattice_distance
from .errors import (
    CommonZeroError,
    DomainError,
    InconsistencyError,
    NonSimplePoleError,
    PoleError,
    ProbeError,
    ReconstructionError,
    ResidueSumError,
    SamplerExhaustedError,
)
from .functions import kronecker_K
from .theta import theta, theta1_prime0

Evaluable = Callable[[complex], complex]

RECON_TOL = 1e-9
RESIDUE_TOL = 1e-9
CONTOUR_POINTS = 64
POLE_MARGIN = 0.05  # reduced-coordinate distance kept from poles when sampling
DEGENERACY_TOL = 1e-6
DIFF_STEP = 1e-3

KERNELS = ("kronecker", "theta3", "logderiv")


@dataclass(frozen=True)
class FunctionalEquationPattern:
    """f(z) = pi_sign f(z+pi) = sign q^n e^{2inz+2iy} f(z+pi tau)."""

    pi_sign: int = 1
    sign: int = 1
    n: int = 0
    y: complex = 0j

    def __post_init__(self):
        if self.pi_sign not in (1, -1) or self.sign not in (1, -1):
            raise DomainError("pattern signs must be +1 or -1")

    def pitau_factor(self, z, mp: ModularPoint) -> complex:
        return self.sign * mp.q**self.n * cmath.exp(2j * self.n * z + 2j * self.y)

    @property
    def mode(self) -> str:
        """Kernel selected by the pattern (simple-pole functions have n = 0)."""
        if self.n != 0:
            raise DomainError("decomposition needs a pattern with n = 0")
        if self.pi_sign == 1 and self.sign == 1:
            return "kronecker"
        if self.pi_sign == -1 and self.sign == -1:
            return "theta3"
        raise DomainError("pattern matches neither f(z+pi)=f(z) nor the sign-flipped mode")

    def degenerate(self, mp: ModularPoint, kmax: int = 10, tol: float = DEGENERACY_TOL) -> bool:
        """True when e^{2iy} = q^k (Kronecker mode) or -q^{k+1/2} (theta3 mode)."""
        e = cmath.exp(2j * self.y)
        for k in range(-kmax, kmax + 1):
            target = mp.qpow(k) if self.mode == "kronecker" else -mp.qpow(k + 0.5)
            if abs(e - target) <= tol * max(1.0, abs(target)):
                return True
        return False


def _rel(a, b, floor=1e-300) -> float:
    return abs(a - b) / max(abs(a), abs(b), floor)


def _random_cell_point(rng: random.Random, mp: ModularPoint, scale: float = 0.9) -> complex:
    return scale * (rng.random() * math.pi + rng.random() * math.pi * complex(mp.tau))


def _far_from(z, poles: Sequence[complex], mp: ModularPoint, margin: float) -> bool:
    return all(lattice_distance(complex(z) - complex(a), mp.tau) >= margin for a in poles)


def sample_points(
    mp: ModularPoint,
    count: int,
    rng: random.Random,
    avoid: Sequence[complex] = (),
    margin: float = POLE_MARGIN,
    max_tries: int = 1000,
) -> list[complex]:
    """``count`` random points of the scaled fundamental cell away from ``avoid``."""
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise SamplerExhaustedError("could not find sample points away from the poles")
        z = _random_cell_point(rng, mp)
        if _far_from(z, avoid, mp, margin):
            out.append(z)
    return out


def check_functional_equations(
    f: Evaluable,
    pattern: FunctionalEquationPattern,
    mp: ModularPoint,
    samples: int = 10,
    tol: float = RECON_TOL,
    seed: int = 0,
    poles: Sequence[complex] = (),
) -> bool:
    """Test both relations of ``pattern`` at ``samples`` random points."""
    rng = random.Random(seed)
    checked = 0
    tries = 0
    while checked < samples:
        tries += 1
        if tries > 20 * samples + 20:
            raise SamplerExhaustedError("all sample points landed near poles")
        z = _random_cell_point(rng, mp)
        if not _far_from(z, poles, mp, POLE_MARGIN):
            continue
        try:
            v0 = f(z)
            v1 = f(z + math.pi)
            v2 = f(z + math.pi * mp.tau)
        except PoleError:
            continue
        if not all(map(cmath.isfinite, (v0, v1, v2))):
            continue
        checked += 1
        if _rel(v0, pattern.pi_sign * v1) > tol:
            return False
        if _rel(v0, pattern.pitau_factor(z, mp) * v2) > tol:
            return False
    return True


# ---------------------------------------------------------------------------
# Residues


def _default_radius(a, mp: ModularPoint, others: Sequence[complex]) -> float:
    tau = complex(mp.tau)
    d = min(math.pi, abs(math.pi * tau), abs(math.pi * (1 + tau)), abs(math.pi * (1 - tau)))
    for b in others:
        if is_equivalent(a, b, tau):
            continue
        diff = complex(b) - complex(a)
        # distance to the nearest translate of b, in the z-plane
        best = min(
            abs(diff - (m * math.pi + n * math.pi * tau)) for m in (-1, 0, 1, 2, -2) for n in (-1, 0, 1, 2, -2)
        )
        d = min(d, best)
    return min(0.05, d / 2)


def _circle_moments(f: Evaluable, a: complex, rho: float, m: int) -> tuple[complex, complex, float]:
    """Trapezoid means of (z-a) f and (z-a)^2 f on |z-a| = rho, and max |(z-a) f|."""
    s1 = 0j
    s2 = 0j
    peak = 0.0
    for j in range(m):
        h = rho * cmath.exp(2j * math.pi * (j + 0.5) / m)
        v = h * f(a + h)
        s1 += v
        s2 += h * v
        peak = max(peak, abs(v))
    return s1 / m, s2 / m, peak


def residue_at(
    f: Evaluable,
    a: complex,
    mp: ModularPoint,
    rho: float | None = None,
    points: int = CONTOUR_POINTS,
    others: Sequence[complex] = (),
    tol: float = RESIDUE_TOL,
) -> complex:
    """Residue of f at a simple pole a by the trapezoid rule on two circles.

    The mean of (z-a) f(z) over |z-a| = rho is the coefficient c_{-1}; it is
    computed at rho and rho/2 and the two must agree. The mean of
    (z-a)^2 f(z) is c_{-2}, which vanishes for a simple pole; a nonzero
    value (a double pole such as that of p at 0) raises NonSimplePoleError.
    """
    a = complex(a)
    if rho is None:
        rho = _default_radius(a, mp, others)
    r1, c2_big, peak1 = _circle_moments(f, a, rho, points)
    r2, c2_small, peak2 = _circle_moments(f, a, rho / 2, points)
    scale = max(peak1, peak2, 1e-300)
    if abs(c2_big) > 1e-7 * rho * scale or abs(c2_small) > 1e-7 * rho * scale:
        raise NonSimplePoleError(f"pole at {a} is not simple (z^-2 coefficient {c2_small:.3g})")
    if abs(r1 - r2) > tol * max(abs(r1), abs(r2), 1e-3 * scale):
        raise NonSimplePoleError(
            f"contour residues at {a} disagree: {r1} (rho) vs {r2} (rho/2)"
        )
    return r2


def residue_limit(f: Evaluable, a: complex, h: float = 1e-3) -> complex:
    """Residue as lim (z-a) f(z), by symmetric differences and Richardson in h^2."""
    a = complex(a)

    def g(t):
        d = t * cmath.exp(0.37j)
        return (d * f(a + d) - d * f(a - d)) / 2

    g1, g2, g3 = g(h), g(h / 2), g(h / 4)
    r12 = (4 * g2 - g1) / 3
    r23 = (4 * g3 - g2) / 3
    return (16 * r23 - r12) / 15


def derivative(g: Evaluable, a: complex, h: float = DIFF_STEP) -> complex:
    """Central differences at h, h/2, h/4 with two Richardson steps (error O(h^6))."""
    a = complex(a)
    step = h * max(1.0, abs(a))
    d = [(g(a + s) - g(a - s)) / (2 * s) for s in (step, step / 2, step / 4)]
    r1 = (4 * d[1] - d[0]) / 3
    r2 = (4 * d[2] - d[1]) / 3
    return (16 * r2 - r1) / 15


def polish_zero(g: Evaluable, a: complex, iterations: int = 5) -> complex:
    """A few Newton steps from the supplied zero; the input is kept if they wander."""
    z = complex(a)
    for _ in range(iterations):
        d = derivative(g, z)
        if d == 0:
            break
        step = g(z) / d
        z -= step
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    return z if abs(z - a) < 1e-6 else complex(a)


# ---------------------------------------------------------------------------
# Decompositions


@dataclass
class Decomposition:
    kernel: str
    terms: list[tuple[complex, complex]]
    mp: ModularPoint
    y: complex = 0j
    constant: complex | None = None
    max_error: float = 0.0
    _k3: complex | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise DomainError(f"unknown kernel {self.kernel!r}")
        for i, (a, _) in enumerate(self.terms):
            for b, _ in self.terms[i + 1 :]:
                if is_equivalent(a, b, self.mp.tau):
                    raise DomainError(f"poles {a} and {b} are equivalent modulo the lattice")

    def kernel_value(self, w: complex) -> complex:
        mp = self.mp
        if self.kernel == "kronecker":
            return kronecker_K(self.y, w, mp)
        if self.kernel == "theta3":
            if self._k3 is None:
                self._k3 = theta1_prime0(mp) / theta(3, self.y, mp)
            t1 = theta(1, w, mp)
            if t1 == 0:
                raise PoleError("kernel evaluated at its pole")
            return self._k3 * theta(3, w + self.y, mp) / t1
        t1 = theta(1, w, mp)
        if t1 == 0:
            raise PoleError("kernel evaluated at its pole")
        return theta(1, w, mp, 1) / t1

    def evaluate(self, z: complex) -> complex:
        total = sum(r * self.kernel_value(complex(z) - a) for a, r in self.terms)
        return total + (self.constant or 0)

    __call__ = evaluate

    @property
    def poles(self) -> list[complex]:
        return [a for a, _ in self.terms]


def _check_inequivalent(poles: Sequence[complex], mp: ModularPoint):
    for i, a in enumerate(poles):
        for b in poles[i + 1 :]:
            if is_equivalent(a, b, mp.tau):
                raise DomainError(f"poles {a} and {b} are equivalent modulo the lattice")


def verify_reconstruction(
    f: Evaluable,
    dec: Decomposition,
    samples: int = 20,
    tol: float = RECON_TOL,
    seed: int = 0,
) -> float:
    """Max relative error of ``dec`` against f at random off-pole points."""
    rng = random.Random(seed)
    pts = sample_points(dec.mp, samples, rng, avoid=dec.poles)
    worst = 0.0
    for z in pts:
        worst = max(worst, _rel(f(z), dec.evaluate(z)))
    dec.max_error = worst
    if worst > tol:
        raise ReconstructionError(
            f"decomposition misses f by {worst:.3g} (a pole missed, not simple, or degenerate y?)",
            max_error=worst,
        )
    return worst


def decompose_simple_poles(
    f: Evaluable,
    poles: Sequence[complex],
    pattern: FunctionalEquationPattern,
    mp: ModularPoint,
    samples: int = 20,
    tol: float = RECON_TOL,
    seed: int = 0,
) -> Decomposition:
    """Kronecker (pi-periodic) or theta3-kernel (pi-antiperiodic) decomposition."""
    mode = pattern.mode
    poles = [complex(a) for a in poles]
    _check_inequivalent(poles, mp)
    if pattern.degenerate(mp):
        raise DomainError("e^{2iy} hits the excluded set for this mode")
    terms = [(a, residue_at(f, a, mp, others=poles)) for a in poles]
    dec = Decomposition(kernel=mode, terms=terms, mp=mp, y=complex(pattern.y))
    verify_reconstruction(f, dec, samples, tol, seed)
    return dec


def decompose_FG(
    F: Evaluable,
    G: Evaluable,
    G_zeros: Sequence[complex],
    pattern: FunctionalEquationPattern,
    mp: ModularPoint,
    samples: int = 20,
    tol: float = RECON_TOL,
    seed: int = 0,
    G_prime: Evaluable | None = None,
) -> Decomposition:
    """Decomposition of F/G with residues F(a_k)/G'(a_k).

    ``pattern`` is the pattern of the quotient F/G; it selects the kernel.
    When ``G_prime`` is supplied the numeric derivative is cross-checked
    against it.
    """
    mode = pattern.mode
    zeros = [polish_zero(G, a) for a in G_zeros]
    _check_inequivalent(zeros, mp)
    if pattern.degenerate(mp):
        raise DomainError("e^{2iy} hits the excluded set for this mode")
    rng = random.Random(seed ^ 0x5EED)
    scale = max(abs(F(z)) for z in sample_points(mp, 4, rng, avoid=zeros))
    terms = []
    for a in zeros:
        fa = F(a)
        if abs(fa) < 1e-10 * scale:
            raise CommonZeroError(f"F vanishes at the zero {a} of G")
        d = derivative(G, a)
        if G_prime is not None:
            exact = G_prime(a)
            if _rel(d, exact) > 1e-7:
                raise InconsistencyError(f"numeric G'({a}) = {d} but analytic value is {exact}")
            d = exact
        if d == 0:
            raise DomainError(f"zero {a} of G is not simple")
        terms.append((a, fa / d))
    dec = Decomposition(kernel=mode, terms=terms, mp=mp, y=complex(pattern.y))
    verify_reconstruction(lambda z: F(z) / G(z), dec, samples, tol, seed)
    return dec


def _logderiv1(w, mp):
    return theta(1, w, mp, 1) / theta(1, w, mp)


def elliptic_decompose(
    f: Evaluable,
    poles: Sequence[complex],
    mp: ModularPoint,
    samples: int = 20,
    tol: float = RECON_TOL,
    seed: int = 0,
) -> Decomposition:
    """f = C + sum Res(f; a_k) theta1'(z-a_k)/theta1(z-a_k) for elliptic f."""
    poles = [complex(a) for a in poles]
    _check_inequivalent(poles, mp)
    if not check_functional_equations(f, FunctionalEquationPattern(), mp, 5, 1e-8, seed, poles):
        raise DomainError("f is not elliptic with periods pi and pi*tau")
    terms = [(a, residue_at(f, a, mp, others=poles)) for a in poles]
    total = sum(r for _, r in terms)
    size = max([abs(r) for _, r in terms] + [1e-300])
    if abs(total) > 1e-8 * size:
        raise ResidueSumError(f"residues sum to {total}, an elliptic function needs 0")
    rng = random.Random(seed ^ 0xC0)
    (z0,) = sample_points(mp, 1, rng, avoid=poles, margin=0.1)
    c = f(z0) - sum(r * _logderiv1(z0 - a, mp) for a, r in terms)
    dec = Decomposition(kernel="logderiv", terms=terms, mp=mp, constant=c)
    verify_reconstruction(f, dec, samples, tol, seed)
    return dec


def addition_constant(
    F: Evaluable,
    G: Evaluable,
    alpha: complex,
    mp: ModularPoint,
    x_probe: complex,
    second_probe: complex | None = None,
    tol: float = RECON_TOL,
) -> complex:
    """The constant C of F(x)/G(x) - F(y)/G(y) = C theta1(x+y+alpha) theta1(x-y)/(G(x)G(y)).

    C = (F(x)G(-x) - G(x)F(-x)) / (theta1(2x) theta1(alpha)) at x = x_probe.
    When theta1(alpha) vanishes (alpha in the lattice) this quotient is 0/0
    and C is read from F(x)G(y) - G(x)F(y) = C theta1(x+y+alpha) theta1(x-y)
    at the pair (x_probe, second_probe) instead. Either way the value is
    cross-checked at a second probe.
    """
    x = complex(x_probe)
    y = complex(second_probe) if second_probe is not None else x * cmath.exp(0.9j) + 0.31
    mag = max(abs(theta(1, w, mp)) for w in (0.7, 0.7 + 0.5 * math.pi * mp.tau))
    t_alpha = theta(1, alpha, mp)

    def from_pair(u, v):
        den = theta(1, u + v + alpha, mp) * theta(1, u - v, mp)
        if abs(den) < 1e-8 * mag * mag:
            raise ProbeError(f"probe pair ({u}, {v}) is degenerate")
        return (F(u) * G(v) - G(u) * F(v)) / den

    def from_single(u):
        den = theta(1, 2 * u, mp) * t_alpha
        if abs(theta(1, 2 * u, mp)) < 1e-8 * mag:
            raise ProbeError(f"theta1(2x) vanishes at the probe x = {u}")
        return (F(u) * G(-u) - G(u) * F(-u)) / den

    if abs(t_alpha) > 1e-6 * mag:
        c1, c2 = from_single(x), from_single(y)
    else:
        c1 = from_pair(x, y)
        c2 = from_pair(y * cmath.exp(0.4j) - 0.2, x + 0.45)
    if abs(c1 - c2) > tol * max(abs(c1), abs(c2), 1e-12 * mag**2):
        raise InconsistencyError(f"constant depends on the probe: {c1} vs {c2}")
    return c1
