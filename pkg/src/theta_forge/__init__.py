"""Numeric and exact verification of Jacobi and Kronecker theta identities."""

from __future__ import annotations

from .core import (
    LatticeCoord,
    ModularPoint,
    is_equivalent,
    jacobi_symbol,
    lattice_reduce,
    multi_pochhammer,
    nome_from_tau,
    q_pochhammer,
)
from .functions import (
    LambertSpec,
    eisenstein_a,
    kronecker_bilateral,
    kronecker_K,
    lambert_sum,
    logderiv_theta,
    ramanujan_1psi1,
    weierstrass_p,
)
from .precision import working_precision
from .theta import ThetaKind, eta, theta, theta1_prime0, theta_product

__version__ = "0.1.0"

__all__ = [
    "LambertSpec",
    "LatticeCoord",
    "ModularPoint",
    "ThetaKind",
    "eisenstein_a",
    "eta",
    "is_equivalent",
    "jacobi_symbol",
    "kronecker_K",
    "kronecker_bilateral",
    "lambert_sum",
    "lattice_reduce",
    "logderiv_theta",
    "multi_pochhammer",
    "nome_from_tau",
    "q_pochhammer",
    "ramanujan_1psi1",
    "theta",
    "theta1_prime0",
    "theta_product",
    "weierstrass_p",
    "working_precision",
]
