"""
p-adic Spherical Coordinates
============================

Kugelkoordinaten x = omega * xi * r auf unverzweigten Erweiterungen K von Q_p,
exakte Haar-Integration, homogene Distributionen und Levy-Prozess-Diagnostik.

Features:
- Exact p-adic arithmetic with tracked precision (Q_p and unramified K)
- Teichmüller digits, Frobenius, norm, logarithm and Z_p-powers
- Decomposition K^* = mu_(q-1) x Sigma_n x Q_p^(1) and its inverse
- Exact integration of locally constant functions, also in spherical form
- Pairing of homogeneous distributions pi(r)F, residues, reconstruction of F
- Compound Poisson jump processes and chi-square diagnostics of R_t and z_t

Usage:
    from padic_spherical import construct_field, decompose

    ctx = construct_field(p=3, n=2, precision=8)
    x = ctx.element([1, 2])

    coords = decompose(ctx, x)
    print(coords.omega, coords.xi, coords.r)
"""

__version__ = '1.0.0'
__author__ = 'p-adic Spherical Coordinates'

from .errors import (PadicError, DomainError, PrecisionError, PadicZeroDivisionError,
                     PreconditionError, InternalConsistencyError, PoleError)
from .padic import PadicScalar, teichmuller_digits_qp, nth_root_principal, log_principal, exp_principal
from .field import FieldContext, ExtElement, construct_field, frobenius, norm, teichmuller_K
from .spherical import SphericalCoords, decompose, compose, eta, radial, sigma_membership
from .haar import (CylinderFunction, FiniteLevelAngular, integrate_K, spherical_integrate,
                   sigma_haar_integrate, multiplicative_constant_check)
from .distributions import (Quasicharacter, HomogeneousDistribution, pair, residue_at_exceptional,
                            lemma2_decompose, theorem2_reconstruct)
from .levy import LevyModel, PathRecord, simulate_path, simulate_paths, radial_kernel_check_eq21
from .config import RunConfig, SimulationConfig
