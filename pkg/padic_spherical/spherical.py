"""
Spherical Coordinates
Zerlegung x = omega * xi * r mit omega in mu_{q-1}, xi in Sigma_n und r in Q_p^(1).

Besides the direct decomposition this module carries the exponent machinery
(special basis epsilon_j, principal-unit coordinates) that rebuilds the same
decomposition along an independent route.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from sympy import GF, Matrix
from sympy.polys.matrices import DomainMatrix

from .errors import DomainError, InternalConsistencyError, PreconditionError
from .field import (ExtElement, FieldContext, Vector, frobenius, is_principal_unit_K,
                    log_principal_K, norm, normalized_abs, power_zp_K, teichmuller_K)
from .padic import PadicScalar, is_positive, nth_root_principal, pow_zp_exponent

logger = logging.getLogger('PadicSpherical.Spherical')


# =============================================================================
# DATA CLASSES
# =============================================================================

@dataclass(frozen=True)
class SphericalCoords:
    """The triple (omega, xi, r) of a nonzero element."""
    omega: ExtElement
    xi: ExtElement
    r: PadicScalar

    @property
    def valuation(self) -> int:
        return self.r.valuation

    def angular_key(self, level: int) -> Tuple[Vector, Vector]:
        """(residue of omega, xi mod p^level): the coset of z = (omega, xi) at that level."""
        return self.omega.residue(), self.xi.key(level)

    def __mul__(self, other: 'SphericalCoords') -> 'SphericalCoords':
        return SphericalCoords(self.omega * other.omega, self.xi * other.xi, self.r * other.r)

    def to_dict(self) -> dict:
        return {
            'omega': [str(c) for c in self.omega.unit],
            'xi': [str(c) for c in self.xi.unit],
            'r_valuation': self.r.valuation,
            'r_mantissa': str(self.r.mantissa),
        }


@dataclass(frozen=True)
class SpecialBasis:
    """epsilon_1, ..., epsilon_{n-1} with 1 + epsilon_j p = (1 + theta_j p) / (1 + g(theta_j) p)."""
    epsilons: Tuple[ExtElement, ...]

    def generators(self, ctx: FieldContext) -> List[ExtElement]:
        p = ctx.uniformizer()
        return [ctx.one() + e * p for e in self.epsilons] + [ctx.one() + p]


@dataclass(frozen=True)
class CanonicalExponents:
    """x = p^valuation * omega * prod (1 + theta_j p)^{b_j} * (1 + p)^{b_n}."""
    valuation: int
    omega: ExtElement
    exponents: Tuple[PadicScalar, ...]


# =============================================================================
# MEMBERSHIP
# =============================================================================

def _require_spherical(ctx: FieldContext) -> None:
    if ctx.n % ctx.p == 0:
        raise DomainError(f"p = {ctx.p} divides n = {ctx.n}; spherical coordinates need p ∤ n")


def sigma_membership(ctx: FieldContext, y: ExtElement) -> bool:
    """y in Sigma_n iff omega(y) = 1 and N(y) = 1."""
    if y.is_zero:
        raise DomainError("0 is not in K^*")
    if y.valuation != 0:
        return False
    one = PadicScalar.from_int(ctx.p, 1, ctx.precision)
    return norm(ctx, y) == one and teichmuller_K(ctx, y) == ctx.one()


def _check_root_of_unity(ctx: FieldContext, omega: ExtElement) -> bool:
    return omega.is_unit() and omega ** (ctx.q - 1) == ctx.one()


# =============================================================================
# DECOMPOSITION
# =============================================================================

def decompose(ctx: FieldContext, x: ExtElement) -> SphericalCoords:
    """
    Spherical coordinates of a nonzero element.

    omega is the Teichmüller factor, r = p^v * (N(omega^-1 u))^(1/n) and
    xi = omega^-1 r^-1 x.
    """
    _require_spherical(ctx)
    if x.is_zero:
        raise DomainError("decompose(0) is undefined; r(0) = 0 and the angle is not defined")
    omega = teichmuller_K(ctx, x)
    w = omega.inverse() * x.unit_part()
    rho = nth_root_principal(norm(ctx, w), ctx.n)
    r = PadicScalar(ctx.p, x.valuation, rho.mantissa, rho.precision)
    xi = w * ctx.scalar(rho.inverse())
    return SphericalCoords(omega, xi, r)


def eta(ctx: FieldContext, x: ExtElement) -> Tuple[ExtElement, ExtElement]:
    """Angular part z = (omega, xi)."""
    coords = decompose(ctx, x)
    return coords.omega, coords.xi


def radial(ctx: FieldContext, x: ExtElement) -> Optional[PadicScalar]:
    """r(x), with r(0) = 0 represented as an exact zero."""
    if x.is_zero:
        return PadicScalar.zero(ctx.p, ctx.precision)
    return decompose(ctx, x).r


def compose(ctx: FieldContext, c: SphericalCoords) -> ExtElement:
    """omega * xi * r, after checking the three memberships."""
    if not _check_root_of_unity(ctx, c.omega):
        raise PreconditionError("omega is not a (q-1)-th root of unity")
    if not sigma_membership(ctx, c.xi):
        raise PreconditionError("xi is not in Sigma_n")
    if c.r.is_zero or not is_positive(c.r):
        raise PreconditionError("r is not in Q_p^(1)")
    return c.omega * c.xi * ctx.scalar(c.r)


def check_coordinates(ctx: FieldContext, x: ExtElement, c: SphericalCoords) -> dict:
    """Membership and roundtrip report used by the CLI and the verification suites."""
    return {
        'omega_in_mu': _check_root_of_unity(ctx, c.omega),
        'xi_in_sigma': sigma_membership(ctx, c.xi),
        'r_positive': is_positive(c.r),
        'roundtrip': c.omega * c.xi * ctx.scalar(c.r) == x,
        'abs_matches': normalized_abs(ctx, x) == c.r.abs_value() ** ctx.n,
    }


# =============================================================================
# SPECIAL BASIS AND EXPONENT COORDINATES
# =============================================================================

def residue_rank(ctx: FieldContext, vectors: Sequence[Vector]) -> int:
    """Rank over F_p of residue vectors."""
    field = GF(ctx.p)
    rows = [[field(int(c) % ctx.p) for c in vec] for vec in vectors]
    return DomainMatrix(rows, (len(rows), ctx.n), field).rank()


@lru_cache(maxsize=None)
def special_basis(ctx: FieldContext) -> SpecialBasis:
    """epsilon_j = (theta_j - g(theta_j)) / (1 + g(theta_j) p), j = 1..n-1."""
    _require_spherical(ctx)
    p = ctx.uniformizer()
    epsilons = []
    for j in range(1, ctx.n):
        theta = ctx.theta(j)
        image = frobenius(ctx, theta)
        epsilons.append((theta - image) / (ctx.one() + image * p))
    residues = [e.residue() for e in epsilons] + [ctx.one().residue()]
    rank = residue_rank(ctx, residues)
    if rank != ctx.n:
        raise InternalConsistencyError(
            f"residues of the special basis have rank {rank}, expected {ctx.n}")
    logger.debug(f"Special basis for p={ctx.p} n={ctx.n} has full residue rank")
    return SpecialBasis(tuple(epsilons))


def _log_matrix(ctx: FieldContext, generators: Sequence[ExtElement]) -> Tuple[Matrix, int]:
    """Inverse modulo p^(N-1) of the matrix with columns log(g_j)/p."""
    level = ctx.precision - 1
    if level < 1:
        return Matrix.eye(ctx.n), 0
    columns = []
    for g in generators:
        vec, _ = log_principal_K(ctx, g)
        columns.append([c // ctx.p for c in vec])
    matrix = Matrix(ctx.n, ctx.n, lambda i, j: columns[j][i])
    if residue_rank(ctx, columns) != ctx.n:
        raise DomainError("logarithms of the generators do not span pO")
    return matrix.inv_mod(ctx.p ** level), level


@lru_cache(maxsize=None)
def _special_system(ctx: FieldContext) -> Tuple[Matrix, int]:
    return _log_matrix(ctx, special_basis(ctx).generators(ctx))


@lru_cache(maxsize=None)
def _canonical_system(ctx: FieldContext) -> Tuple[Matrix, int]:
    return _log_matrix(ctx, _canonical_generators(ctx))


def _canonical_generators(ctx: FieldContext,
                          basis: Optional[Sequence[ExtElement]] = None) -> List[ExtElement]:
    p = ctx.uniformizer()
    if basis is None:
        basis = [ctx.theta(j) for j in range(1, ctx.n)]
    return [ctx.one() + b * p for b in basis] + [ctx.one() + p]


def _solve_exponents(ctx: FieldContext, system: Tuple[Matrix, int],
                     x: ExtElement) -> Tuple[PadicScalar, ...]:
    inverse, level = system
    if level < 1:
        return tuple(PadicScalar.zero(ctx.p, ctx.precision) for _ in range(ctx.n))
    vec, _ = log_principal_K(ctx, x)
    rhs = Matrix(ctx.n, 1, [c // ctx.p for c in vec])
    solution = (inverse * rhs).applyfunc(lambda c: int(c) % ctx.p ** level)
    return tuple(PadicScalar.from_int(ctx.p, int(solution[i, 0]), level, absolute=True)
                 for i in range(ctx.n))


def principal_unit_coords(ctx: FieldContext, x: ExtElement) -> Tuple[PadicScalar, ...]:
    """
    Exponents (b_1, ..., b_n) with x = prod (1 + epsilon_j p)^{b_j} * (1 + p)^{b_n}.

    Args:
        ctx: Field context
        x: Principal unit of K

    Returns:
        n elements of Z_p known modulo p^(N-1)
    """
    if not is_principal_unit_K(ctx, x):
        raise DomainError("principal_unit_coords needs a principal unit of K")
    return _solve_exponents(ctx, _special_system(ctx), x)


def principal_unit_from_coords(ctx: FieldContext, b: Sequence[PadicScalar]) -> ExtElement:
    """Product of the special generators raised to Z_p exponents."""
    basis = special_basis(ctx)
    p = ctx.uniformizer()
    result = ctx.one()
    for eps, beta in zip(basis.epsilons, b):
        result = result * power_zp_K(ctx, eps * p, beta)
    return result * power_zp_K(ctx, p, b[-1])


def canonical_exponents(ctx: FieldContext, x: ExtElement,
                        basis: Optional[Sequence[ExtElement]] = None) -> CanonicalExponents:
    """
    x = p^v * omega * prod (1 + theta_j p)^{b_j} * (1 + p)^{b_n} for a basis with theta_n = 1.

    `basis` lists theta_1, ..., theta_{n-1}; the power basis is used when omitted.
    """
    if x.is_zero:
        raise DomainError("exponent coordinates of 0 are undefined")
    omega = teichmuller_K(ctx, x)
    w = omega.inverse() * x.unit_part()
    if basis is None:
        system = _canonical_system(ctx)
    else:
        if len(basis) != ctx.n - 1:
            raise PreconditionError(f"expected {ctx.n - 1} basis elements")
        system = _log_matrix(ctx, _canonical_generators(ctx, basis))
    return CanonicalExponents(x.valuation, omega, _solve_exponents(ctx, system, w))


def recompose_canonical(ctx: FieldContext, e: CanonicalExponents,
                        basis: Optional[Sequence[ExtElement]] = None) -> ExtElement:
    if basis is None:
        basis = [ctx.theta(j) for j in range(1, ctx.n)]
    p = ctx.uniformizer()
    result = e.omega
    for theta, beta in zip(basis, e.exponents):
        result = result * power_zp_K(ctx, theta * p, beta)
    return (result * power_zp_K(ctx, p, e.exponents[-1])).shift(e.valuation)


def xi_as_quotient(ctx: FieldContext, b: Sequence[PadicScalar]) -> ExtElement:
    """
    prod (1 + epsilon_j p)^{b_j}, computed together with y / g(y) for
    y = prod (1 + theta_j p)^{b_j}; the two must agree.
    """
    if len(b) != ctx.n - 1:
        raise PreconditionError(f"expected {ctx.n - 1} exponents, got {len(b)}")
    basis = special_basis(ctx)
    p = ctx.uniformizer()
    product = ctx.one()
    y = ctx.one()
    for j, (eps, beta) in enumerate(zip(basis.epsilons, b), start=1):
        product = product * power_zp_K(ctx, eps * p, beta)
        y = y * power_zp_K(ctx, ctx.theta(j) * p, beta)
    quotient = y / frobenius(ctx, y)
    if product != quotient:
        raise InternalConsistencyError("product form and quotient form of xi disagree")
    return product


def decompose_via_exponents(ctx: FieldContext, x: ExtElement) -> SphericalCoords:
    """Decomposition through the exponent coordinates of the special basis."""
    _require_spherical(ctx)
    if x.is_zero:
        raise DomainError("decompose(0) is undefined")
    omega = teichmuller_K(ctx, x)
    w = omega.inverse() * x.unit_part()
    b = principal_unit_coords(ctx, w)
    xi = xi_as_quotient(ctx, b[:-1]) if ctx.n > 1 else ctx.one()
    rho = pow_zp_exponent(PadicScalar.power_of_p(ctx.p, 1, ctx.precision), b[-1])
    r = PadicScalar(ctx.p, x.valuation, rho.mantissa, rho.precision)
    return SphericalCoords(omega, xi, r)
