"""
Unramified Extension Module
Arithmetik in der unverzweigten Erweiterung K von Q_p vom Grad n.

Elements are p^v * u with u an integer coefficient vector in the power basis
1, t, ..., t^(n-1), known modulo p^precision and not divisible by p. The
canonical basis theta_1, ..., theta_n exposed to callers is the power basis
reordered so that theta_j = t^j (j < n) and theta_n = 1.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Matrix
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_gcdex, gf_irreducible_p, gf_strip

from .errors import (DomainError, InternalConsistencyError, PadicZeroDivisionError, PrecisionError,
                     PreconditionError)
from .padic import (INFINITY, PadicScalar, int_valuation, integer_log, log_series_length,
                    mahler_length, validate_prime)

logger = logging.getLogger('PadicSpherical.Field')

Vector = Tuple[int, ...]


# =============================================================================
# POLYNOMIAL HELPERS (coefficients low -> high)
# =============================================================================

def _reduction_table(modulus: Sequence[int]) -> Tuple[Vector, ...]:
    """Exact integer vectors of t^n, ..., t^(2n-2) modulo the monic modulus."""
    n = len(modulus) - 1
    table: List[Vector] = []
    current = [-c for c in modulus[:n]]  # t^n
    for _ in range(max(n - 1, 0)):
        table.append(tuple(current))
        top = current[-1]
        shifted = [0] + current[:-1]
        current = [shifted[j] - top * modulus[j] for j in range(n)]
    return tuple(table)


def _vec_mul(a: Sequence[int], b: Sequence[int], table: Sequence[Vector],
             n: int, mod: int) -> Vector:
    product = [0] * (2 * n - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                product[i + j] += ai * bj
    result = product[:n]
    for k in range(n, 2 * n - 1):
        c = product[k]
        if c:
            row = table[k - n]
            for j in range(n):
                result[j] += c * row[j]
    return tuple(r % mod for r in result)


def _vec_pow(a: Sequence[int], e: int, table, n: int, mod: int) -> Vector:
    result: Vector = tuple([1 % mod] + [0] * (n - 1))
    base = tuple(x % mod for x in a)
    while e:
        if e & 1:
            result = _vec_mul(result, base, table, n, mod)
        e >>= 1
        if e:
            base = _vec_mul(base, base, table, n, mod)
    return result


def _residue_inverse(a: Sequence[int], modulus: Sequence[int], p: int) -> Vector:
    """Inverse in F_p[t]/(m) through the extended Euclidean algorithm."""
    n = len(modulus) - 1
    f = gf_strip([int(c) % p for c in reversed(a)])
    g = [int(c) % p for c in reversed(modulus)]
    s, _, h = gf_gcdex(f, g, p, ZZ)
    if h != [1]:
        raise PadicZeroDivisionError("element is not invertible modulo p")
    coeffs = [int(c) for c in reversed(s)]
    return tuple((coeffs + [0] * n)[:n])


def _vec_inverse(a: Sequence[int], modulus: Sequence[int], table, n: int,
                 p: int, precision: int) -> Vector:
    """Inverse of a unit modulo p^precision: residue inverse, then Newton lifting."""
    y = _residue_inverse(a, modulus, p)
    known = 1
    while known < precision:
        known = min(2 * known, precision)
        mod = p ** known
        ay = _vec_mul(a, y, table, n, mod)
        two_minus = tuple(((2 if j == 0 else 0) - c) % mod for j, c in enumerate(ay))
        y = _vec_mul(y, two_minus, table, n, mod)
    return tuple(c % p ** precision for c in y)


def _vec_valuation(vec: Sequence[int], p: int) -> Union[int, float]:
    best: Union[int, float] = INFINITY
    for c in vec:
        if c:
            best = min(best, int_valuation(c, p))
    return best


def _evaluate_modulus(modulus: Sequence[int], x: Vector, table, n: int, mod: int) -> Vector:
    """m(x) by Horner's rule in (Z/mod)[t]/(m)."""
    result: Vector = tuple([modulus[-1] % mod] + [0] * (n - 1))
    for c in reversed(modulus[:-1]):
        result = _vec_mul(result, x, table, n, mod)
        result = ((result[0] + c) % mod,) + result[1:]
    return result


def _derivative_at(modulus: Sequence[int], x: Vector, table, n: int, mod: int) -> Vector:
    derivative = [k * modulus[k] for k in range(1, len(modulus))]
    result: Vector = tuple([derivative[-1] % mod] + [0] * (n - 1))
    for c in reversed(derivative[:-1]):
        result = _vec_mul(result, x, table, n, mod)
        result = ((result[0] + c) % mod,) + result[1:]
    return result


def is_irreducible_mod_p(modulus: Sequence[int], p: int) -> bool:
    """Deterministic irreducibility test of a monic integer polynomial over F_p."""
    dense = gf_strip([int(c) % p for c in reversed(modulus)])
    return bool(gf_irreducible_p(dense, p, ZZ))


def smallest_irreducible(p: int, n: int) -> Tuple[int, ...]:
    """Lexicographically smallest monic degree-n polynomial irreducible mod p."""
    for tail in itertools.product(range(p), repeat=n):
        modulus = tuple(reversed(tail)) + (1,)
        if is_irreducible_mod_p(modulus, p):
            return modulus
    raise InternalConsistencyError(f"no irreducible polynomial of degree {n} mod {p}")


# =============================================================================
# FIELD CONTEXT
# =============================================================================

@dataclass(frozen=True)
class FieldContext:
    """
    The unramified extension K = Q_p[t]/(m) at working precision N.

    Immutable and hashable; shared by reference between threads.
    """
    p: int
    n: int
    precision: int
    modulus: Tuple[int, ...]
    frobenius_image: Vector
    reduction: Tuple[Vector, ...] = field(init=False, repr=False, compare=False)
    frobenius_matrix: Tuple[Vector, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'reduction', _reduction_table(self.modulus))
        mod = self.p ** self.precision
        columns = [tuple([1] + [0] * (self.n - 1))]
        for _ in range(1, self.n):
            columns.append(_vec_mul(columns[-1], self.frobenius_image,
                                    self.reduction, self.n, mod))
        # rows of the matrix acting on power-basis coefficient vectors
        rows = tuple(tuple(columns[i][j] for i in range(self.n)) for j in range(self.n))
        object.__setattr__(self, 'frobenius_matrix', rows)

    @property
    def q(self) -> int:
        return self.p ** self.n

    @property
    def modulus_power(self) -> int:
        return self.p ** self.precision

    def mul_vec(self, a: Sequence[int], b: Sequence[int], precision: int) -> Vector:
        return _vec_mul(a, b, self.reduction, self.n, self.p ** precision)

    def pow_vec(self, a: Sequence[int], e: int, precision: int) -> Vector:
        return _vec_pow(a, e, self.reduction, self.n, self.p ** precision)

    def inverse_vec(self, a: Sequence[int], precision: int) -> Vector:
        return _vec_inverse(a, self.modulus, self.reduction, self.n, self.p, precision)

    def frobenius_vec(self, a: Sequence[int], precision: int) -> Vector:
        mod = self.p ** precision
        return tuple(sum(row[i] * a[i] for i in range(self.n)) % mod
                     for row in self.frobenius_matrix)

    # -------------------------------------------------------------------------
    # Element-Konstruktoren
    # -------------------------------------------------------------------------

    def zero(self) -> 'ExtElement':
        return ExtElement(self, INFINITY, tuple([0] * self.n), self.precision)

    def one(self) -> 'ExtElement':
        return ExtElement(self, 0, tuple([1] + [0] * (self.n - 1)), self.precision)

    def uniformizer(self) -> 'ExtElement':
        return ExtElement(self, 1, tuple([1] + [0] * (self.n - 1)), self.precision)

    def scalar(self, value: Union[int, Fraction, PadicScalar]) -> 'ExtElement':
        """Embedding of Q_p."""
        if not isinstance(value, PadicScalar):
            value = PadicScalar.from_rational(self.p, value, self.precision)
        return ExtElement.from_scalar(self, value)

    def theta(self, j: int) -> 'ExtElement':
        """Canonical basis element theta_j (1-based, theta_n = 1)."""
        if not 1 <= j <= self.n:
            raise PreconditionError(f"basis index {j} outside 1..{self.n}")
        vec = [0] * self.n
        vec[j % self.n] = 1
        return ExtElement(self, 0, tuple(vec), self.precision)

    def element(self, coordinates: Sequence[Union[int, Fraction, PadicScalar]]) -> 'ExtElement':
        """Element from its coordinates (x_1, ..., x_n) in the canonical basis."""
        return ExtElement.from_coordinates(self, coordinates)

    def from_power_vector(self, vec: Sequence[int], valuation: int = 0,
                          absolute_precision: Optional[int] = None) -> 'ExtElement':
        """p^valuation * sum vec[i] t^i, known to the given absolute precision."""
        if absolute_precision is None:
            absolute_precision = valuation + self.precision
        return _normalize(self, valuation, list(vec), absolute_precision)

    def residue_classes(self) -> Iterator[Vector]:
        """All nonzero residue vectors of F_q in lexicographic order."""
        for vec in itertools.product(range(self.p), repeat=self.n):
            if any(vec):
                yield tuple(vec)

    def describe(self) -> dict:
        return {
            'p': self.p,
            'n': self.n,
            'q': self.q,
            'precision': self.precision,
            'modulus': list(self.modulus),
            'frobenius_image': list(self.frobenius_image),
        }


def construct_field(p: int, n: int, precision: int,
                    modulus: Optional[Sequence[int]] = None,
                    require_spherical: bool = True) -> FieldContext:
    """
    Builds the unramified extension of degree n.

    Args:
        p: Odd prime
        n: Degree
        precision: Working relative precision N
        modulus: Optional monic modulus, coefficients low -> high
        require_spherical: Enforce p ∤ n (needed by spherical coordinates)
    """
    validate_prime(p)
    if n < 1:
        raise DomainError(f"degree n = {n} must be positive")
    if precision < 1:
        raise DomainError(f"precision N = {precision} must be positive")
    if require_spherical and n % p == 0:
        raise DomainError(f"p = {p} divides n = {n}; spherical coordinates need p ∤ n")

    if modulus is None:
        modulus = smallest_irreducible(p, n)
    else:
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != n + 1 or modulus[-1] != 1:
            raise DomainError(f"modulus must be monic of degree {n}")
        if not is_irreducible_mod_p(modulus, p):
            raise DomainError(f"modulus {list(modulus)} is reducible mod {p}")

    table = _reduction_table(modulus)
    t = tuple([0, 1] + [0] * (n - 2)) if n > 1 else (-modulus[0],)
    root = _vec_pow(t, p, table, n, p)

    # Hensel lift of the root t^p of m to a root modulo p^N
    known = 1
    steps = 0
    while known < precision:
        known = min(2 * known, precision)
        mod = p ** known
        value = _evaluate_modulus(modulus, root, table, n, mod)
        slope = _derivative_at(modulus, root, table, n, mod)
        correction = _vec_mul(value, _vec_inverse(slope, modulus, table, n, p, known),
                              table, n, mod)
        root = tuple((r - c) % mod for r, c in zip(root, correction))
        steps += 1
    root = tuple(r % p ** precision for r in root)
    logger.debug(f"Frobenius image lifted in {steps} Hensel steps")

    if any(_evaluate_modulus(modulus, root, table, n, p ** precision)):
        raise InternalConsistencyError("Frobenius image is not a root of the modulus")
    if tuple(r % p for r in root) != _vec_pow(t, p, table, n, p):
        raise InternalConsistencyError("Frobenius image is not congruent to t^p")

    ctx = FieldContext(p, n, precision, tuple(modulus), root)
    logger.info(f"Unramified extension p={p} n={n} N={precision} modulus={list(modulus)}")
    return ctx


# =============================================================================
# EXTENSION ELEMENT
# =============================================================================

def _normalize(ctx: FieldContext, valuation, vec: List[int], absolute) -> 'ExtElement':
    """p^valuation * vec known modulo p^absolute, brought to unit form."""
    if absolute == INFINITY:
        absolute = valuation + ctx.precision
    span = absolute - valuation
    if span < 1:
        return ExtElement(ctx, INFINITY, tuple([0] * ctx.n), ctx.precision)
    mod = ctx.p ** span
    reduced = [c % mod for c in vec]
    k = _vec_valuation(reduced, ctx.p)
    if k == INFINITY:
        return ExtElement(ctx, INFINITY, tuple([0] * ctx.n), ctx.precision)
    v = valuation + k
    precision = min(absolute - v, ctx.precision)
    scale = ctx.p ** k
    return ExtElement(ctx, v, tuple((c // scale) % ctx.p ** precision for c in reduced),
                      precision)


@dataclass(frozen=True, eq=False)
class ExtElement:
    """Element p^valuation * unit of K; `unit` is a power-basis vector mod p^precision."""
    ctx: FieldContext = field(repr=False)
    valuation: Union[int, float]
    unit: Vector
    precision: int

    # -------------------------------------------------------------------------
    # Konstruktoren
    # -------------------------------------------------------------------------

    @classmethod
    def from_scalar(cls, ctx: FieldContext, value: PadicScalar) -> 'ExtElement':
        if value.prime != ctx.p:
            raise DomainError(f"scalar over p = {value.prime} in a field over p = {ctx.p}")
        if value.is_zero:
            return ctx.zero()
        precision = min(value.precision, ctx.precision)
        return cls(ctx, value.valuation,
                   tuple([value.mantissa % ctx.p ** precision] + [0] * (ctx.n - 1)),
                   precision)

    @classmethod
    def from_coordinates(cls, ctx: FieldContext,
                         coordinates: Sequence[Union[int, Fraction, PadicScalar]]) -> 'ExtElement':
        """Coordinates (x_1, ..., x_n) in the canonical basis, theta_n = 1 last."""
        if len(coordinates) != ctx.n:
            raise PreconditionError(f"expected {ctx.n} coordinates, got {len(coordinates)}")
        scalars = [c if isinstance(c, PadicScalar)
                   else PadicScalar.from_rational(ctx.p, c, ctx.precision)
                   for c in coordinates]
        # theta order (t, ..., t^(n-1), 1) -> power order (1, t, ..., t^(n-1))
        power = [scalars[-1]] + scalars[:-1]
        nonzero = [s for s in power if not s.is_zero]
        if not nonzero:
            return ctx.zero()
        v = min(s.valuation for s in nonzero)
        absolute = min(s.absolute_precision for s in nonzero)
        vec = [0 if s.is_zero else s.mantissa * ctx.p ** (s.valuation - v) for s in power]
        return _normalize(ctx, v, vec, absolute)

    @classmethod
    def from_rationals(cls, ctx: FieldContext, power_coordinates: Sequence[Fraction]) -> 'ExtElement':
        """Exact rational power-basis coordinates (used for ball centers)."""
        scalars = [PadicScalar.from_rational(ctx.p, c, ctx.precision) for c in power_coordinates]
        return cls.from_coordinates(ctx, scalars[1:] + scalars[:1])

    # -------------------------------------------------------------------------
    # Eigenschaften
    # -------------------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.valuation == INFINITY

    @property
    def absolute_precision(self):
        return INFINITY if self.is_zero else self.valuation + self.precision

    def is_unit(self) -> bool:
        return not self.is_zero and self.valuation == 0

    def residue(self) -> Vector:
        """Image in F_q = O/pO (requires x in O)."""
        if self.is_zero or self.valuation > 0:
            return tuple([0] * self.ctx.n)
        if self.valuation < 0:
            raise DomainError("residue of an element outside O")
        return tuple(c % self.ctx.p for c in self.unit)

    def unit_part(self) -> 'ExtElement':
        if self.is_zero:
            raise DomainError("zero has no unit part")
        return ExtElement(self.ctx, 0, self.unit, self.precision)

    def coefficients(self) -> List[PadicScalar]:
        """Coordinates (x_1, ..., x_n) in the canonical basis as PadicScalars."""
        p = self.ctx.p
        if self.is_zero:
            return [PadicScalar.zero(p, self.ctx.precision) for _ in range(self.ctx.n)]
        absolute = self.valuation + self.precision
        power = [PadicScalar.from_int(p, c, self.precision, absolute=True)
                 for c in self.unit]
        shifted = [s if s.is_zero else PadicScalar(p, s.valuation + self.valuation,
                                                   s.mantissa, absolute - s.valuation - self.valuation)
                   for s in power]
        return shifted[1:] + shifted[:1]

    def power_rationals(self) -> List[Fraction]:
        """Rational representatives of the power-basis coordinates."""
        if self.is_zero:
            return [Fraction(0)] * self.ctx.n
        scale = Fraction(self.ctx.p) ** self.valuation
        return [scale * c for c in self.unit]

    def shift(self, k: int) -> 'ExtElement':
        """Multiplication by p^k."""
        if self.is_zero:
            return self
        return ExtElement(self.ctx, self.valuation + k, self.unit, self.precision)

    # -------------------------------------------------------------------------
    # Arithmetik
    # -------------------------------------------------------------------------

    def _coerce(self, other) -> 'ExtElement':
        if isinstance(other, ExtElement):
            return other
        if isinstance(other, (int, Fraction, PadicScalar)):
            return self.ctx.scalar(other)
        return NotImplemented

    def __add__(self, other) -> 'ExtElement':
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        p = self.ctx.p
        v = min(self.valuation, other.valuation)
        absolute = min(self.absolute_precision, other.absolute_precision)
        a = p ** (self.valuation - v)
        b = p ** (other.valuation - v)
        vec = [x * a + y * b for x, y in zip(self.unit, other.unit)]
        return _normalize(self.ctx, v, vec, absolute)

    __radd__ = __add__

    def __neg__(self) -> 'ExtElement':
        if self.is_zero:
            return self
        mod = self.ctx.p ** self.precision
        return ExtElement(self.ctx, self.valuation, tuple((-c) % mod for c in self.unit),
                          self.precision)

    def __sub__(self, other) -> 'ExtElement':
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> 'ExtElement':
        return (-self) + other

    def __mul__(self, other) -> 'ExtElement':
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return self.ctx.zero()
        precision = min(self.precision, other.precision)
        return ExtElement(self.ctx, self.valuation + other.valuation,
                          self.ctx.mul_vec(self.unit, other.unit, precision), precision)

    __rmul__ = __mul__

    def inverse(self) -> 'ExtElement':
        if self.is_zero:
            raise PadicZeroDivisionError("inverse of zero")
        return ExtElement(self.ctx, -self.valuation,
                          self.ctx.inverse_vec(self.unit, self.precision), self.precision)

    def __truediv__(self, other) -> 'ExtElement':
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, exponent: int) -> 'ExtElement':
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        if self.is_zero:
            return self.ctx.one() if exponent == 0 else self
        return ExtElement(self.ctx, self.valuation * exponent,
                          self.ctx.pow_vec(self.unit, exponent, self.precision), self.precision)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, PadicScalar)):
            other = self._coerce(other)
        if not isinstance(other, ExtElement):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        if self.valuation != other.valuation:
            return False
        mod = self.ctx.p ** min(self.precision, other.precision)
        return all((a - b) % mod == 0 for a, b in zip(self.unit, other.unit))

    def __hash__(self) -> int:
        return hash((self.ctx.p, self.ctx.n, self.valuation))

    def __repr__(self) -> str:
        if self.is_zero:
            return "ExtElement(0)"
        return f"ExtElement(p^{self.valuation} * {list(self.unit)} + O(p^{self.absolute_precision}))"

    def key(self, level: int) -> Vector:
        """Unit vector modulo p^level (for units: coset key of 1 + p^level O)."""
        if not self.is_unit():
            raise DomainError("coset keys are defined for units")
        if level > self.precision:
            raise PrecisionError(f"key at level {level} needs {level} digits, have {self.precision}")
        mod = self.ctx.p ** level
        return tuple(c % mod for c in self.unit)


# =============================================================================
# FROBENIUS, NORM, ABSOLUTE VALUE
# =============================================================================

def frobenius(ctx: FieldContext, x: ExtElement) -> ExtElement:
    """Frobenius automorphism, determined by t -> frobenius_image."""
    if x.is_zero:
        return x
    return ExtElement(ctx, x.valuation, ctx.frobenius_vec(x.unit, x.precision), x.precision)


def frobenius_power(ctx: FieldContext, x: ExtElement, k: int) -> ExtElement:
    for _ in range(k % ctx.n):
        x = frobenius(ctx, x)
    return x


def norm(ctx: FieldContext, x: ExtElement) -> PadicScalar:
    """N(x) as the product of the Galois conjugates of x."""
    if x.is_zero:
        return PadicScalar.zero(ctx.p, ctx.precision)
    precision = x.precision
    product = x.unit
    conjugate = x.unit
    for _ in range(ctx.n - 1):
        conjugate = ctx.frobenius_vec(conjugate, precision)
        product = ctx.mul_vec(product, conjugate, precision)
    if any(product[1:]):
        raise InternalConsistencyError(f"conjugate product {product} is not in Q_p")
    return PadicScalar(ctx.p, ctx.n * x.valuation, product[0], precision)


def multiplication_matrix(ctx: FieldContext, x: ExtElement) -> List[List[int]]:
    """Integer matrix of L_x on the unit part, power basis."""
    mod = ctx.p ** x.precision
    columns = []
    basis = [tuple(1 if i == j else 0 for i in range(ctx.n)) for j in range(ctx.n)]
    for b in basis:
        columns.append(_vec_mul(x.unit, b, ctx.reduction, ctx.n, mod))
    return [[columns[j][i] for j in range(ctx.n)] for i in range(ctx.n)]


def norm_by_determinant(ctx: FieldContext, x: ExtElement) -> PadicScalar:
    """N(x) = det L_x by fraction-free (Bareiss) elimination over Z."""
    if x.is_zero:
        return PadicScalar.zero(ctx.p, ctx.precision)
    det = int(Matrix(multiplication_matrix(ctx, x)).det(method='bareiss'))
    unit = PadicScalar.from_int(ctx.p, det, x.precision, absolute=True)
    if unit.is_zero or unit.valuation != 0:
        raise InternalConsistencyError("determinant of a unit is not a unit")
    return PadicScalar(ctx.p, ctx.n * x.valuation, unit.mantissa, unit.precision)


def normalized_abs(ctx: FieldContext, x: ExtElement) -> Fraction:
    """||x|| = |N(x)|_p."""
    return norm(ctx, x).abs_value()


def coordinate_abs(ctx: FieldContext, x: ExtElement) -> Fraction:
    """||x|| = (max_j |x_j|_p)^n from the canonical coordinates."""
    if x.is_zero:
        return Fraction(0)
    return max(c.abs_value() for c in x.coefficients()) ** ctx.n


# =============================================================================
# TEICHMÜLLER REPRESENTATIVES AND DIGITS
# =============================================================================

@lru_cache(maxsize=None)
def _teichmuller_vec(ctx: FieldContext, residue: Vector) -> Vector:
    """(q-1)-th root of unity lifting a nonzero residue, modulo p^N."""
    y = residue
    for _ in range(ctx.precision):
        y = ctx.pow_vec(y, ctx.q, ctx.precision)
    return y


def teichmuller_residue(ctx: FieldContext, residue: Vector, precision: Optional[int] = None) -> ExtElement:
    precision = ctx.precision if precision is None else precision
    if not any(r % ctx.p for r in residue):
        return ctx.zero()
    vec = _teichmuller_vec(ctx, tuple(r % ctx.p for r in residue))
    mod = ctx.p ** precision
    return ExtElement(ctx, 0, tuple(c % mod for c in vec), precision)


def teichmuller_K(ctx: FieldContext, x: ExtElement) -> ExtElement:
    """omega(x): the root of unity congruent to the unit part of x."""
    if x.is_zero:
        raise DomainError("omega(0) is undefined")
    return teichmuller_residue(ctx, tuple(c % ctx.p for c in x.unit), x.precision)


def teichmuller_representatives(ctx: FieldContext) -> List[ExtElement]:
    """mu_{q-1}, one element per nonzero residue in lexicographic order."""
    return [teichmuller_residue(ctx, r) for r in ctx.residue_classes()]


@dataclass(frozen=True)
class TeichDigitsK:
    """x = p^valuation * omega * (1 + x_1 p + x_2 p^2 + ...)."""
    valuation: int
    omega: ExtElement
    tail: Tuple[ExtElement, ...]

    def recompose(self, ctx: FieldContext) -> ExtElement:
        return recompose_digits(ctx, self)


def digit_expansion_K(ctx: FieldContext, x: ExtElement) -> TeichDigitsK:
    """Canonical expansion with digits in mu_{q-1} ∪ {0}; N-1 tail digits."""
    if x.is_zero:
        raise DomainError("digit expansion of 0 is undefined")
    precision = x.precision
    omega = teichmuller_K(ctx, x)
    w = omega.inverse() * x.unit_part()
    y = tuple((c - (1 if j == 0 else 0)) % ctx.p ** precision for j, c in enumerate(w.unit))
    y = tuple(c // ctx.p for c in y)
    tail: List[ExtElement] = []
    for i in range(1, precision):
        remaining = precision - i
        residue = tuple(c % ctx.p for c in y)
        digit = teichmuller_residue(ctx, residue)
        tail.append(digit)
        dvec = digit.unit if not digit.is_zero else tuple([0] * ctx.n)
        mod = ctx.p ** remaining
        y = tuple(((c - d) % mod) // ctx.p for c, d in zip(y, dvec))
    return TeichDigitsK(x.valuation, omega, tuple(tail))


def recompose_digits(ctx: FieldContext, digits: TeichDigitsK) -> ExtElement:
    precision = len(digits.tail) + 1
    mod = ctx.p ** precision
    acc = [1] + [0] * (ctx.n - 1)
    for i, digit in enumerate(digits.tail, start=1):
        if not digit.is_zero:
            acc = [a + ctx.p ** i * d for a, d in zip(acc, digit.unit)]
    series = ExtElement(ctx, 0, tuple(a % mod for a in acc), precision)
    return (digits.omega * series).shift(digits.valuation)


def frobenius_by_digits(ctx: FieldContext, x: ExtElement) -> ExtElement:
    """Frobenius through its action omega -> omega^p on every digit."""
    if x.is_zero:
        return x
    digits = digit_expansion_K(ctx, x)
    moved = TeichDigitsK(digits.valuation, digits.omega ** ctx.p,
                         tuple(d if d.is_zero else d ** ctx.p for d in digits.tail))
    return recompose_digits(ctx, moved)


# =============================================================================
# LOGARITHM AND Z_p-POWERS ON PRINCIPAL UNITS
# =============================================================================

def is_principal_unit_K(ctx: FieldContext, x: ExtElement) -> bool:
    return x.is_unit() and x.residue() == tuple([1] + [0] * (ctx.n - 1))


def log_principal_K(ctx: FieldContext, x: ExtElement) -> Tuple[Vector, int]:
    """
    log(x) for a principal unit x of K.

    Returns:
        (vector, precision): power-basis vector of log(x) (an element of pO)
        known modulo p^precision
    """
    if not is_principal_unit_K(ctx, x):
        raise DomainError("log needs a principal unit of K")
    p, precision = ctx.p, x.precision
    z = tuple((c - (1 if j == 0 else 0)) % p ** precision for j, c in enumerate(x.unit))
    v = _vec_valuation(z, p)
    if v == INFINITY:
        return tuple([0] * ctx.n), precision
    terms = log_series_length(precision, v, p)
    guard = integer_log(terms, p)
    extended = p ** (precision + guard)
    modulus = p ** precision
    total = [0] * ctx.n
    power: Vector = tuple([1] + [0] * (ctx.n - 1))
    for i in range(1, terms):
        power = _vec_mul(power, z, ctx.reduction, ctx.n, extended)
        k = int_valuation(i, p)
        scale = pow(i // p ** k, -1, modulus)
        sign = 1 if i % 2 == 1 else -1
        total = [t + sign * (c // p ** k) * scale for t, c in zip(total, power)]
    return tuple(t % modulus for t in total), precision


def power_zp_K(ctx: FieldContext, z: ExtElement, beta: PadicScalar) -> ExtElement:
    """(1 + z)^beta in K through the Mahler series, ||z|| < 1."""
    if z.is_zero:
        return ctx.one()
    if z.valuation < 1:
        raise DomainError("(1+z)^beta needs ||z|| < 1")
    if not beta.is_zero and beta.valuation < 0:
        raise DomainError("exponent must lie in Z_p")
    p = ctx.p
    target = min(z.absolute_precision, beta.absolute_precision + z.valuation, z.precision)
    modulus = p ** target
    B = beta.lift_int()
    Z = tuple(c * p ** z.valuation % modulus for c in z.unit)
    terms = mahler_length(target, z.valuation, p)
    total = [1] + [0] * (ctx.n - 1)
    binom = 1
    power: Vector = tuple([1] + [0] * (ctx.n - 1))
    for i in range(1, terms):
        binom = binom * (B - i + 1) // i
        if binom == 0:
            break
        power = _vec_mul(power, Z, ctx.reduction, ctx.n, modulus)
        total = [(t + binom * c) % modulus for t, c in zip(total, power)]
    return ExtElement(ctx, 0, tuple(total), target)


# =============================================================================
# ZUFALLSELEMENTE
# =============================================================================

def _random_digits(ctx: FieldContext, rng: np.random.Generator, count: int) -> Vector:
    """Coefficient vector with `count` uniform base-p digits per coordinate."""
    digits = rng.integers(0, ctx.p, size=(count, ctx.n))
    return tuple(sum(int(digits[i, j]) * ctx.p ** i for i in range(count)) for j in range(ctx.n))


def random_unit(ctx: FieldContext, rng: np.random.Generator) -> ExtElement:
    """Haar-uniform unit of O modulo p^N."""
    index = int(rng.integers(1, ctx.q))
    residue = [(index // ctx.p ** j) % ctx.p for j in range(ctx.n)]
    if ctx.precision == 1:
        return ExtElement(ctx, 0, tuple(residue), 1)
    tail = _random_digits(ctx, rng, ctx.precision - 1)
    return ExtElement(ctx, 0, tuple(r + ctx.p * t for r, t in zip(residue, tail)),
                      ctx.precision)


def random_principal_unit(ctx: FieldContext, rng: np.random.Generator) -> ExtElement:
    if ctx.precision == 1:
        return ctx.one()
    tail = _random_digits(ctx, rng, ctx.precision - 1)
    vec = tuple((1 if j == 0 else 0) + ctx.p * t for j, t in enumerate(tail))
    return ExtElement(ctx, 0, vec, ctx.precision)


def random_element(ctx: FieldContext, rng: np.random.Generator,
                   valuations: Tuple[int, int] = (-2, 2)) -> ExtElement:
    """Random nonzero element with valuation drawn uniformly from a closed range."""
    v = int(rng.integers(valuations[0], valuations[1] + 1))
    return random_unit(ctx, rng).shift(v)


def enumerate_vectors(ctx: FieldContext, level: int) -> Iterable[Vector]:
    """All vectors modulo p^level."""
    return itertools.product(range(ctx.p ** level), repeat=ctx.n)
