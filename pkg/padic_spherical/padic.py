"""
p-adic Scalar Module
Arithmetik in Q_p mit beschränkter Präzision.

An element is stored as p^v * u where u is a unit known modulo p^N
(N = relative precision). Zero carries the valuation sentinel +inf.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Tuple, Union

from sympy import isprime

from .errors import DomainError, PadicZeroDivisionError, PrecisionError

logger = logging.getLogger('PadicSpherical.Core')

INFINITY = math.inf

Number = Union[int, Fraction]


# =============================================================================
# INTEGER HELPERS
# =============================================================================

def int_valuation(a: int, p: int) -> int:
    """v_p(a) for a nonzero integer a."""
    if a == 0:
        raise DomainError("valuation of 0 is infinite")
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def digit_sum(i: int, p: int) -> int:
    """Sum of the base-p digits of i."""
    s = 0
    while i:
        s += i % p
        i //= p
    return s


def integer_log(i: int, p: int) -> int:
    """floor(log_p(i)) for i >= 1."""
    k = 0
    while i >= p:
        i //= p
        k += 1
    return k


def validate_prime(p: int) -> None:
    """Raises DomainError unless p is an odd prime."""
    if p == 2:
        raise DomainError("p = 2 excluded: the construction requires an odd prime")
    if not isinstance(p, int) or p < 3 or not isprime(p):
        raise DomainError(f"p = {p} is not an odd prime")


def mahler_length(precision: int, valuation: int, p: int) -> int:
    """
    Number of Mahler (or exponential) series terms needed modulo p^precision.

    Returns the smallest I such that every term i >= I satisfies
    i*v - (i - s_p(i))/(p-1) >= precision, i.e. z^i/i! vanishes mod p^precision.
    """
    if valuation < 1:
        raise DomainError("series needs an argument of positive valuation")

    def enough(i: int) -> bool:
        return i * valuation * (p - 1) - (i - digit_sum(i, p)) >= precision * (p - 1)

    # i*v - (i-1)/(p-1) is increasing and bounds the exact expression from below
    upper = 1
    while upper * valuation * (p - 1) - (upper - 1) < precision * (p - 1):
        upper += 1
    index = upper
    while index > 1 and enough(index - 1):
        index -= 1
    return index


def log_series_length(precision: int, valuation: int, p: int) -> int:
    """Smallest I such that x^i/i vanishes mod p^precision for all i >= I."""
    i = 1
    while i * valuation - integer_log(i, p) < precision:
        i += 1
    return i


# =============================================================================
# TEICHMÜLLER LIFTS IN Z_p
# =============================================================================

@lru_cache(maxsize=4096)
def teichmuller_lift(p: int, residue: int, precision: int) -> int:
    """
    Teichmüller representative of a nonzero residue modulo p^precision.

    Iterates u -> u^p; after k steps the value is stable modulo p^(k+1).
    """
    residue %= p
    if residue == 0:
        return 0
    modulus = p ** precision
    y = residue
    for _ in range(precision):
        y = pow(y, p, modulus)
    return y


# =============================================================================
# PADIC SCALAR
# =============================================================================

@dataclass(frozen=True, eq=False)
class PadicScalar:
    """
    Element p^valuation * mantissa of Q_p.

    The mantissa is coprime to p and known modulo p^precision. Zero has
    valuation INFINITY and mantissa 0.
    """
    prime: int
    valuation: Union[int, float]
    mantissa: int
    precision: int

    def __post_init__(self):
        if self.valuation == INFINITY:
            object.__setattr__(self, 'mantissa', 0)
            return
        if self.precision < 1:
            raise PrecisionError(
                f"value known to {self.precision} digits; at least one digit required")
        if self.mantissa % self.prime == 0:
            raise ValueError(f"mantissa {self.mantissa} is divisible by p = {self.prime}")
        object.__setattr__(self, 'mantissa', self.mantissa % self.prime ** self.precision)

    # -------------------------------------------------------------------------
    # Konstruktoren
    # -------------------------------------------------------------------------

    @classmethod
    def zero(cls, p: int, precision: int) -> 'PadicScalar':
        return cls(p, INFINITY, 0, precision)

    @classmethod
    def from_int(cls, p: int, a: int, precision: int,
                 absolute: bool = False) -> 'PadicScalar':
        """
        Embeds an integer.

        Args:
            p: Prime
            a: Integer value
            precision: Relative precision, or absolute precision if absolute=True
            absolute: Interpret precision as "a is known modulo p^precision"
        """
        if absolute:
            a %= p ** precision
            if a == 0:
                return cls.zero(p, precision)
            v = int_valuation(a, p)
            return cls(p, v, a // p ** v, precision - v)
        if a == 0:
            return cls.zero(p, precision)
        v = int_valuation(a, p)
        return cls(p, v, a // p ** v, precision)

    @classmethod
    def from_rational(cls, p: int, value: Number, precision: int) -> 'PadicScalar':
        """Embeds a rational number with relative precision `precision`."""
        value = Fraction(value)
        if value == 0:
            return cls.zero(p, precision)
        num, den = value.numerator, value.denominator
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        modulus = p ** precision
        return cls(p, v, num * pow(den, -1, modulus) % modulus, precision)

    @classmethod
    def power_of_p(cls, p: int, k: int, precision: int) -> 'PadicScalar':
        return cls(p, k, 1, precision)

    # -------------------------------------------------------------------------
    # Eigenschaften
    # -------------------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.valuation == INFINITY

    @property
    def absolute_precision(self) -> Union[int, float]:
        if self.is_zero:
            return INFINITY
        return self.valuation + self.precision

    def abs_value(self) -> Fraction:
        """|x|_p = p^(-v) as an exact rational."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.prime) ** (-self.valuation)

    def unit_part(self) -> 'PadicScalar':
        if self.is_zero:
            raise DomainError("zero has no unit part")
        return PadicScalar(self.prime, 0, self.mantissa, self.precision)

    def is_principal_unit(self) -> bool:
        return not self.is_zero and self.valuation == 0 and self.mantissa % self.prime == 1

    def lift_int(self) -> int:
        """Nonnegative integer representative; requires valuation >= 0."""
        if self.is_zero:
            return 0
        if self.valuation < 0:
            raise DomainError(f"{self} is not in Z_p")
        return self.mantissa * self.prime ** self.valuation

    def to_fraction(self) -> Fraction:
        """Rational representative p^v * mantissa."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.mantissa) * Fraction(self.prime) ** self.valuation

    def with_precision(self, precision: int) -> 'PadicScalar':
        """Truncates (never extends) the relative precision."""
        if self.is_zero:
            return PadicScalar.zero(self.prime, precision)
        return PadicScalar(self.prime, self.valuation, self.mantissa,
                           min(precision, self.precision))

    # -------------------------------------------------------------------------
    # Arithmetik
    # -------------------------------------------------------------------------

    def _coerce(self, other) -> 'PadicScalar':
        if isinstance(other, PadicScalar):
            if other.prime != self.prime:
                raise DomainError(f"mixed primes {self.prime} and {other.prime}")
            return other
        if isinstance(other, (int, Fraction)):
            return PadicScalar.from_rational(self.prime, other, self.precision)
        return NotImplemented

    def __add__(self, other) -> 'PadicScalar':
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        p = self.prime
        v = min(self.valuation, other.valuation)
        absolute = min(self.absolute_precision, other.absolute_precision)
        modulus = p ** (absolute - v)
        total = (self.mantissa * p ** (self.valuation - v)
                 + other.mantissa * p ** (other.valuation - v)) % modulus
        if total == 0:
            return PadicScalar.zero(p, max(self.precision, other.precision))
        k = int_valuation(total, p)
        return PadicScalar(p, v + k, total // p ** k, absolute - v - k)

    __radd__ = __add__

    def __neg__(self) -> 'PadicScalar':
        if self.is_zero:
            return self
        return PadicScalar(self.prime, self.valuation, -self.mantissa, self.precision)

    def __sub__(self, other) -> 'PadicScalar':
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> 'PadicScalar':
        return (-self) + other

    def __mul__(self, other) -> 'PadicScalar':
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return PadicScalar.zero(self.prime, max(self.precision, other.precision))
        precision = min(self.precision, other.precision)
        return PadicScalar(self.prime, self.valuation + other.valuation,
                           self.mantissa * other.mantissa, precision)

    __rmul__ = __mul__

    def inverse(self) -> 'PadicScalar':
        if self.is_zero:
            raise PadicZeroDivisionError("inverse of zero")
        modulus = self.prime ** self.precision
        return PadicScalar(self.prime, -self.valuation,
                           pow(self.mantissa, -1, modulus), self.precision)

    def __truediv__(self, other) -> 'PadicScalar':
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> 'PadicScalar':
        return self._coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> 'PadicScalar':
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        if self.is_zero:
            if exponent == 0:
                return PadicScalar(self.prime, 0, 1, self.precision)
            return self
        modulus = self.prime ** self.precision
        return PadicScalar(self.prime, self.valuation * exponent,
                           pow(self.mantissa, exponent, modulus), self.precision)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, PadicScalar):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        if self.valuation != other.valuation:
            return False
        modulus = self.prime ** min(self.precision, other.precision)
        return (self.mantissa - other.mantissa) % modulus == 0

    def __hash__(self) -> int:
        return hash((self.prime, self.valuation))

    def __repr__(self) -> str:
        if self.is_zero:
            return f"PadicScalar(0, p={self.prime})"
        return (f"PadicScalar(p^{self.valuation} * {self.mantissa} "
                f"+ O(p^{self.absolute_precision}), p={self.prime})")


# =============================================================================
# RING OPERATIONS
# =============================================================================

def add(a: PadicScalar, b: PadicScalar) -> PadicScalar:
    return a + b


def mul(a: PadicScalar, b: PadicScalar) -> PadicScalar:
    return a * b


def neg(a: PadicScalar) -> PadicScalar:
    return -a


def inv(a: PadicScalar) -> PadicScalar:
    return a.inverse()


@dataclass(frozen=True)
class TeichmullerDigitsQp:
    """x = p^valuation * sum(digits[i] * p^i), digits in mu_{p-1} ∪ {0}."""
    prime: int
    valuation: int
    digits: Tuple[int, ...] = field(default_factory=tuple)

    def recompose(self) -> PadicScalar:
        p = self.prime
        precision = len(self.digits)
        total = sum(d * p ** i for i, d in enumerate(self.digits)) % p ** precision
        return PadicScalar(p, self.valuation, total, precision)


def teichmuller_digits_qp(x: PadicScalar) -> TeichmullerDigitsQp:
    """Teichmüller digit expansion of a nonzero element of Q_p."""
    if x.is_zero:
        raise DomainError("Teichmüller digits of 0 are undefined")
    p, precision = x.prime, x.precision
    digits: List[int] = []
    y = x.mantissa
    for i in range(precision):
        residue = y % p
        d = teichmuller_lift(p, residue, precision)
        digits.append(d)
        remaining = p ** (precision - i)
        y = ((y - d) % remaining) // p
    return TeichmullerDigitsQp(p, x.valuation, tuple(digits))


def is_positive(x: PadicScalar) -> bool:
    """Membership in Q_p^(1) = p^Z * U_1(Q_p)."""
    if x.is_zero:
        raise DomainError("positivity of 0 is undefined")
    return x.mantissa % x.prime == 1


def pow_zp_exponent(z: PadicScalar, beta: PadicScalar) -> PadicScalar:
    """
    (1 + z)^beta through the Mahler series sum C(beta, i) z^i.

    Args:
        z: Element with |z|_p < 1
        beta: Exponent in Z_p
    """
    p = z.prime
    if not z.is_zero and z.valuation < 1:
        raise DomainError("(1+z)^beta needs |z|_p < 1")
    if not beta.is_zero and beta.valuation < 0:
        raise DomainError("exponent must lie in Z_p")
    if z.is_zero:
        return PadicScalar(p, 0, 1, z.precision)
    target = min(z.absolute_precision, beta.absolute_precision + z.valuation, z.precision)
    modulus = p ** target
    B = beta.lift_int()
    Z = z.mantissa * p ** z.valuation
    terms = mahler_length(target, z.valuation, p)
    total, binom, power = 1, 1, 1
    for i in range(1, terms):
        binom = binom * (B - i + 1) // i
        power = power * Z % modulus
        total = (total + binom * power) % modulus
    logger.debug(f"Mahler series: {terms} terms at precision {target}")
    return PadicScalar.from_int(p, total, target, absolute=True)


def nth_root_principal(zeta: PadicScalar, n: int) -> PadicScalar:
    """Unique principal unit y with y^n = zeta (Hensel-Newton from y = 1)."""
    p = zeta.prime
    if n < 1:
        raise DomainError(f"root index n = {n} must be positive")
    if n % p == 0:
        raise DomainError(f"p = {p} divides n = {n}; the n-th root needs p ∤ n")
    if not zeta.is_principal_unit():
        raise DomainError(f"{zeta} is not a principal unit")
    precision = zeta.precision
    modulus = p ** precision
    target = zeta.mantissa
    y = 1
    for step in range(precision.bit_length() + 2):
        residual = (pow(y, n, modulus) - target) % modulus
        if residual == 0:
            logger.debug(f"n-th root converged after {step} Newton steps")
            break
        derivative = n * pow(y, n - 1, modulus) % modulus
        y = (y - residual * pow(derivative, -1, modulus)) % modulus
    return PadicScalar(p, 0, y, precision)


def log_precision_loss(p: int, valuation: int, terms: int) -> int:
    """Digits lost to the division by i in the logarithm series (0 for odd p)."""
    loss = 0
    for i in range(1, terms):
        loss = max(loss, int_valuation(i, p) - (i - 1) * valuation)
    return loss


def log_principal(u: PadicScalar) -> PadicScalar:
    """p-adic logarithm of a principal unit."""
    if not u.is_principal_unit():
        raise DomainError(f"log needs a principal unit, got {u}")
    p, precision = u.prime, u.precision
    x = (u.mantissa - 1) % p ** precision
    if x == 0:
        return PadicScalar.zero(p, precision)
    v = int_valuation(x, p)
    terms = log_series_length(precision, v, p)
    guard = integer_log(terms, p)
    extended = p ** (precision + guard)
    modulus = p ** precision
    total, power = 0, 1
    for i in range(1, terms):
        power = power * x % extended
        k = int_valuation(i, p)
        term = (power // p ** k) * pow(i // p ** k, -1, modulus)
        total = total + term if i % 2 == 1 else total - term
    loss = log_precision_loss(p, v, terms)
    if precision - loss <= v:
        raise PrecisionError("logarithm lost all digits to the division by i")
    return PadicScalar.from_int(p, total, precision - loss, absolute=True)


def exp_principal(z: PadicScalar) -> PadicScalar:
    """p-adic exponential on pZ_p."""
    p = z.prime
    if z.is_zero:
        return PadicScalar(p, 0, 1, z.precision)
    if z.valuation < 1:
        raise DomainError("exp needs |z|_p < 1")
    target = min(z.absolute_precision, z.precision)
    terms = mahler_length(target, z.valuation, p)
    guard = (terms - 1) // (p - 1)
    extended = p ** (target + guard)
    modulus = p ** target
    Z = z.mantissa * p ** z.valuation
    total, power, factorial = 1, 1, 1
    for i in range(1, terms):
        power = power * Z % extended
        factorial *= i
        k = int_valuation(factorial, p)
        total = (total + (power // p ** k) * pow(factorial // p ** k, -1, modulus)) % modulus
    return PadicScalar.from_int(p, total, target, absolute=True)


def log_ratio(u: PadicScalar, base: PadicScalar) -> PadicScalar:
    """b in Z_p with u = base^b, both principal units, log(base) of valuation 1."""
    return log_principal(u) / log_principal(base)
