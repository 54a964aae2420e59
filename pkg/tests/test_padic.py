from fractions import Fraction

import pytest

from padic_spherical.errors import DomainError, PadicZeroDivisionError
from padic_spherical.padic import (PadicScalar, exp_principal, is_positive, log_principal,
                                   nth_root_principal, pow_zp_exponent, teichmuller_digits_qp,
                                   teichmuller_lift, validate_prime)

P = 3
N = 8


def scalar(a, precision=N):
    return PadicScalar.from_rational(P, a, precision)


def test_validate_prime():
    validate_prime(3)
    validate_prime(101)
    with pytest.raises(DomainError, match="p = 2 excluded"):
        validate_prime(2)
    for bad in (1, 9, 15):
        with pytest.raises(DomainError):
            validate_prime(bad)


def test_field_operations_on_rationals():
    a, b = scalar(Fraction(7, 2)), scalar(Fraction(-5, 9))
    assert a + b == scalar(Fraction(7, 2) - Fraction(5, 9))
    assert a * b == scalar(Fraction(-35, 18))
    assert a / b == scalar(Fraction(7, 2) / Fraction(-5, 9))
    assert -a == scalar(Fraction(-7, 2))
    assert (a * a.inverse()) == 1


def test_valuation_and_abs():
    x = scalar(Fraction(18, 5))
    assert x.valuation == 2
    assert x.abs_value() == Fraction(1, 9)
    assert scalar(Fraction(1, 27)).valuation == -3


def test_cancellation_loses_relative_precision():
    a = scalar(1 + 3 ** 4)
    b = scalar(1)
    d = a - b
    assert d.valuation == 4
    assert d.precision == N - 4


def test_inverse_of_zero():
    with pytest.raises(PadicZeroDivisionError):
        PadicScalar.zero(P, N).inverse()


def test_teichmuller_lift_is_root_of_unity():
    for residue in (1, 2):
        w = teichmuller_lift(P, residue, N)
        assert pow(w, P - 1, P ** N) == 1
        assert w % P == residue


def test_teichmuller_digits_recompose():
    for value in (Fraction(5), Fraction(-17, 4), Fraction(2, 27), Fraction(123456)):
        x = scalar(value)
        digits = teichmuller_digits_qp(x)
        assert digits.valuation == x.valuation
        assert all(pow(d, P, P ** N) == d for d in digits.digits)
        assert digits.recompose() == x


def test_is_positive():
    assert is_positive(scalar(4))
    assert is_positive(scalar(Fraction(3 * 7)))
    assert not is_positive(scalar(2))
    with pytest.raises(DomainError):
        is_positive(PadicScalar.zero(P, N))


def test_pow_zp_exponent_integer_exponent():
    z = scalar(3)
    assert pow_zp_exponent(z, scalar(2)) == 16
    assert pow_zp_exponent(z, scalar(5)) == 4 ** 5


def test_pow_zp_exponent_rejects_units():
    with pytest.raises(DomainError):
        pow_zp_exponent(scalar(2), scalar(2))


def test_nth_root_principal():
    assert nth_root_principal(scalar(16), 2) == 4
    root = nth_root_principal(scalar(7), 2)
    assert root * root == 7
    assert root.mantissa % P == 1


def test_nth_root_preconditions():
    with pytest.raises(DomainError):
        nth_root_principal(scalar(16), 3)
    with pytest.raises(DomainError):
        nth_root_principal(scalar(2), 2)


def test_exp_log_inverse():
    for a in (1, 4, 7, 13):
        u = scalar(1 + 3 * a)
        assert exp_principal(log_principal(u)) == u


def test_log_is_a_homomorphism():
    u, v = scalar(4), scalar(10)
    assert log_principal(u * v) == log_principal(u) + log_principal(v)


def _random_rational(rng):
    numerator = int(rng.integers(-10 ** 6, 10 ** 6)) or 1
    return Fraction(numerator, int(rng.integers(1, 1000)))


def test_field_laws_on_random_samples(rng):
    for _ in range(50):
        a, b, c = (scalar(_random_rational(rng)) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a + b == b + a
        assert a * b == b * a
        if not (b + c).is_zero:
            assert a * (b + c) == a * b + a * c
        assert a * a.inverse() == 1
        assert a.abs_value() * a.inverse().abs_value() == 1
        assert (a * b).abs_value() == a.abs_value() * b.abs_value()


def test_integer_arithmetic_matches_modular_arithmetic(rng):
    modulus = P ** N
    for _ in range(50):
        a, b = (int(rng.integers(1, 10 ** 6)) for _ in range(2))
        x, y = scalar(a), scalar(b)
        assert (x + y).lift_int() % modulus == (a + b) % modulus
        assert (x * y).lift_int() % modulus == a * b % modulus
        assert (x - y) == scalar(a - b)


@pytest.mark.parametrize('betas', [
    (Fraction(1, 2), Fraction(-3, 7)),
    (Fraction(2, 5), Fraction(9, 4)),
    (Fraction(-1), Fraction(1, 8)),
])
def test_pow_zp_exponent_is_additive_in_the_exponent(betas):
    b1, b2 = (scalar(b) for b in betas)
    for z in (scalar(3), scalar(Fraction(6, 5)), scalar(-18)):
        assert pow_zp_exponent(z, b1) * pow_zp_exponent(z, b2) == pow_zp_exponent(z, b1 + b2)


def test_pow_zp_exponent_additive_for_random_exponents(rng):
    for _ in range(20):
        z = scalar(3 * (int(rng.integers(1, 10 ** 4))))
        b1, b2 = scalar(_random_rational(rng)), scalar(_random_rational(rng))
        if b1.valuation < 0 or b2.valuation < 0:
            continue
        assert pow_zp_exponent(z, b1) * pow_zp_exponent(z, b2) == pow_zp_exponent(z, b1 + b2)


def test_pow_zp_exponent_fractional_exponents_invert():
    z = scalar(3)
    half = scalar(Fraction(1, 2))
    root = pow_zp_exponent(z, half)
    assert root.is_principal_unit()
    assert root * root == 4
    assert pow_zp_exponent(root - 1, half.inverse()) == 1 + z
    assert root == nth_root_principal(scalar(4), 2)


@pytest.mark.parametrize('p,n', [(3, 2), (3, 4), (5, 2), (5, 3)])
def test_nth_root_is_a_bijection_modulo_p_cubed(p, n):
    precision = 3
    modulus = p ** precision
    units = [1 + p * j for j in range(p ** 2)]
    roots = set()
    for u in units:
        root = nth_root_principal(PadicScalar(p, 0, u, precision), n)
        assert root.mantissa % p == 1
        assert pow(root.mantissa, n, modulus) == u
        roots.add(root.mantissa)
    assert len(roots) == p ** 2


def test_nth_root_powers_back_on_random_principal_units(rng):
    for _ in range(100):
        u = PadicScalar(P, 0, 1 + P * int(rng.integers(0, P ** (N - 1))), N)
        n = int(rng.choice([2, 4, 5, 7, 8]))
        root = nth_root_principal(u, n)
        assert root.is_principal_unit()
        assert root ** n == u


def test_teichmuller_digits_for_p5():
    p = 5
    minus_one = PadicScalar.from_int(p, -1, N)
    d = teichmuller_digits_qp(minus_one).digits[0]
    assert d % p == 4
    assert pow(d, p - 1, p ** N) == 1
    assert d == p ** N - 1
    two = PadicScalar.from_int(p, 2, N)
    digits = teichmuller_digits_qp(two)
    assert digits.digits[0] % p == 2
    assert pow(digits.digits[0], p - 1, p ** N) == 1
    assert digits.recompose() == two


def test_is_positive_for_p5():
    p = 5
    assert is_positive(PadicScalar.from_int(p, 5, N))
    assert is_positive(PadicScalar.from_int(p, 6, N))
    assert is_positive(PadicScalar.from_rational(p, Fraction(11, 25), N))
    assert not is_positive(PadicScalar.from_int(p, -1, N))
    assert not is_positive(PadicScalar.from_int(p, 2, N))
