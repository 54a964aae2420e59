import cmath
import math
from fractions import Fraction

import pytest

from padic_spherical.distributions import (HomogeneousDistribution, HomogeneousFunction,
                                           Quasicharacter, RadialTestFunction, angular_mass,
                                           continuation_terms, gauge_function,
                                           homogeneity_check_function, homogeneity_samples,
                                           is_exceptional, lemma2_decompose, pair, pair_direct,
                                           quasicharacter_eval, radial_character_sum,
                                           radial_character_sum_direct, radial_homogeneity_check,
                                           radial_pair, random_angular, random_radial_function,
                                           residue_at_exceptional, shell_character_integral,
                                           tensor_cylinder, theorem2_reconstruct, values_close)
from padic_spherical.errors import DomainError, PoleError, PreconditionError
from padic_spherical.haar import (CylinderFunction, FiniteLevelAngular, enumerate_units,
                                  integrate_K, random_cylinder_function)
from padic_spherical.padic import PadicScalar

EXCEPTIONAL = Quasicharacter(3, Fraction(-2))


def test_quasicharacter_values():
    pi = Quasicharacter(3, Fraction(1))
    assert pi(PadicScalar.power_of_p(3, 1, 8)) == Fraction(1, 3)
    assert Quasicharacter(3, 2)(PadicScalar.from_rational(3, Fraction(4, 9), 8)) == 81
    assert pi.exact
    with pytest.raises(DomainError):
        pi(PadicScalar.from_int(3, 2, 8))
    assert quasicharacter_eval(pi, PadicScalar.power_of_p(3, -2, 8)) == 9


def test_nontrivial_theta():
    pi = Quasicharacter(3, Fraction(0), level=1, exponent=1)
    assert not pi.theta_trivial
    assert pi.theta_resolution == 2
    assert not pi.exact
    assert pi.theta(1) == 1
    assert abs(pi.theta(4) - cmath.exp(2j * math.pi / 3)) < 1e-12
    assert Quasicharacter(3, Fraction(0), level=1, exponent=3).theta_trivial


def test_is_exceptional():
    assert is_exceptional(EXCEPTIONAL, 2)
    assert is_exceptional(Quasicharacter(3, complex(-2, 2 * math.pi / math.log(3))), 2)
    assert not is_exceptional(Quasicharacter(3, Fraction(-1)), 2)
    assert not is_exceptional(Quasicharacter(3, Fraction(-2), level=1, exponent=1), 2)


def test_radial_character_sum_closed_form():
    assert radial_character_sum(Quasicharacter(3, Fraction(0)), 2, 0) == Fraction(3, 8)
    assert radial_character_sum(Quasicharacter(3, Fraction(0), 1, 1), 2, 0) == 0
    with pytest.raises(PoleError):
        radial_character_sum(EXCEPTIONAL, 2, 0)


@pytest.mark.parametrize('nu', [0, 1, -2])
def test_radial_character_sum_matches_shells(nu):
    pi = Quasicharacter(3, Fraction(1, 2))
    closed = radial_character_sum(pi, 2, nu)
    direct = radial_character_sum_direct(pi, 2, nu)
    assert abs(closed - direct) < 1e-12 * abs(closed)


def test_shell_character_integral():
    assert shell_character_integral(Quasicharacter(3, Fraction(0))) == Fraction(1, 3)
    assert shell_character_integral(Quasicharacter(3, Fraction(0), 1, 1)) == 0
    assert shell_character_integral(Quasicharacter(5, Fraction(0), 2, 1)) == 0


def test_residue_at_exceptional(ctx32):
    h = HomogeneousDistribution(EXCEPTIONAL, FiniteLevelAngular.constant(ctx32, 1))
    phi = CylinderFunction.indicator(ctx32)
    report = residue_at_exceptional(ctx32, h, phi)
    assert report.stated == pytest.approx(1 / (9 * math.log(3)))
    assert report.normalization_factor == 8
    assert report.value == pytest.approx(8 / (9 * math.log(3)))
    with pytest.raises(PoleError) as excinfo:
        pair(ctx32, h, phi)
    assert excinfo.value.residue.value == pytest.approx(report.value)
    with pytest.raises(DomainError):
        residue_at_exceptional(ctx32, HomogeneousDistribution(Quasicharacter(3, 0), h.F), phi)


def test_exceptional_pairing_is_finite_when_phi_vanishes_at_zero(ctx32):
    h = HomogeneousDistribution(EXCEPTIONAL, FiniteLevelAngular.constant(ctx32, 1))
    value = pair(ctx32, h, CylinderFunction.units_indicator(ctx32))
    # |r|^-2 = ||x||^-1 = 1 on the units
    assert value == Fraction(8, 9)


def test_continuation_terms_of_units_indicator(ctx32):
    h = HomogeneousDistribution(EXCEPTIONAL, FiniteLevelAngular.constant(ctx32, 1))
    terms = continuation_terms(ctx32, h, CylinderFunction.units_indicator(ctx32))
    assert {j for j, c in terms.items() if c != 0} == {0}
    assert terms[0] == Fraction(1, 3)


def test_pairing_with_constant_function_is_haar_integral(ctx32, rng):
    h = HomogeneousDistribution(Quasicharacter(3, Fraction(0)), FiniteLevelAngular.constant(ctx32, 1))
    for _ in range(15):
        phi = random_cylinder_function(ctx32, rng, max_level=2)
        assert pair(ctx32, h, phi) == integrate_K(ctx32, phi)


def test_pairing_continuation_matches_direct_sum(ctx32, rng):
    for pi in (Quasicharacter(3, Fraction(1, 2)), Quasicharacter(3, Fraction(1, 2), 1, 1),
               Quasicharacter(3, complex(-1.5, 0.7))):
        F = random_angular(ctx32, rng, 1)
        h = HomogeneousDistribution(pi, F)
        for _ in range(4):
            phi = random_cylinder_function(ctx32, rng, max_level=2)
            continued = complex(pair(ctx32, h, phi))
            direct = pair_direct(ctx32, h, phi)
            assert abs(continued - direct) < 1e-9 * max(1.0, abs(direct))


def test_pairing_is_homogeneous(ctx32, rng):
    pi = Quasicharacter(3, Fraction(1))
    h = HomogeneousDistribution(pi, random_angular(ctx32, rng, 2))
    for _ in range(5):
        phi = random_cylinder_function(ctx32, rng, max_level=2)
        # <f, phi(x / 3)> = pi(3) ||3|| <f, phi>
        scaled = pair(ctx32, h, phi.dilate(Fraction(1, 3)))
        assert scaled == Fraction(1, 3) * Fraction(1, 9) * pair(ctx32, h, phi)


def test_homogeneous_function_check(ctx32, rng):
    pi = Quasicharacter(3, Fraction(1))
    f = HomogeneousFunction(ctx32, pi, random_angular(ctx32, rng, 1))
    report = homogeneity_check_function(ctx32, f, pi, homogeneity_samples(ctx32, rng, 10))
    assert report.passed
    assert report.checked == 10
    report = homogeneity_check_function(ctx32, lambda x: Fraction(1), pi,
                                        homogeneity_samples(ctx32, rng, 5))
    assert not report.passed
    assert report.witness['kind'] == 'scaling'


def test_angular_mass(ctx32):
    assert angular_mass(FiniteLevelAngular.constant(ctx32, 2, Fraction(3))) == 3


def test_gauge_normalization(ctx32):
    for pi in (Quasicharacter(3, Fraction(1)), Quasicharacter(3, Fraction(0), 1, 1)):
        value = radial_pair(3, 2, pi, gauge_function(ctx32, pi))
        assert values_close(value, Fraction(3, 8), 1e-12)


def test_radial_homogeneity_check(rng):
    pi = Quasicharacter(3, Fraction(1))
    functions = [random_radial_function(3, rng) for _ in range(6)]
    report = radial_homogeneity_check(3, 2, pi, lambda phi: 3 * radial_pair(3, 2, pi, phi), functions)
    assert report.passed
    assert report.constant == 3

    shells = [RadialTestFunction.from_balls(3, [(Fraction(1), 1, Fraction(1))]),
              RadialTestFunction.from_balls(3, [(Fraction(3), 2, Fraction(1))])]
    other = Quasicharacter(3, Fraction(2))
    report = radial_homogeneity_check(3, 2, pi, lambda phi: radial_pair(3, 2, other, phi), shells)
    assert not report.passed
    assert report.witness == 1


def test_tensor_cylinder_requires_vanishing_at_zero(ctx32):
    phi = RadialTestFunction.from_balls(3, [(Fraction(0), 1, Fraction(1))])
    with pytest.raises(PreconditionError):
        tensor_cylinder(ctx32, phi, FiniteLevelAngular.constant(ctx32, 1))


def test_tensor_cylinder_values(ctx32):
    phi = RadialTestFunction.from_balls(3, [(Fraction(1), 1, Fraction(2))])
    psi = FiniteLevelAngular.constant(ctx32, 1, Fraction(5))
    f = tensor_cylinder(ctx32, phi, psi)
    assert f(ctx32.one()) == 10
    assert f(ctx32.scalar(2)) == 10
    assert f(ctx32.uniformizer()) == 0
    assert integrate_K(ctx32, f) == 10 * Fraction(8, 9)


def test_lemma2_decompose_reproduces_phi(ctx32, rng):
    units = enumerate_units(ctx32, 2)
    for _ in range(5):
        phi = random_cylinder_function(ctx32, rng, max_level=2)
        decomposition = lemma2_decompose(ctx32, phi)
        assert decomposition.l == -phi.level
        assert decomposition.phi_zero == phi.at_zero()
        assert decomposition.evaluate(ctx32, ctx32.zero()) == phi.at_zero()
        for j in (0, 1):
            for u in units:
                x = u.shift(j)
                assert decomposition.evaluate(ctx32, x) == phi(x)


def test_lemma2_decompose_zero_function(ctx32):
    decomposition = lemma2_decompose(ctx32, CylinderFunction.zero(ctx32))
    assert decomposition.slices == ()
    assert decomposition.phi_zero == 0


@pytest.mark.parametrize('level', [1, 2])
def test_theorem2_reconstruct_roundtrip(ctx32, rng, level):
    pi = Quasicharacter(3, Fraction(1))
    F = random_angular(ctx32, rng, level)
    oracle = HomogeneousDistribution(pi, F)
    battery = [random_cylinder_function(ctx32, rng, max_level=2) for _ in range(3)]
    recovered = theorem2_reconstruct(ctx32, oracle, pi, level, battery)
    assert recovered.table == F.table


def test_theorem2_reconstruct_rejects(ctx32, rng):
    F = FiniteLevelAngular.constant(ctx32, 1)
    with pytest.raises(DomainError):
        theorem2_reconstruct(ctx32, HomogeneousDistribution(EXCEPTIONAL, F), EXCEPTIONAL, 1)

    h0 = HomogeneousDistribution(Quasicharacter(3, Fraction(0)), F)
    h1 = HomogeneousDistribution(Quasicharacter(3, Fraction(1)), F)
    with pytest.raises(PreconditionError, match="not homogeneous"):
        theorem2_reconstruct(ctx32, lambda phi: h0(phi) + h1(phi), h0.pi, 1)
