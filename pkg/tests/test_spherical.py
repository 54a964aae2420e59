from fractions import Fraction

import pytest

from padic_spherical.errors import DomainError, PreconditionError
from padic_spherical.field import (construct_field, norm, normalized_abs, random_element,
                                   random_principal_unit, teichmuller_representatives)
from padic_spherical.padic import PadicScalar, is_positive
from padic_spherical.spherical import (SphericalCoords, canonical_exponents, check_coordinates,
                                       compose, decompose, decompose_via_exponents, eta,
                                       principal_unit_coords, principal_unit_from_coords, radial,
                                       recompose_canonical, sigma_membership, special_basis,
                                       xi_as_quotient)


def test_decompose_uniformizer(ctx32):
    c = decompose(ctx32, ctx32.element([0, 3]))
    assert c.omega == ctx32.one()
    assert c.xi == ctx32.one()
    assert c.r == PadicScalar.power_of_p(3, 1, 8)


def test_decompose_rational_scalars(ctx32):
    # 2 = (-1) * 1 * (-2) with -2 in 1 + 3Z_3
    c = decompose(ctx32, ctx32.scalar(2))
    assert c.omega == ctx32.scalar(-1)
    assert c.xi == ctx32.one()
    assert c.r == -2
    c = decompose(ctx32, ctx32.scalar(Fraction(4, 9)))
    assert c.omega == ctx32.one()
    assert c.r == PadicScalar.from_rational(3, Fraction(4, 9), 8)


def test_decompose_zero(ctx32):
    with pytest.raises(DomainError):
        decompose(ctx32, ctx32.zero())
    assert radial(ctx32, ctx32.zero()).is_zero


def test_decompose_requires_p_not_dividing_n():
    ctx = construct_field(3, 3, 5, require_spherical=False)
    with pytest.raises(DomainError, match="divides"):
        decompose(ctx, ctx.one())


@pytest.mark.parametrize('name', ['ctx32', 'ctx52', 'ctx53'])
def test_memberships_and_roundtrip(name, request, rng):
    ctx = request.getfixturevalue(name)
    for _ in range(25):
        x = random_element(ctx, rng)
        c = decompose(ctx, x)
        assert all(check_coordinates(ctx, x, c).values())
        assert compose(ctx, c) == x
        assert normalized_abs(ctx, x) == c.r.abs_value() ** ctx.n


def test_multiplicativity(ctx32, ctx53, rng):
    for ctx in (ctx32, ctx53):
        for _ in range(15):
            x = random_element(ctx, rng)
            y = random_element(ctx, rng)
            product = decompose(ctx, x) * decompose(ctx, y)
            direct = decompose(ctx, x * y)
            assert direct.omega == product.omega
            assert direct.xi == product.xi
            assert direct.r == product.r


def test_eta_is_angular_part(ctx32, rng):
    x = random_element(ctx32, rng)
    omega, xi = eta(ctx32, x)
    c = decompose(ctx32, x)
    assert (omega, xi) == (c.omega, c.xi)


def test_compose_checks_memberships(ctx32):
    one = ctx32.one()
    p = PadicScalar.power_of_p(3, 1, 8)
    with pytest.raises(PreconditionError, match="root of unity"):
        compose(ctx32, SphericalCoords(ctx32.scalar(4), one, p))
    with pytest.raises(PreconditionError, match="Sigma"):
        compose(ctx32, SphericalCoords(one, ctx32.scalar(4), p))
    with pytest.raises(PreconditionError, match="Q_p"):
        compose(ctx32, SphericalCoords(one, one, PadicScalar.from_int(3, 2, 8)))


def test_sigma_membership(ctx32, rng):
    assert sigma_membership(ctx32, ctx32.one())
    assert not sigma_membership(ctx32, ctx32.scalar(4))
    assert not sigma_membership(ctx32, ctx32.uniformizer())
    for _ in range(10):
        xi = decompose(ctx32, random_element(ctx32, rng)).xi
        assert sigma_membership(ctx32, xi)
        assert norm(ctx32, xi) == 1


def test_special_generators_lie_in_sigma(ctx32, ctx53):
    for ctx in (ctx32, ctx53):
        generators = special_basis(ctx).generators(ctx)
        assert len(generators) == ctx.n
        for g in generators[:-1]:
            assert sigma_membership(ctx, g)
        assert is_positive(norm(ctx, generators[-1]))


def test_principal_unit_coords_roundtrip(ctx32, ctx53, rng):
    for ctx in (ctx32, ctx53):
        for _ in range(5):
            u = random_principal_unit(ctx, rng)
            b = principal_unit_coords(ctx, u)
            assert len(b) == ctx.n
            assert principal_unit_from_coords(ctx, b) == u
    with pytest.raises(DomainError):
        principal_unit_coords(ctx32, ctx32.scalar(2))


def test_canonical_exponents_recompose(ctx32, ctx52, rng):
    for ctx in (ctx32, ctx52):
        for _ in range(5):
            x = random_element(ctx, rng)
            e = canonical_exponents(ctx, x)
            assert e.valuation == x.valuation
            assert recompose_canonical(ctx, e) == x


def test_decompose_via_exponents_agrees(ctx32, ctx53, rng):
    for ctx in (ctx32, ctx53):
        for _ in range(10):
            x = random_element(ctx, rng)
            a = decompose(ctx, x)
            b = decompose_via_exponents(ctx, x)
            assert a.omega == b.omega
            assert a.xi == b.xi
            assert a.r == b.r


def test_xi_as_quotient_length(ctx32):
    with pytest.raises(PreconditionError):
        xi_as_quotient(ctx32, [])


def _nontrivial_sigma_element(ctx, rng):
    while True:
        xi = decompose(ctx, random_principal_unit(ctx, rng)).xi
        if xi != ctx.one():
            return xi


@pytest.mark.parametrize('name', ['ctx32', 'ctx53'])
def test_decomposition_is_unique(name, request, rng):
    ctx = request.getfixturevalue(name)
    one_plus_p = ctx.one() + ctx.uniformizer()
    roots = [z for z in teichmuller_representatives(ctx) if z != ctx.one()]
    sigma = _nontrivial_sigma_element(ctx, rng)
    for _ in range(5):
        x = random_element(ctx, rng)
        c = decompose(ctx, x)
        for zeta in roots[:3]:
            # moving a root of unity from xi to omega leaves Sigma_n
            with pytest.raises(PreconditionError, match="Sigma"):
                compose(ctx, SphericalCoords(c.omega * zeta, c.xi * zeta.inverse(), c.r))
            assert compose(ctx, SphericalCoords(c.omega * zeta, c.xi, c.r)) != x
        assert compose(ctx, SphericalCoords(c.omega, c.xi, c.r * (1 + ctx.p))) != x
        # trading a positive scalar between xi and r breaks N(xi) = 1
        with pytest.raises(PreconditionError, match="Sigma"):
            compose(ctx, SphericalCoords(c.omega, c.xi / one_plus_p, c.r * (1 + ctx.p)))
        assert compose(ctx, SphericalCoords(c.omega, c.xi * sigma, c.r)) != x
        assert compose(ctx, SphericalCoords(c.omega, c.xi * sigma, c.r)) == x * sigma
