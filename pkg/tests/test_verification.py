import pytest

from padic_spherical.config import SimulationConfig
from padic_spherical.errors import PreconditionError
from padic_spherical.verification import (SUITES, run_suites, suite_coordinates, suite_radial_law,
                                          suite_reconstruction, suite_residue, suite_slices)


def test_cheap_suites_pass(ctx32):
    report = run_suites(ctx32, seed=1, names=('constant', 'volumes', 'radial_sums'))
    assert report.passed, report.failures
    assert [s.name for s in report.suites] == ['normalization_constant', 'volumes', 'radial_sums']


def test_sized_suites_pass(ctx32):
    sizes = {'integration': 10, 'coordinates': 40, 'residue': 2, 'reconstruction': 1, 'slices': 2}
    report = run_suites(ctx32, seed=3, threads=2,
                        names=('integration', 'coordinates', 'residue', 'reconstruction', 'slices'),
                        sizes=sizes)
    assert report.passed, report.failures
    assert report.to_dict()['failures'] == []


def test_unknown_suite(ctx32):
    with pytest.raises(PreconditionError):
        run_suites(ctx32, seed=1, names=('volumes', 'bogus'))


def test_suite_list():
    assert SUITES[-1] == 'radial_law'
    assert len(SUITES) == len(set(SUITES))


def test_suite_results_are_seeded(ctx32, rng_factory):
    a = suite_coordinates(ctx32, rng_factory(1, 3), count=6)
    b = suite_coordinates(ctx32, rng_factory(1, 3), count=6)
    assert [c.detail for c in a.checks] == [c.detail for c in b.checks]


def test_individual_suites(ctx52, rng_factory):
    assert suite_residue(ctx52, rng_factory(2), count=1).passed
    assert suite_reconstruction(ctx52, rng_factory(3), count=1, level=1).passed
    assert suite_slices(ctx52, rng_factory(4), count=1, level=2).passed


@pytest.mark.slow
def test_radial_law_suite(ctx32):
    simulation = SimulationConfig(alpha=1.0, k_min=-2, k_max=2, paths=2000, T=1.0, total_rate=2.0)
    report = suite_radial_law(ctx32, simulation, seed=1, threads=4)
    assert report.passed, [c.detail for c in report.checks if not c.passed]
    assert [c.name for c in report.checks] == ['omega_rotation', 'xi_rotation', 'negative_control']


def test_residue_suite_reports_its_normalization(ctx32, ctx52, rng_factory):
    for ctx, factor in ((ctx32, 8), (ctx52, 24)):
        report = suite_residue(ctx, rng_factory(6), count=2)
        assert report.passed
        detail = report.checks[0].detail
        assert detail['normalization_factor'] == factor
        assert detail['pairs'] == 2
