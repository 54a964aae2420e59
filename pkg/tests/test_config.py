import pytest

from padic_spherical.config import RunConfig, SimulationConfig, parse_shells
from padic_spherical.errors import DomainError, PreconditionError

ENV = ('PADIC_P', 'PADIC_N', 'PADIC_PRECISION', 'PADIC_MODULUS', 'PADIC_SEED',
       'PADIC_THREADS', 'PADIC_FORMAT')


@pytest.fixture
def clean_env(monkeypatch):
    for name in ENV:
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


def test_defaults():
    config = RunConfig()
    assert (config.p, config.n, config.precision, config.seed) == (3, 2, 8, 1)
    assert config.simulation.shells == '-3..3'
    config.validate()


def test_from_env(clean_env):
    clean_env.setenv('PADIC_P', '5')
    clean_env.setenv('PADIC_N', '3')
    clean_env.setenv('PADIC_MODULUS', '3,3,0,1')
    clean_env.setenv('PADIC_FORMAT', 'json')
    config = RunConfig.from_env()
    assert config.p == 5
    assert config.n == 3
    assert config.modulus == [3, 3, 0, 1]
    assert config.format == 'json'
    assert config.precision == 8


def test_from_env_defaults(clean_env):
    config = RunConfig.from_env()
    assert config.modulus is None
    assert config.threads == 4


def test_save_and_load(tmp_path):
    config = RunConfig(p=5, seed=42, simulation=SimulationConfig(alpha=0.5, paths=100))
    path = tmp_path / 'run.json'
    config.save(str(path))
    loaded = RunConfig.load(str(path))
    assert loaded == config
    assert loaded.simulation.alpha == 0.5


@pytest.mark.parametrize('changes, error', [
    ({'p': 2}, DomainError),
    ({'p': 3, 'n': 3}, DomainError),
    ({'precision': 0}, PreconditionError),
    ({'threads': 0}, PreconditionError),
    ({'format': 'xml'}, PreconditionError),
])
def test_validate_rejects(changes, error):
    config = RunConfig(**changes)
    with pytest.raises(error):
        config.validate()


def test_validate_without_spherical_requirement():
    RunConfig(p=3, n=3).validate(spherical=False)


def test_simulation_validation():
    with pytest.raises(PreconditionError):
        SimulationConfig(k_min=2, k_max=-2).validate()
    with pytest.raises(PreconditionError):
        SimulationConfig(T=0).validate()


def test_parse_shells():
    assert parse_shells('-3..3') == (-3, 3)
    assert parse_shells('0..0') == (0, 0)
    with pytest.raises(PreconditionError):
        parse_shells('3')
