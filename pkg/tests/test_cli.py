import json

import pytest

from padic_spherical.cli import (EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, _attach_signed_values,
                                 build_parser, format_text, run)

ENV = ('PADIC_P', 'PADIC_N', 'PADIC_PRECISION', 'PADIC_MODULUS', 'PADIC_SEED',
       'PADIC_THREADS', 'PADIC_FORMAT')


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ENV:
        monkeypatch.delenv(name, raising=False)


def _run_json(tmp_path, *argv):
    out = tmp_path / 'out.json'
    code = run([*argv, '--format', 'json', '--output', str(out), '-q'])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_field_info(tmp_path):
    code, data = _run_json(tmp_path, 'field-info', '--p', '5', '--n', '2', '--precision', '6')
    assert code == EXIT_OK
    assert data['field']['modulus'] == [2, 0, 1]
    assert data['field']['spherical'] is True
    assert data['provenance']['N'] == 6


def test_field_info_without_spherical_structure(tmp_path):
    code, data = _run_json(tmp_path, 'field-info', '--p', '3', '--n', '3', '--precision', '4')
    assert code == EXIT_OK
    assert data['field']['spherical'] is False


def test_p_equal_two_is_a_domain_error(capsys):
    assert run(['field-info', '--p', '2', '--n', '3', '-q']) == EXIT_DOMAIN
    assert 'p = 2 excluded' in capsys.readouterr().err


def test_decompose_uniformizer(tmp_path):
    code, data = _run_json(tmp_path, 'decompose', '--p', '3', '--n', '2', '--precision', '8',
                           '--seed', '1', '--x', '0,3')
    assert code == EXIT_OK
    r = data['coordinates']['r']
    assert (r['valuation'], r['mantissa']) == (1, '1')
    omega = data['coordinates']['omega']
    assert omega[0]['valuation'] == 'inf'
    assert (omega[1]['valuation'], omega[1]['mantissa']) == (0, '1')
    assert all(data['checks'].values())
    assert data['provenance'] == {'p': 3, 'n': 2, 'N': 8, 'modulus': [1, 0, 1], 'seed': 1,
                                  'version': '1.0.0'}


def test_decompose_output_is_byte_identical(tmp_path):
    first = tmp_path / 'a.json'
    second = tmp_path / 'b.json'
    for out in (first, second):
        assert run(['decompose', '--x', '1/3,2', '--format', 'json', '-o', str(out), '-q']) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_decompose_zero_maps_to_r_zero(tmp_path):
    code, data = _run_json(tmp_path, 'decompose', '--p', '3', '--n', '2', '--x', '[0, 0]')
    assert code == EXIT_OK
    assert data['coordinates'] == {'r': 0, 'omega': None, 'xi': None}
    assert data['checks'] == {'x_is_zero': True}
    assert all(c['valuation'] == 'inf' for c in data['x'])


def test_decompose_accepts_json_coordinates(tmp_path):
    code, data = _run_json(tmp_path, 'decompose', '--p', '3', '--n', '2', '--precision', '8',
                           '--x', '[0, 3]')
    assert code == EXIT_OK
    r = data['coordinates']['r']
    assert (r['valuation'], r['mantissa']) == (1, '1')
    code, other = _run_json(tmp_path, 'decompose', '--x', '["1/3", 2]')
    assert code == EXIT_OK
    assert all(other['checks'].values())
    assert run(['decompose', '--x', '{"a": 1}', '-q']) == EXIT_USAGE


def test_usage_errors():
    assert run(['decompose', '-q']) == EXIT_USAGE
    assert run(['no-such-command']) == EXIT_USAGE
    assert run(['decompose', '--x', '1,2,3', '-q']) == EXIT_USAGE
    assert run(['verify', '--suites', 'nonsense', '-q']) == EXIT_USAGE


def test_integrate_random(tmp_path):
    code, data = _run_json(tmp_path, 'integrate', '--random', '--seed', '4', '--spherical')
    assert code == EXIT_OK
    assert data['passed'] is True
    assert data['difference'] == '0'
    assert data['integral'] == data['spherical']


def test_integrate_without_spherical_side(tmp_path):
    code, data = _run_json(tmp_path, 'integrate', '--random', '--seed', '4')
    assert code == EXIT_OK
    assert 'spherical' not in data
    assert 'difference' not in data


def test_integrate_function_file(tmp_path):
    function = tmp_path / 'f.json'
    function.write_text(json.dumps({'terms': [{'center': ['1', '0'], 'k': 1, 'value': '3'}]}))
    code, data = _run_json(tmp_path, 'integrate', '--p', '3', '--n', '2', '--function', str(function),
                           '--spherical', '--multiplicative')
    assert code == EXIT_OK
    assert data['integral'] == '1/3'
    assert data['difference'] == data['multiplicative_difference'] == '0'
    assert data['multiplicative'] == data['multiplicative_spherical'] == '1/3'


def test_pair_at_the_pole_reports_the_residue(tmp_path):
    function = tmp_path / 'phi.json'
    function.write_text(json.dumps({'terms': [{'center': ['0', '0'], 'k': 0, 'value': '1'}]}))
    code, data = _run_json(tmp_path, 'pair', '--function', str(function), '--s', '-2')
    assert code == EXIT_OK
    assert data['pole'] is True
    assert data['exceptional'] is True
    assert data['residue']['normalization_factor'] == 8


def test_pair_value_and_direct_sum(tmp_path):
    function = tmp_path / 'phi.json'
    function.write_text(json.dumps({'terms': [{'center': ['0', '0'], 'k': 0, 'value': '1'}]}))
    code, data = _run_json(tmp_path, 'pair', '--function', str(function), '--s', '0', '--direct')
    assert code == EXIT_OK
    assert data['pole'] is False
    assert data['value'] == '1'
    assert data['direct'][0] == pytest.approx(1.0)


def test_pair_with_named_inputs(tmp_path):
    phi = tmp_path / 'phi.json'
    phi.write_text(json.dumps({'terms': [{'center': ['0', '0'], 'k': 0, 'value': '1'}]}))
    F = tmp_path / 'F.json'
    F.write_text(json.dumps({'level': 1, 'constant': '1'}))
    code, data = _run_json(tmp_path, 'pair', '--p', '3', '--n', '2', '--s', '-1.5', '--theta', 'trivial',
                           '--F', str(F), '--phi', str(phi), '--direct')
    assert code == EXIT_OK
    assert data['pole'] is False
    assert data['quasicharacter'] == {'s': '-3/2', 'theta': {'level': 0, 'exponent': 0}}
    # p^(1-n) (q-1) p^(-1) / (1 - p^(-s-n)) for the indicator of O
    expected = (8 / 9) / (1 - 3 ** -0.5)
    assert data['value'][0] == pytest.approx(expected)
    assert data['value'][1] == pytest.approx(0.0, abs=1e-12)
    assert data['direct'][0] == pytest.approx(expected, rel=1e-9)


def test_pair_with_nontrivial_theta(tmp_path):
    phi = tmp_path / 'phi.json'
    phi.write_text(json.dumps({'terms': [{'center': ['0', '0'], 'k': 0, 'value': '1'}]}))
    code, data = _run_json(tmp_path, 'pair', '--phi', str(phi), '--s', '1',
                           '--theta', '{"level": 1, "exponent": 1}')
    assert code == EXIT_OK
    assert data['quasicharacter']['theta'] == {'level': 1, 'exponent': 1}
    assert data['value'] == '0'
    assert run(['pair', '--phi', str(phi), '--theta', '[1, 1]', '-q']) == EXIT_USAGE


def test_verify_subset(tmp_path):
    code, data = _run_json(tmp_path, 'verify', '--suites', 'volumes,radial_sums', '--threads', '1')
    assert code == EXIT_OK
    assert data['passed'] is True
    assert [s['name'] for s in data['suites']] == ['volumes', 'radial_sums']


def test_config_file(tmp_path):
    config = tmp_path / 'run.json'
    config.write_text(json.dumps({'p': 5, 'n': 2, 'precision': 5}))
    code, data = _run_json(tmp_path, 'field-info', '--config', str(config))
    assert code == EXIT_OK
    assert data['provenance']['p'] == 5


def test_text_format():
    lines = format_text({'b': [1, {'c': 2}], 'a': 'x'})
    assert lines == ['a: x', 'b:', '  - 1', '  -', '    c: 2']


def test_parser_has_all_subcommands():
    parser = build_parser()
    for command in ('field-info', 'decompose', 'integrate', 'pair', 'simulate', 'verify'):
        assert parser.parse_args([command] + (['--x', '0,1'] if command == 'decompose' else [])
                                 + (['--random'] if command == 'integrate' else [])
                                 + (['--function', 'f.json'] if command == 'pair' else [])).command == command


def test_signed_values_are_attached_to_their_flag():
    argv = ['simulate', '--shells', '-3..3', '--s', '-1/2', '--paths', '10']
    assert _attach_signed_values(argv) == ['simulate', '--shells=-3..3', '--s=-1/2', '--paths', '10']
    args = build_parser().parse_args(_attach_signed_values(['simulate', '--shells', '-3..3']))
    assert args.shells == '-3..3'
    args = build_parser().parse_args(_attach_signed_values(['pair', '--function', 'f.json', '--s', '-1/2']))
    assert args.s == '-1/2'
