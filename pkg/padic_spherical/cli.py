"""
Command Line Interface
Einheitlicher Einstiegspunkt: field-info, decompose, integrate, pair, simulate, verify.

Usage:
    python -m padic_spherical verify --p 3 --n 2 --precision 8 --seed 1
    python -m padic_spherical decompose --p 3 --n 2 --x "[0, 3]" --format json
    python -m padic_spherical integrate --function f.json --spherical
    python -m padic_spherical pair --s "-1.5" --theta trivial --F F.json --phi phi.json
    python -m padic_spherical simulate --alpha 1.0 --shells -3..3 --paths 100000 --T 1.0 --report report.json

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 domain error.
"""

import argparse
import json
import logging
import re
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from . import __version__
from .config import RunConfig, parse_shells
from .distributions import (HomogeneousDistribution, is_exceptional, pair,
                            pair_direct, residue_at_exceptional)
from .errors import (DomainError, InternalConsistencyError, PadicError, PoleError,
                     PrecisionError, PreconditionError)
from .field import FieldContext, construct_field, teichmuller_residue
from .haar import (FiniteLevelAngular, integrate_K, integrate_multiplicative,
                   random_cylinder_function, sigma_index, spherical_integrate)
from .levy import (LevyModel, angular_increment_sample, compare_increment_tables,
                   markov_diagnostic, radial_kernel_check_eq21, simulate_paths,
                   single_jump_increment_sample, sphere_uniformity)
from .serialization import (angular_from_dict, coords_to_dict, cylinder_from_dict,
                            cylinder_to_dict, dumps, element_from_dict, element_to_dict,
                            provenance, quasicharacter_from_dict, value_to_json)
from .spherical import check_coordinates, decompose, special_basis
from .stats import contingency_test
from .verification import SUITES, run_suites

logger = logging.getLogger('PadicSpherical.CLI')

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3

SIGNED_VALUE_FLAGS = ('--shells', '--s', '--x', '--alpha')


# =============================================================================
# PARSER
# =============================================================================

def _common_arguments() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--p', type=int, help='odd prime (env PADIC_P)')
    common.add_argument('--n', type=int, help='extension degree (env PADIC_N)')
    common.add_argument('--precision', '-N', type=int, help='working precision N (env PADIC_PRECISION)')
    common.add_argument('--modulus', help='monic modulus, comma separated, low -> high')
    common.add_argument('--seed', type=int, help='master seed (env PADIC_SEED)')
    common.add_argument('--threads', type=int, help='worker threads (env PADIC_THREADS)')
    common.add_argument('--format', choices=['text', 'json'], help='output format (env PADIC_FORMAT)')
    common.add_argument('--output', '-o', help='write output to this file')
    common.add_argument('--config', help='RunConfig JSON file (replaces the environment)')
    common.add_argument('--verbose', '-v', action='count', default=0)
    common.add_argument('--quiet', '-q', action='store_true')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_arguments()
    parser = argparse.ArgumentParser(prog='padic_spherical',
                                     description='Spherical coordinates on unramified p-adic extensions')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('field-info', parents=[common], help='construct K and describe it')

    p_dec = sub.add_parser('decompose', parents=[common], help='spherical coordinates of x')
    p_dec.add_argument('--x', required=True,
                       help='canonical coordinates x_1..x_n (theta_n = 1 last): JSON array '
                            'of rationals or scalar records, or comma separated rationals')

    p_int = sub.add_parser('integrate', parents=[common], help='Haar integral of a cylinder function')
    source = p_int.add_mutually_exclusive_group(required=True)
    source.add_argument('--function', help='CylinderFunction JSON file')
    source.add_argument('--random', action='store_true', help='seeded random cylinder function')
    p_int.add_argument('--spherical', action='store_true',
                       help='also evaluate the spherical side and print the difference')
    p_int.add_argument('--multiplicative', action='store_true',
                       help='also integrate f(x) dx/||x|| (f must vanish near 0)')

    p_pair = sub.add_parser('pair', parents=[common], help='pair pi(r)F with a test function')
    p_pair.add_argument('--phi', '--function', dest='phi', required=True,
                        help='CylinderFunction JSON file')
    p_pair.add_argument('--s', help='exponent s: rational "1/2" or complex "0.5+1.3j" (default 0)')
    p_pair.add_argument('--theta', help='"trivial" or a Quasicharacter JSON object')
    p_pair.add_argument('--theta-level', type=int, default=0)
    p_pair.add_argument('--theta-exponent', type=int, default=0)
    p_pair.add_argument('--F', '--angular', dest='angular',
                        help='FiniteLevelAngular JSON file (default: constant 1)')
    p_pair.add_argument('--direct', action='store_true', help='compare with the shell-by-shell sum')

    p_sim = sub.add_parser('simulate', parents=[common], help='Levy process diagnostics')
    p_sim.add_argument('--alpha', type=float)
    p_sim.add_argument('--shells', help='shell range such as -3..3')
    p_sim.add_argument('--paths', type=int)
    p_sim.add_argument('--T', type=float)
    p_sim.add_argument('--rate', type=float, help='total jump rate')
    p_sim.add_argument('--report', help='write the full JSON report here')

    p_ver = sub.add_parser('verify', parents=[common], help='run the oracle suites')
    p_ver.add_argument('--suites', help=f"comma separated subset of {','.join(SUITES)}")
    p_ver.add_argument('--paths', type=int, help='paths per start in the radial law suite')
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults < environment (.env) or --config file < command line flags."""
    config = RunConfig.load(args.config) if args.config else RunConfig.from_env()
    for name in ('p', 'n', 'precision', 'seed', 'threads', 'format', 'output'):
        value = getattr(args, name, None)
        if value is not None:
            setattr(config, name, value)
    if args.modulus:
        config.modulus = [int(c) for c in args.modulus.split(',')]
    sim = config.simulation
    if getattr(args, 'alpha', None) is not None:
        sim.alpha = args.alpha
    if getattr(args, 'shells', None):
        sim.k_min, sim.k_max = parse_shells(args.shells)
    if getattr(args, 'paths', None) is not None:
        sim.paths = args.paths
    if getattr(args, 'T', None) is not None:
        sim.T = args.T
    if getattr(args, 'rate', None) is not None:
        sim.total_rate = args.rate
    return config


def _parse_s(text: str) -> Union[Fraction, complex]:
    if 'j' in text:
        return complex(text.replace(' ', ''))
    return Fraction(text)


def _load_json(path: str) -> Any:
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)


def _parse_x(text: str) -> List[Any]:
    """JSON array (rationals or scalar records) or the comma form '1/3,2'."""
    text = text.strip()
    if text.startswith('['):
        data = json.loads(text)
        if not isinstance(data, list):
            raise PreconditionError("--x must be a JSON array of coordinates")
        return data
    return [Fraction(c) for c in text.split(',')]


def _parse_theta(text: str, level: int, exponent: int) -> Dict[str, Any]:
    """'trivial', {"level": 1, "exponent": 1} or a full Quasicharacter record."""
    if text is None:
        return {'theta': {'level': level, 'exponent': exponent}}
    if text.strip() == 'trivial':
        return {'theta': {'level': 0, 'exponent': 0}}
    data = json.loads(text)
    if not isinstance(data, dict):
        raise PreconditionError(f"--theta must be 'trivial' or a JSON object, got {text!r}")
    return data if 'theta' in data or 's' in data else {'theta': data}


# =============================================================================
# SUBCOMMANDS
# =============================================================================

def cmd_field_info(ctx: FieldContext, config: RunConfig, args) -> Dict[str, Any]:
    info = ctx.describe()
    info['spherical'] = ctx.n % ctx.p != 0
    if info['spherical']:
        info['special_basis'] = [element_to_dict(e) for e in special_basis(ctx).epsilons]
        info['sigma_index_level2'] = sigma_index(ctx, 2) if ctx.precision >= 2 else None
    return {'field': info}


def cmd_decompose(ctx: FieldContext, config: RunConfig, args) -> Dict[str, Any]:
    x = element_from_dict(ctx, _parse_x(args.x))
    if x.is_zero:
        # r(0) = 0, the angular part is undefined
        return {
            'x': element_to_dict(x),
            'coordinates': {'r': 0, 'omega': None, 'xi': None},
            'checks': {'x_is_zero': True},
        }
    coords = decompose(ctx, x)
    return {
        'x': element_to_dict(x),
        'coordinates': coords_to_dict(ctx, coords),
        'checks': check_coordinates(ctx, x, coords),
    }


def cmd_integrate(ctx: FieldContext, config: RunConfig, args) -> Dict[str, Any]:
    if args.random:
        f = random_cylinder_function(ctx, np.random.default_rng(config.seed))
    else:
        f = cylinder_from_dict(ctx, _load_json(args.function))
    additive = integrate_K(ctx, f)
    result: Dict[str, Any] = {
        'function': cylinder_to_dict(f),
        'integral': value_to_json(additive),
    }
    differences = []
    if args.spherical:
        spherical = spherical_integrate(ctx, f)
        result['spherical'] = value_to_json(spherical)
        result['difference'] = value_to_json(additive - spherical)
        differences.append(additive - spherical)
    if args.multiplicative:
        multiplicative = integrate_multiplicative(ctx, f)
        result['multiplicative'] = value_to_json(multiplicative)
        if args.spherical:
            other = integrate_multiplicative(ctx, f, spherical=True)
            result['multiplicative_spherical'] = value_to_json(other)
            result['multiplicative_difference'] = value_to_json(multiplicative - other)
            differences.append(multiplicative - other)
    if differences:
        result['passed'] = all(d == 0 for d in differences)
    return result


def cmd_pair(ctx: FieldContext, config: RunConfig, args) -> Dict[str, Any]:
    phi = cylinder_from_dict(ctx, _load_json(args.phi))
    record = _parse_theta(args.theta, args.theta_level, args.theta_exponent)
    if args.s is not None:
        record = dict(record, s=args.s)
    if isinstance(record.get('s'), str):
        s = _parse_s(record['s'])
        record['s'] = [s.real, s.imag] if isinstance(s, complex) else str(s)
    pi = quasicharacter_from_dict(ctx.p, record)
    F = (angular_from_dict(ctx, _load_json(args.angular)) if args.angular
         else FiniteLevelAngular.constant(ctx, 1))
    h = HomogeneousDistribution(pi, F)
    result: Dict[str, Any] = {'quasicharacter': pi.to_dict(), 'exceptional': is_exceptional(pi, ctx.n)}
    try:
        result['value'] = value_to_json(pair(ctx, h, phi))
        result['pole'] = False
    except PoleError as e:
        result['pole'] = True
        result['residue'] = (e.residue or residue_at_exceptional(ctx, h, phi)).to_dict()
    if args.direct and not result['pole']:
        result['direct'] = value_to_json(pair_direct(ctx, h, phi))
    return result


def cmd_simulate(ctx: FieldContext, config: RunConfig, args) -> Dict[str, Any]:
    sim = config.simulation
    model = LevyModel(sim.alpha, sim.k_min, sim.k_max, sim.total_rate)
    seed, threads = config.seed, config.threads
    x0 = ctx.one()
    residue = tuple([0, 1] + [0] * (ctx.n - 2)) if ctx.n > 1 else (2 % ctx.p,)
    omega0 = teichmuller_residue(ctx, residue)
    rng = np.random.default_rng([seed, 7])

    radial_law = radial_kernel_check_eq21(model, ctx, x0, omega0 * x0, sim.T, sim.paths, seed, threads)
    paths = simulate_paths(model, ctx, x0, sim.T, seed, sim.paths, threads, stream=2)
    times = (sim.T / 3, 2 * sim.T / 3, sim.T)
    markov = markov_diagnostic(model, ctx, paths, times)

    increments = angular_increment_sample(model, ctx, paths, (0.0, sim.T))
    rotated_paths = simulate_paths(model, ctx, omega0 * x0, sim.T, seed, sim.paths, threads, stream=3)
    rotated = angular_increment_sample(model, ctx, rotated_paths, (0.0, sim.T))
    single = single_jump_increment_sample(model, ctx, x0, max(1000, sim.paths // 10), seed)
    one_jump = contingency_test([increments.counts(interval=0, jumps=1), single],
                                'one-jump increments vs single uniform jump')
    zero_jump = increments.counts(interval=0, jumps=0)

    report = {
        'model': model.to_dict(),
        'paths': sim.paths,
        'T': sim.T,
        'radial_law': radial_law.to_dict(),
        'markov': markov.to_dict(),
        'sphere_uniformity': [r.to_dict() for r in sphere_uniformity(ctx, sim.k_min, 10000, rng)],
        'left_invariance': compare_increment_tables(increments, rotated).to_dict(),
        'one_jump': one_jump.to_dict(),
        'zero_jump_identity': len(zero_jump) <= 1,
        'increments': increments.to_dict(),
        'discarded_paths': increments.discarded,
    }
    report['passed'] = bool(radial_law.passed and markov.passed and report['left_invariance']['passed']
                            and one_jump.passed and report['zero_jump_identity'])
    return report


def cmd_verify(ctx: FieldContext, config: RunConfig, args) -> Dict[str, Any]:
    names = args.suites.split(',') if args.suites else SUITES
    sizes = {'radial_law': args.paths} if args.paths else None
    report = run_suites(ctx, config.seed, config.simulation, config.threads, names, sizes)
    return report.to_dict()


COMMANDS = {
    'field-info': cmd_field_info,
    'decompose': cmd_decompose,
    'integrate': cmd_integrate,
    'pair': cmd_pair,
    'simulate': cmd_simulate,
    'verify': cmd_verify,
}


# =============================================================================
# OUTPUT
# =============================================================================

def format_text(payload: Any, indent: int = 0) -> List[str]:
    pad = '  ' * indent
    lines: List[str] = []
    if isinstance(payload, dict):
        for key in sorted(payload):
            value = payload[key]
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{pad}{key}:")
                lines.extend(format_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {value}")
    elif isinstance(payload, list):
        for item in payload:
            if isinstance(item, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(format_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {item}")
    else:
        lines.append(f"{pad}{payload}")
    return lines


def _emit(payload: Dict[str, Any], config: RunConfig) -> None:
    text = dumps(payload) if config.format == 'json' else '\n'.join(format_text(json.loads(dumps(payload))))
    if config.output:
        with open(config.output, 'w', encoding='utf-8') as f:
            f.write(text + '\n')
        logger.info(f"Output written to {config.output}")
    else:
        sys.stdout.write(text + '\n')


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.WARNING
    if args.quiet:
        level = logging.ERROR
    elif args.verbose == 1:
        level = logging.INFO
    elif args.verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format='%(asctime)s %(name)s %(levelname)s %(message)s',
                        stream=sys.stderr)


# =============================================================================
# ENTRY POINT
# =============================================================================

def _attach_signed_values(argv: Sequence[str]) -> List[str]:
    """
    argparse reads '--shells -3..3' or '--s -1/2' as two options; glue such values
    to their flag as '--shells=-3..3'.
    """
    out: List[str] = []
    tokens = list(argv)
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if (token in SIGNED_VALUE_FLAGS and i + 1 < len(tokens)
                and re.match(r'-\d', tokens[i + 1])):
            out.append(f"{token}={tokens[i + 1]}")
            i += 2
            continue
        out.append(token)
        i += 1
    return out


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parses argv, runs one subcommand and returns the exit code."""
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_attach_signed_values(argv))
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    _configure_logging(args)

    try:
        config = _resolve_config(args)
        spherical = args.command != 'field-info'
        config.validate(spherical=spherical)
        ctx = construct_field(config.p, config.n, config.precision, config.modulus,
                              require_spherical=spherical)
        payload = COMMANDS[args.command](ctx, config, args)
    except DomainError as e:
        logger.error(f"Domain error: {e}")
        sys.stderr.write(f"domain error: {e}\n")
        return EXIT_DOMAIN
    except (PreconditionError, ValueError, OSError) as e:
        logger.error(f"Usage error: {e}")
        sys.stderr.write(f"usage error: {e}\n")
        return EXIT_USAGE
    except PrecisionError as e:
        sys.stderr.write(f"precision error: {e}\n")
        return EXIT_DOMAIN
    except InternalConsistencyError as e:
        logger.error(f"Internal consistency failure: {e}")
        sys.stderr.write(f"internal consistency failure: {e}\n")
        return EXIT_FAILED
    except PadicError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_DOMAIN

    payload['provenance'] = provenance(ctx, config.seed, __version__)
    report_path = getattr(args, 'report', None)
    if report_path:
        with open(report_path, 'w', encoding='utf-8') as f:
            f.write(dumps(payload) + '\n')
        logger.info(f"Report written to {report_path}")
    _emit(payload, config)

    if args.command in ('verify', 'simulate', 'integrate') and not payload.get('passed', True):
        return EXIT_FAILED
    return EXIT_OK


def main():
    sys.exit(run(sys.argv[1:]))
