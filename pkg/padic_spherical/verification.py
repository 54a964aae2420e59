"""
Verification Suites
Orakel-Suiten für alle Identitäten der Bibliothek; Ergebnisse als Reports.

Every suite returns a SuiteReport and never raises: a failing or crashing
check is recorded with passed=False and the error message.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import SimulationConfig
from .distributions import (HomogeneousDistribution, Quasicharacter, values_close, angular_mass,
                            lemma2_decompose, pair, radial_character_sum,
                            radial_character_sum_direct, random_angular,
                            residue_at_exceptional, shell_character_integral,
                            theorem2_reconstruct)
from .errors import PadicError, PreconditionError
from .field import ExtElement, FieldContext, enumerate_vectors, random_element, teichmuller_residue
from .haar import (CylinderFunction, FiniteLevelAngular, integrate_K, integrate_multiplicative,
                   multiplicative_constant_check, pushforward_counts, radial_shell_measure,
                   random_cylinder_function, sigma_index, spherical_integrate)
from .levy import LevyModel, radial_kernel_check_eq21
from .spherical import check_coordinates, compose, decompose, decompose_via_exponents

logger = logging.getLogger('PadicSpherical.Verify')


# =============================================================================
# REPORTS
# =============================================================================

@dataclass
class CheckResult:
    """One oracle comparison."""
    name: str
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None


@dataclass
class SuiteReport:
    name: str
    passed: bool
    checks: List[CheckResult] = field(default_factory=list)
    elapsed: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class VerificationReport:
    passed: bool
    suites: List[SuiteReport] = field(default_factory=list)

    @property
    def failures(self) -> List[str]:
        return [f"{s.name}/{c.name}" for s in self.suites for c in s.checks if not c.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {'passed': self.passed, 'failures': self.failures,
                'suites': [s.to_dict() for s in self.suites]}


def _run_check(name: str, fn: Callable[[], Tuple[bool, Dict[str, Any]]]) -> CheckResult:
    try:
        passed, detail = fn()
        return CheckResult(name, bool(passed), detail)
    except PadicError as e:
        logger.warning(f"{name}: {type(e).__name__}: {e}")
        return CheckResult(name, False, error=f"{type(e).__name__}: {e}")


def _suite(name: str, checks: Sequence[Tuple[str, Callable[[], Tuple[bool, Dict[str, Any]]]]]) -> SuiteReport:
    start = time.perf_counter()
    results = [_run_check(check_name, fn) for check_name, fn in checks]
    report = SuiteReport(name, all(r.passed for r in results), results,
                         round(time.perf_counter() - start, 3))
    logger.info(f"Suite {name}: {'ok' if report.passed else 'FAILED'} ({report.elapsed}s)")
    return report


def _text(value: Any) -> str:
    return str(value)


# =============================================================================
# HAAR MEASURE
# =============================================================================

def suite_constant(ctx: FieldContext, workers: int = 1) -> SuiteReport:
    """c = 1/p^(n-1) from the pushforward of the units modulo p^2."""
    def check():
        c = multiplicative_constant_check(ctx, 2, workers)
        expected = Fraction(1, ctx.p ** (ctx.n - 1))
        return c == expected, {'c': _text(c), 'expected': _text(expected)}
    return _suite('normalization_constant', [('c_recovery', check)])


def suite_volumes(ctx: FieldContext) -> SuiteReport:
    def units():
        value = integrate_K(ctx, CylinderFunction.units_indicator(ctx))
        expected = 1 - Fraction(1, ctx.q)
        return value == expected, {'value': _text(value), 'expected': _text(expected)}

    def shell():
        value = radial_shell_measure(ctx.p, 0)
        return value == Fraction(1, ctx.p), {'value': _text(value)}

    def ring():
        value = integrate_K(ctx, CylinderFunction.indicator(ctx))
        return value == 1, {'value': _text(value)}

    return _suite('volumes', [('units', units), ('unit_shell', shell), ('ring', ring)])


def suite_integration(ctx: FieldContext, rng: np.random.Generator, count: int = 100) -> SuiteReport:
    """Additive integral against its spherical form, and the multiplicative formula."""
    functions = [random_cylinder_function(ctx, rng) for _ in range(count)]

    def additive():
        for index, f in enumerate(functions):
            lhs, rhs = integrate_K(ctx, f), spherical_integrate(ctx, f)
            if lhs != rhs:
                return False, {'index': index, 'lhs': _text(lhs), 'rhs': _text(rhs)}
        return True, {'functions': len(functions)}

    def multiplicative():
        checked = 0
        for index, g in enumerate(functions[:max(1, count // 5)]):
            g = g.normalize()
            f = g + CylinderFunction.indicator(ctx, level=g.level, value=-g.at_zero())
            lhs = integrate_multiplicative(ctx, f)
            rhs = integrate_multiplicative(ctx, f, spherical=True)
            if lhs != rhs:
                return False, {'index': index, 'lhs': _text(lhs), 'rhs': _text(rhs)}
            checked += 1
        return True, {'functions': checked}

    return _suite('integration_formula', [('additive', additive), ('multiplicative', multiplicative)])


# =============================================================================
# SPHERICAL COORDINATES
# =============================================================================

def suite_coordinates(ctx: FieldContext, rng: np.random.Generator, count: int = 10000,
                   workers: int = 1) -> SuiteReport:
    """Roundtrip, multiplicativity, the exponent route and the uniform pushforward."""
    elements = [random_element(ctx, rng) for _ in range(count)]

    def roundtrip():
        for index, x in enumerate(elements):
            c = decompose(ctx, x)
            report = check_coordinates(ctx, x, c)
            if not all(report.values()) or compose(ctx, c) != x:
                return False, {'index': index, 'x': repr(x), 'report': report}
        return True, {'elements': len(elements)}

    def multiplicative():
        for index in range(0, len(elements) - 1, 2):
            x, y = elements[index], elements[index + 1]
            product = decompose(ctx, x) * decompose(ctx, y)
            direct = decompose(ctx, x * y)
            if (direct.omega != product.omega or direct.xi != product.xi
                    or direct.r != product.r):
                return False, {'index': index}
        return True, {'pairs': len(elements) // 2}

    def exponent_route():
        sample = elements[:max(1, count // 20)]
        for index, x in enumerate(sample):
            a, b = decompose(ctx, x), decompose_via_exponents(ctx, x)
            if a.omega != b.omega or a.xi != b.xi or a.r != b.r:
                return False, {'index': index}
        return True, {'elements': len(sample)}

    def pushforward():
        counts = pushforward_counts(ctx, 2, workers)
        cells = (ctx.q - 1) * sigma_index(ctx, 2) * ctx.p
        uniform = len(counts) == cells and len(set(counts.values())) == 1
        return uniform, {'cells': len(counts), 'expected_cells': cells,
                         'multiplicities': sorted(set(counts.values()))}

    return _suite('coordinates', [('roundtrip', roundtrip), ('multiplicative', multiplicative),
                               ('exponent_route', exponent_route), ('pushforward', pushforward)])


# =============================================================================
# DISTRIBUTIONS
# =============================================================================

def suite_radial_sums(ctx: FieldContext, tolerance: float = 1e-12) -> SuiteReport:
    """Radial character sums: exact zero for nontrivial theta, closed form otherwise."""
    p, n = ctx.p, ctx.n

    def nontrivial():
        for level in (1, 2):
            for exponent in (1, p - 1, p + 1):
                pi = Quasicharacter(p, Fraction(0), level, exponent)
                if shell_character_integral(pi) != 0 or radial_character_sum(pi, n, 0) != 0:
                    return False, {'level': level, 'exponent': exponent}
        return True, {}

    def trivial():
        worst = 0.0
        for s in (Fraction(-1), Fraction(1, 2), Fraction(2), complex(0.5, 1.3)):
            pi = Quasicharacter(p, s)
            for nu in (-1, 0, 2):
                closed = complex(radial_character_sum(pi, n, nu))
                direct = complex(radial_character_sum_direct(pi, n, nu))
                error = abs(closed - direct) / max(1.0, abs(closed))
                worst = max(worst, error)
                if error > tolerance:
                    return False, {'s': _text(s), 'nu': nu, 'closed': _text(closed),
                                   'direct': _text(direct)}
        return True, {'max_relative_error': worst}

    return _suite('radial_sums', [('nontrivial_theta', nontrivial), ('trivial_theta', trivial)])


def _random_pair_data(ctx: FieldContext, rng: np.random.Generator, level: int = 1):
    F = random_angular(ctx, rng, level)
    if angular_mass(F) == 0:
        F = FiniteLevelAngular(ctx, level, {k: v + 1 for k, v in F.table.items()})
    phi = random_cylinder_function(ctx, rng) + CylinderFunction.indicator(ctx)
    if phi.at_zero() == 0:
        phi = phi + CylinderFunction.indicator(ctx, level=phi.level)
    return F, phi


def suite_residue(ctx: FieldContext, rng: np.random.Generator, count: int = 10,
                  eps: float = 1e-4, tolerance: float = 1e-6) -> SuiteReport:
    """
    (s+n) <f, phi> near s = -n against the stated residue times q-1; the two
    sides of the pole are averaged so the linear term cancels.

    Expected value: phi(0) <F, 1> / (p^n log p) * (q - 1), the last factor
    being the normalization the pairing carries on the angular integral.
    """
    n = ctx.n
    data = [_random_pair_data(ctx, rng) for _ in range(count)]

    def limit():
        worst = 0.0
        for index, (F, phi) in enumerate(data):
            report = residue_at_exceptional(ctx, HomogeneousDistribution(Quasicharacter(ctx.p, -n), F), phi)
            estimates = []
            for delta in (eps, -eps):
                h = HomogeneousDistribution(Quasicharacter(ctx.p, complex(-n + delta)), F)
                estimates.append(delta * complex(pair(ctx, h, phi)))
            estimate = sum(estimates) / 2
            error = abs(estimate - report.value) / abs(report.value)
            worst = max(worst, error)
            if error > tolerance:
                return False, {'index': index, 'estimate': _text(estimate),
                               'residue': report.to_dict()}
        return True, {'pairs': len(data), 'max_relative_error': worst,
                      'normalization_factor': ctx.q - 1}

    return _suite('residue', [('limit', limit)])


def _random_quasicharacter(ctx: FieldContext, rng: np.random.Generator) -> Quasicharacter:
    choices = [Fraction(-1), Fraction(0), Fraction(1), Fraction(1, 2), complex(0.3, 0.7)]
    s = choices[int(rng.integers(0, len(choices)))]
    if s == -ctx.n:
        s = Fraction(0)
    if rng.integers(0, 2):
        return Quasicharacter(ctx.p, s, 1, int(rng.integers(1, ctx.p)))
    return Quasicharacter(ctx.p, s)


def suite_reconstruction(ctx: FieldContext, rng: np.random.Generator, count: int = 10,
                   level: int = 2, tolerance: float = 1e-10) -> SuiteReport:
    """Recover F from the pairing oracle of pi(r) F."""
    cases = [(_random_quasicharacter(ctx, rng), random_angular(ctx, rng, level))
             for _ in range(count)]

    def roundtrip():
        for index, (pi, F) in enumerate(cases):
            h = HomogeneousDistribution(pi, F)
            recovered = theorem2_reconstruct(ctx, lambda phi: pair(ctx, h, phi), pi, level)
            for key, value in F.table.items():
                if not values_close(recovered.value(*key), value, tolerance):
                    return False, {'index': index, 'pi': pi.to_dict(), 'key': _text(key),
                                   'got': _text(recovered.value(*key)), 'expected': _text(value)}
        return True, {'cases': len(cases)}

    return _suite('reconstruction', [('roundtrip', roundtrip)])


def suite_slices(ctx: FieldContext, rng: np.random.Generator, count: int = 50,
                 level: int = 3) -> SuiteReport:
    """Radial decomposition against phi on all points p^v0 * (vector mod p^level)."""
    functions = [random_cylinder_function(ctx, rng) for _ in range(count)]

    def reconstruction():
        points = 0
        for index, phi in enumerate(functions):
            decomposition = lemma2_decompose(ctx, phi)
            base = int(min(phi.support_valuation, phi.level, 0))
            for vec in enumerate_vectors(ctx, level):
                x = ctx.from_power_vector(vec, base)
                if phi(x) != decomposition.evaluate(ctx, x):
                    return False, {'index': index, 'x': repr(x)}
                points += 1
        return True, {'functions': len(functions), 'points': points}

    return _suite('slices', [('reconstruction', reconstruction)])


# =============================================================================
# LEVY PROCESS
# =============================================================================

def suite_radial_law(ctx: FieldContext, simulation: SimulationConfig, seed: int,
               trials: Optional[int] = None, threads: int = 1, t: Optional[float] = None) -> SuiteReport:
    """
    R_t from x, omega0 x and xi0 x has one law; the non-invariant control must
    be detected.
    """
    trials = simulation.paths if trials is None else trials
    t = simulation.T if t is None else t
    model = LevyModel(simulation.alpha, simulation.k_min, simulation.k_max, simulation.total_rate)
    control = LevyModel(simulation.alpha, simulation.k_min, simulation.k_max,
                        simulation.total_rate, rotation_invariant=False)
    x = ctx.one()
    residue = tuple([0, 1] + [0] * (ctx.n - 2)) if ctx.n > 1 else (2 % ctx.p,)
    omega0 = teichmuller_residue(ctx, residue)
    xi0 = decompose(ctx, ctx.one() + ctx.theta(1) * ctx.uniformizer()).xi

    def start(other: ExtElement, name: str, m: LevyModel, expect_pass: bool):
        def check():
            report = radial_kernel_check_eq21(m, ctx, x, other, t, trials, seed, threads)
            return report.passed == expect_pass, report.to_dict()
        return name, check

    return _suite('radial_law', [
        start(omega0 * x, 'omega_rotation', model, True),
        start(xi0 * x, 'xi_rotation', model, True),
        start(omega0 * x, 'negative_control', control, False),
    ])


# =============================================================================
# RUNNER
# =============================================================================

SUITES = ('constant', 'volumes', 'integration', 'coordinates', 'radial_sums', 'residue',
          'reconstruction', 'slices', 'radial_law')


def run_suites(ctx: FieldContext, seed: int, simulation: Optional[SimulationConfig] = None,
               threads: int = 1, names: Sequence[str] = SUITES,
               sizes: Optional[Dict[str, int]] = None) -> VerificationReport:
    """
    Runs the named suites, in parallel when threads > 1. Each suite draws from
    its own stream default_rng([seed, suite index]).

    Args:
        sizes: optional per-suite sample counts overriding the defaults
    """
    simulation = simulation or SimulationConfig()
    sizes = sizes or {}

    def rng(name: str) -> np.random.Generator:
        return np.random.default_rng([seed, SUITES.index(name)])

    builders: Dict[str, Callable[[], SuiteReport]] = {
        'constant': lambda: suite_constant(ctx, threads),
        'volumes': lambda: suite_volumes(ctx),
        'integration': lambda: suite_integration(ctx, rng('integration'), sizes.get('integration', 100)),
        'coordinates': lambda: suite_coordinates(ctx, rng('coordinates'), sizes.get('coordinates', 10000), threads),
        'radial_sums': lambda: suite_radial_sums(ctx),
        'residue': lambda: suite_residue(ctx, rng('residue'), sizes.get('residue', 10)),
        'reconstruction': lambda: suite_reconstruction(ctx, rng('reconstruction'), sizes.get('reconstruction', 10)),
        'slices': lambda: suite_slices(ctx, rng('slices'), sizes.get('slices', 50)),
        'radial_law': lambda: suite_radial_law(ctx, simulation, seed, sizes.get('radial_law'), threads),
    }
    unknown = [name for name in names if name not in builders]
    if unknown:
        raise PreconditionError(f"unknown suites: {unknown}")

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(lambda name: builders[name](), names))
    else:
        reports = [builders[name]() for name in names]
    return VerificationReport(all(r.passed for r in reports), reports)
