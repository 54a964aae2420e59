"""
Levy Process Simulation
Monte-Carlo-Simulation rotationsinvarianter Sprungprozesse auf K und
statistische Diagnostik des Radialprozesses R_t und des Winkelprozesses z_t.

The process is compound Poisson: exponential waiting times at total rate
Lambda, a shell k drawn with probability lambda_k / Lambda where
lambda_k is proportional to q^(-alpha k), and a jump uniform on {||y|| = q^k}.
"""

import bisect
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import PrecisionError, PreconditionError
from .field import ExtElement, FieldContext, Vector, random_unit
from .haar import sigma_cosets
from .spherical import decompose
from .stats import (ChiSquareReport, P_THRESHOLD, bonferroni, bonferroni_correct,
                    contingency_test, independence_test, uniformity_test)

logger = logging.getLogger('PadicSpherical.Levy')

ABSORBED = 'absorbed'


# =============================================================================
# MODEL
# =============================================================================

@dataclass(frozen=True)
class LevyModel:
    """
    Compound Poisson model with finitely many shells.

    rotation_invariant=False gives the negative control: the shell is k_max
    while omega(X) = 1 and k_min otherwise.
    """
    alpha: float = 1.0
    k_min: int = -3
    k_max: int = 3
    total_rate: float = 1.0
    rotation_invariant: bool = True

    def __post_init__(self):
        if self.k_min > self.k_max:
            raise PreconditionError(f"empty shell range {self.k_min}..{self.k_max}")
        if self.alpha <= 0 or self.total_rate <= 0:
            raise PreconditionError("alpha and the total rate must be positive")

    @property
    def shells(self) -> List[int]:
        return list(range(self.k_min, self.k_max + 1))

    def rates(self, q: int) -> List[float]:
        """lambda_k = C q^(-alpha k) with sum lambda_k = total_rate."""
        raw = [float(q) ** (-self.alpha * k) for k in self.shells]
        scale = self.total_rate / sum(raw)
        return [r * scale for r in raw]

    def probabilities(self, q: int) -> np.ndarray:
        rates = np.array(self.rates(q))
        return rates / rates.sum()

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# =============================================================================
# PATHS
# =============================================================================

def sample_sphere_uniform(ctx: FieldContext, k: int, rng: np.random.Generator) -> ExtElement:
    """Haar-uniform y with ||y|| = q^k, i.e. y = p^(-k) u for a uniform unit u."""
    return random_unit(ctx, rng).shift(-k)


@dataclass
class PathRecord:
    """One simulated path; `states[i]` is X right after the i-th jump."""
    seed: int
    index: int
    x0: ExtElement
    horizon: float
    jump_times: Tuple[float, ...]
    jumps: Tuple[ExtElement, ...]
    states: Tuple[ExtElement, ...]

    @property
    def absorbed(self) -> bool:
        return any(s.is_zero for s in self.states)

    def state_at(self, t: float) -> ExtElement:
        i = bisect.bisect_right(self.jump_times, t)
        return self.x0 if i == 0 else self.states[i - 1]

    def jumps_between(self, t0: float, t1: float) -> int:
        return bisect.bisect_right(self.jump_times, t1) - bisect.bisect_right(self.jump_times, t0)

    def radial_shell(self, ctx: FieldContext, t: float) -> Hashable:
        """Valuation of R_t (||X_t|| = |R_t|^n), or ABSORBED when X_t = 0."""
        x = self.state_at(t)
        return ABSORBED if x.is_zero else x.valuation

    def angular_at(self, ctx: FieldContext, t: float, level: int) -> Optional[Tuple[ExtElement, ExtElement]]:
        """z_t = (omega, xi) with xi known modulo p^level, None when unavailable."""
        x = self.state_at(t)
        if x.is_zero or x.precision < level:
            return None
        c = decompose(ctx, x)
        return c.omega, c.xi


def _choose_shell(model: LevyModel, ctx: FieldContext, x: ExtElement,
                  probabilities: np.ndarray, rng: np.random.Generator) -> int:
    if model.rotation_invariant:
        return model.shells[int(rng.choice(len(probabilities), p=probabilities))]
    one = tuple([1] + [0] * (ctx.n - 1))
    if not x.is_zero and x.unit_part().residue() == one:
        return model.k_max
    return model.k_min


def simulate_path(model: LevyModel, ctx: FieldContext, x0: ExtElement, T: float,
                  seed: int, index: int = 0, stream: int = 0) -> PathRecord:
    """
    Compound Poisson path on [0, T]; deterministic in (seed, stream, index).
    """
    rng = np.random.default_rng([seed, stream, index])
    probabilities = model.probabilities(ctx.q)
    t = 0.0
    x = x0
    times: List[float] = []
    jumps: List[ExtElement] = []
    states: List[ExtElement] = []
    while True:
        t += float(rng.exponential(1.0 / model.total_rate))
        if t > T:
            break
        k = _choose_shell(model, ctx, x, probabilities, rng)
        y = sample_sphere_uniform(ctx, k, rng)
        x = x + y
        times.append(t)
        jumps.append(y)
        states.append(x)
    return PathRecord(seed, index, x0, T, tuple(times), tuple(jumps), tuple(states))


def simulate_paths(model: LevyModel, ctx: FieldContext, x0: ExtElement, T: float,
                   seed: int, count: int, threads: int = 1, stream: int = 0) -> List[PathRecord]:
    """Independent paths with per-path streams; the order does not depend on threads."""
    def one(i: int) -> PathRecord:
        return simulate_path(model, ctx, x0, T, seed, i, stream)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            paths = list(pool.map(one, range(count)))
    else:
        paths = [one(i) for i in range(count)]
    logger.info(f"Simulated {count} paths (stream {stream}, seed {seed})")
    return paths


# =============================================================================
# REPORTS
# =============================================================================

@dataclass
class RadialKernelReport:
    """Radial law of R_t from two starts with the same r."""
    passed: bool
    time: float
    trials: int
    chi_square: ChiSquareReport
    discarded: Dict[str, int] = field(default_factory=dict)
    seed: int = 0

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['chi_square'] = self.chi_square.to_dict()
        return data


@dataclass
class MarkovReport:
    passed: bool
    radial: List[ChiSquareReport] = field(default_factory=list)
    angular: List[ChiSquareReport] = field(default_factory=list)
    merged_strata: List[str] = field(default_factory=list)
    strata: List[Dict[str, Any]] = field(default_factory=list)
    discarded: int = 0
    note: Optional[str] = None
    inconclusive: bool = False

    @property
    def passed_radial(self) -> bool:
        return not self.inconclusive and all(r.passed for r in self.radial)

    @property
    def passed_angular(self) -> bool:
        return not self.inconclusive and all(r.passed for r in self.angular)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'passed': self.passed,
            'passed_radial': self.passed_radial,
            'passed_angular': self.passed_angular,
            'radial': [r.to_dict() for r in self.radial],
            'angular': [r.to_dict() for r in self.angular],
            'merged_strata': self.merged_strata,
            'strata': self.strata,
            'discarded': self.discarded,
            'note': self.note,
            'inconclusive': self.inconclusive,
        }


# =============================================================================
# RADIAL DIAGNOSTICS
# =============================================================================

def radial_kernel_check_eq21(model: LevyModel, ctx: FieldContext, x: ExtElement,
                             x_prime: ExtElement, t: float, trials: int, seed: int = 0,
                             threads: int = 1, threshold: float = P_THRESHOLD) -> RadialKernelReport:
    """
    Two-sample chi-square on the shell of R_t started from x and from x'.

    Raises:
        PreconditionError: r(x) != r(x'), or a start is 0
    """
    if x.is_zero or x_prime.is_zero:
        raise PreconditionError("starts must be nonzero")
    if decompose(ctx, x).r != decompose(ctx, x_prime).r:
        raise PreconditionError("r(x) != r(x'); the radial laws are not comparable")
    samples = []
    discarded = {}
    for stream, start in ((0, x), (1, x_prime)):
        paths = simulate_paths(model, ctx, start, t, seed, trials, threads, stream)
        shells = Counter(p.radial_shell(ctx, t) for p in paths)
        discarded[f'start_{stream}'] = shells.pop(ABSORBED, 0)
        samples.append(shells)
    report = contingency_test(samples, f"R_t shells at t={t}", threshold)
    return RadialKernelReport(report.passed, t, trials, report, discarded, seed)


def _pool_strata(strata: Dict[Hashable, List[Tuple[Any, Any, Any]]],
                 min_stratum: int) -> List[Tuple[List[Hashable], List[Tuple[Any, Any, Any]]]]:
    """Adjacent R_t2 shells are pooled, in shell order, until each group has min_stratum paths."""
    groups: List[Tuple[List[Hashable], List[Tuple[Any, Any, Any]]]] = []
    keys: List[Hashable] = []
    rows: List[Tuple[Any, Any, Any]] = []
    for shell in sorted(strata):
        keys.append(shell)
        rows.extend(strata[shell])
        if len(rows) >= min_stratum:
            groups.append((keys, rows))
            keys, rows = [], []
    if keys:
        if groups:
            groups[-1][0].extend(keys)
            groups[-1][1].extend(rows)
        else:
            groups.append((keys, rows))
    return groups


def markov_diagnostic(model: LevyModel, ctx: FieldContext, paths: Sequence[PathRecord],
                      times: Tuple[float, float, float], alpha: float = P_THRESHOLD,
                      min_stratum: int = 50) -> MarkovReport:
    """
    Given the shell of R_{t2}: R_{t3} independent of R_{t1} (radial test) and of
    the residue of omega(X_{t2}) (angular test). Bonferroni over all strata.

    Strata below min_stratum paths are merged with their neighbouring shells.
    With fewer than min_stratum usable paths in total the report is
    inconclusive and does not pass.
    """
    t1, t2, t3 = times
    if not t1 < t2 < t3:
        raise PreconditionError("times must satisfy t1 < t2 < t3")
    strata: Dict[Hashable, List[Tuple[Any, Any, Any]]] = {}
    discarded = 0
    for path in paths:
        shells = [path.radial_shell(ctx, t) for t in times]
        if ABSORBED in shells:
            discarded += 1
            continue
        omega = path.state_at(t2).unit_part().residue()
        strata.setdefault(shells[1], []).append((shells[0], omega, shells[2]))

    groups = _pool_strata(strata, min_stratum)
    usable = sum(len(rows) for _, rows in groups)
    if usable < min_stratum:
        note = f"inconclusive: {usable} usable paths, at least {min_stratum} needed"
        logger.warning(f"Markov diagnostic {note}")
        return MarkovReport(False, discarded=discarded, note=note, inconclusive=True)

    radial, angular, merged, sizes = [], [], [], []
    for keys, rows in groups:
        label = '+'.join(str(k) for k in keys)
        sizes.append({'shells': list(keys), 'paths': len(rows)})
        if len(keys) > 1:
            merged.append(f"R_t2 shells {label}: {len(rows)} paths")
        radial.append(independence_test([(a, c) for a, _, c in rows],
                                        f"R_t3 vs R_t1 | shell {label}"))
        angular.append(independence_test([(w, c) for _, w, c in rows],
                                         f"R_t3 vs omega(X_t2) | shell {label}"))
    corrected = bonferroni_correct(radial + angular, alpha)
    radial, angular = corrected[:len(radial)], corrected[len(radial):]
    passed = bonferroni(radial + angular, alpha)
    return MarkovReport(passed, radial, angular, merged, sizes, discarded)


def sphere_uniformity(ctx: FieldContext, k: int, samples: int, rng: np.random.Generator,
                      level: int = 2) -> List[ChiSquareReport]:
    """Leading residue, omega and xi-coset of sampled shell elements against uniform laws."""
    residues, omegas, cosets = Counter(), Counter(), Counter()
    for _ in range(samples):
        y = sample_sphere_uniform(ctx, k, rng)
        residues[y.unit_part().residue()] += 1
        c = decompose(ctx, y)
        omegas[c.omega.residue()] += 1
        cosets[c.xi.key(level)] += 1
    classes = list(ctx.residue_classes())
    return [
        uniformity_test(residues, classes, "leading residue"),
        uniformity_test(omegas, classes, "omega"),
        uniformity_test(cosets, list(sigma_cosets(ctx, level)), f"xi coset level {level}"),
    ]


def rotation_invariance_check(model: LevyModel, ctx: FieldContext, x0: ExtElement, t: float,
                              trials: int, seed: int, u0: ExtElement,
                              level: int = 2) -> ChiSquareReport:
    """Angular law of X_t - x0 against that of u0 (X_t - x0)."""
    paths = simulate_paths(model, ctx, x0, t, seed, trials)
    plain, rotated = Counter(), Counter()
    for path in paths:
        d = path.state_at(t) - x0
        if d.is_zero or d.precision < level:
            continue
        a = decompose(ctx, d)
        b = decompose(ctx, u0 * d)
        plain[(a.omega.residue(), a.xi.key(level))] += 1
        rotated[(b.omega.residue(), b.xi.key(level))] += 1
    return contingency_test([plain, rotated], "rotation invariance of X_t - x0")


def time_homogeneity_check(model: LevyModel, ctx: FieldContext, x0: ExtElement,
                           t: float, s: float, trials: int, seed: int) -> ChiSquareReport:
    """||X_{t+s} - X_t|| against ||X_s - X_0||, as shell histograms."""
    paths = simulate_paths(model, ctx, x0, t + s, seed, trials)
    late, early = Counter(), Counter()
    for path in paths:
        d_late = path.state_at(t + s) - path.state_at(t)
        d_early = path.state_at(s) - x0
        late[ABSORBED if d_late.is_zero else d_late.valuation] += 1
        early[ABSORBED if d_early.is_zero else d_early.valuation] += 1
    return contingency_test([late, early], "increment shells in time")


# =============================================================================
# ANGULAR INCREMENTS
# =============================================================================

IncrementKey = Tuple[Vector, Vector]


@dataclass
class IncrementTables:
    """
    Multiplicative increments z_{t_i}^-1 z_{t_(i+1)} of the angular process.

    Each record is (interval, shell before, shell after, jump count, key) with key
    = (omega increment residue, xi increment modulo p^level).
    """
    level: int
    records: List[Tuple[int, int, int, int, IncrementKey]] = field(default_factory=list)
    discarded: int = 0

    def counts(self, interval: Optional[int] = None, jumps: Optional[int] = None) -> Counter:
        return Counter(r[4] for r in self.records
                       if (interval is None or r[0] == interval)
                       and (jumps is None or r[3] == jumps))

    def stratified(self, interval: int) -> Dict[Tuple[int, int], Counter]:
        tables: Dict[Tuple[int, int], Counter] = {}
        for i, before, after, _, key in self.records:
            if i == interval:
                tables.setdefault((before, after), Counter())[key] += 1
        return tables

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {'level': self.level, 'discarded': self.discarded, 'strata': []}
        intervals = sorted({r[0] for r in self.records})
        for i in intervals:
            for (before, after), counter in sorted(self.stratified(i).items()):
                out['strata'].append({
                    'interval': i, 'shell_before': before, 'shell_after': after,
                    'counts': {str(k): v for k, v in sorted(counter.items())},
                })
        return out


def _increment_key(a: Tuple[ExtElement, ExtElement], b: Tuple[ExtElement, ExtElement],
                   level: int) -> IncrementKey:
    omega = a[0].inverse() * b[0]
    xi = a[1].inverse() * b[1]
    return omega.residue(), xi.key(level)


def angular_increment_sample(model: LevyModel, ctx: FieldContext, paths: Sequence[PathRecord],
                             times: Sequence[float], level: int = 2) -> IncrementTables:
    """
    Angular increments between consecutive observation times, stratified by
    the radial shells; paths reaching 0 (or losing the digits needed for the
    key) are discarded and counted.

    Raises:
        PreconditionError: every path was discarded
    """
    tables = IncrementTables(level)
    for path in paths:
        try:
            zs = [path.angular_at(ctx, t, level) for t in times]
        except PrecisionError:
            zs = [None]
        if any(z is None for z in zs):
            tables.discarded += 1
            continue
        shells = [path.state_at(t).valuation for t in times]
        for i in range(len(times) - 1):
            key = _increment_key(zs[i], zs[i + 1], level)
            tables.records.append((i, shells[i], shells[i + 1],
                                   path.jumps_between(times[i], times[i + 1]), key))
    if paths and tables.discarded == len(paths):
        raise PreconditionError("all paths were absorbed at 0")
    logger.debug(f"Angular increments: {len(tables.records)} records, {tables.discarded} discarded")
    return tables


def single_jump_increment_sample(model: LevyModel, ctx: FieldContext, x0: ExtElement,
                                 count: int, seed: int, level: int = 2) -> Counter:
    """Angular increment of x0 -> x0 + y for one directly sampled jump y."""
    rng = np.random.default_rng([seed, 99])
    probabilities = model.probabilities(ctx.q)
    c0 = decompose(ctx, x0)
    start = (c0.omega, c0.xi)
    counts = Counter()
    for _ in range(count):
        k = _choose_shell(model, ctx, x0, probabilities, rng)
        x = x0 + sample_sphere_uniform(ctx, k, rng)
        if x.is_zero or x.precision < level:
            continue
        c = decompose(ctx, x)
        counts[_increment_key(start, (c.omega, c.xi), level)] += 1
    return counts


def compare_increment_tables(a: IncrementTables, b: IncrementTables,
                             interval: int = 0, threshold: float = P_THRESHOLD) -> ChiSquareReport:
    """Two-sample test of increment laws, jointly over the radial strata."""
    def joint(t: IncrementTables) -> Counter:
        out = Counter()
        for stratum, counter in t.stratified(interval).items():
            for key, v in counter.items():
                out[(stratum, key)] += v
        return out
    return contingency_test([joint(a), joint(b)], f"increment law, interval {interval}", threshold)
