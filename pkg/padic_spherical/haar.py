"""
Haar Integration
Exakte Integration lokal konstanter Funktionen auf K, auch in Kugelkoordinaten.

A CylinderFunction is a finite sum of values times ball indicators. Balls are
stored by their level k (the ball c + p^k O has volume q^-k) and the power-basis
coordinates of the center reduced modulo p^k, as exact rationals. All
integrals here are exact: Fractions, or complex numbers when values are complex.
"""

import itertools
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import (Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple,
                    Union)

import numpy as np

from .errors import DomainError, InternalConsistencyError, PrecisionError, PreconditionError
from .field import ExtElement, FieldContext, Vector, teichmuller_residue
from .padic import INFINITY, int_valuation
from .spherical import decompose

logger = logging.getLogger('PadicSpherical.Haar')

Value = Union[Fraction, complex]
Coords = Tuple[Fraction, ...]
AngularKey = Tuple[Vector, Vector]

ENUMERATION_BUDGET = 10 ** 7


# =============================================================================
# BALLS
# =============================================================================

def reduce_rational(a: Fraction, p: int, k: int) -> Fraction:
    """Canonical representative of a modulo p^k Z_p (a rational with p-power denominator)."""
    a = Fraction(a)
    if a == 0:
        return Fraction(0)
    den = a.denominator
    e = int_valuation(den, p)
    span = k + e
    if span <= 0:
        return Fraction(0)
    rest = den // p ** e
    modulus = p ** span
    return Fraction(a.numerator * pow(rest, -1, modulus) % modulus, p ** e)


def rational_valuation(a: Fraction, p: int) -> Union[int, float]:
    if a == 0:
        return INFINITY
    return int_valuation(a.numerator, p) - int_valuation(a.denominator, p)


@dataclass(frozen=True)
class Ball:
    """The ball center + p^level O."""
    p: int
    level: int
    center: Coords

    @classmethod
    def make(cls, p: int, level: int, coords: Sequence[Fraction]) -> 'Ball':
        return cls(p, level, tuple(reduce_rational(c, p, level) for c in coords))

    @classmethod
    def around(cls, ctx: FieldContext, center: ExtElement, level: int) -> 'Ball':
        if not center.is_zero and center.absolute_precision < level:
            raise PrecisionError(
                f"center known to p^{center.absolute_precision}, ball needs p^{level}")
        return cls.make(ctx.p, level, center.power_rationals())

    def volume(self, n: int) -> Fraction:
        return Fraction(self.p) ** (-self.level * n)

    def contains_coords(self, coords: Sequence[Fraction]) -> bool:
        return all(reduce_rational(c, self.p, self.level) == b
                   for c, b in zip(coords, self.center))

    def contains_ball(self, other: 'Ball') -> bool:
        return other.level >= self.level and self.contains_coords(other.center)

    def children(self) -> Iterable['Ball']:
        step = Fraction(self.p) ** self.level
        for digits in itertools.product(range(self.p), repeat=len(self.center)):
            yield Ball.make(self.p, self.level + 1,
                            [c + step * d for c, d in zip(self.center, digits)])

    def min_valuation(self) -> int:
        """Smallest valuation of a point of the ball."""
        v = min(rational_valuation(c, self.p) for c in self.center)
        return self.level if v >= self.level else v


def normalize_balls(terms: Iterable[Tuple[Ball, Value]]) -> Tuple[Tuple[Ball, Value], ...]:
    """
    Rewrites a sum of ball indicators over pairwise disjoint balls.

    Terms are processed coarse to fine; a ball that lands inside an existing
    one splits it along the path of children leading to the new ball.
    """
    disjoint: Dict[Ball, Value] = {}
    for ball, value in sorted(terms, key=lambda t: t[0].level):
        parent = next((b for b in disjoint if b.contains_ball(ball)), None)
        if parent is not None and parent != ball:
            base = disjoint.pop(parent)
            current = parent
            while current.level < ball.level:
                nxt = None
                for child in current.children():
                    if child.contains_ball(ball):
                        nxt = child
                    else:
                        disjoint[child] = base
                current = nxt
            disjoint[ball] = base
        disjoint[ball] = disjoint.get(ball, Fraction(0)) + value
    return tuple((b, v) for b, v in disjoint.items() if v != 0)


# =============================================================================
# CYLINDER FUNCTIONS
# =============================================================================

def _point_coords(x: ExtElement, level: int) -> Coords:
    if x.is_zero:
        return tuple(Fraction(0) for _ in range(x.ctx.n))
    if x.absolute_precision < level:
        raise PrecisionError(f"point known to p^{x.absolute_precision}, need p^{level}")
    return tuple(x.power_rationals())


@dataclass(frozen=True)
class CylinderFunction:
    """Finite sum of value * indicator(ball); `normalized` means pairwise disjoint balls."""
    ctx: FieldContext = field(repr=False)
    terms: Tuple[Tuple[Ball, Value], ...]
    normalized: bool = False

    # -------------------------------------------------------------------------
    # Konstruktoren
    # -------------------------------------------------------------------------

    @classmethod
    def from_terms(cls, ctx: FieldContext,
                   terms: Iterable[Tuple[ExtElement, int, Value]]) -> 'CylinderFunction':
        balls = tuple((Ball.around(ctx, center, k), value) for center, k, value in terms)
        return cls(ctx, balls).normalize()

    @classmethod
    def indicator(cls, ctx: FieldContext, center: Optional[ExtElement] = None,
                  level: int = 0, value: Value = Fraction(1)) -> 'CylinderFunction':
        center = ctx.zero() if center is None else center
        return cls(ctx, ((Ball.around(ctx, center, level), value),), True)

    @classmethod
    def units_indicator(cls, ctx: FieldContext) -> 'CylinderFunction':
        """1_U = 1_O - 1_{pO}."""
        return cls(ctx, ((Ball.make(ctx.p, 0, [0] * ctx.n), Fraction(1)),
                         (Ball.make(ctx.p, 1, [0] * ctx.n), Fraction(-1)))).normalize()

    @classmethod
    def zero(cls, ctx: FieldContext) -> 'CylinderFunction':
        return cls(ctx, (), True)

    # -------------------------------------------------------------------------
    # Normalisierung
    # -------------------------------------------------------------------------

    def normalize(self) -> 'CylinderFunction':
        """Rewrite as a sum over pairwise disjoint balls, dropping zero values."""
        if self.normalized:
            return self
        return CylinderFunction(self.ctx, normalize_balls(self.terms), True)

    # -------------------------------------------------------------------------
    # Auswertung
    # -------------------------------------------------------------------------

    @property
    def level(self) -> int:
        """Finest ball level (local constancy at scale q^-level)."""
        return max((b.level for b, _ in self.terms), default=0)

    @property
    def support_valuation(self) -> Union[int, float]:
        """Smallest valuation of a point in the support."""
        return min((b.min_valuation() for b, _ in self.terms), default=INFINITY)

    def evaluate_coords(self, coords: Sequence[Fraction]) -> Value:
        total: Value = Fraction(0)
        for ball, value in self.terms:
            if ball.contains_coords(coords):
                total += value
        return total

    def __call__(self, x: ExtElement) -> Value:
        return self.evaluate_coords(_point_coords(x, self.level))

    def at_zero(self) -> Value:
        return self.evaluate_coords([Fraction(0)] * self.ctx.n)

    # -------------------------------------------------------------------------
    # Transformationen
    # -------------------------------------------------------------------------

    def __add__(self, other: 'CylinderFunction') -> 'CylinderFunction':
        return CylinderFunction(self.ctx, self.terms + other.terms).normalize()

    def scaled(self, factor: Value) -> 'CylinderFunction':
        return CylinderFunction(self.ctx, tuple((b, v * factor) for b, v in self.terms),
                                self.normalized)

    def translate(self, a: ExtElement) -> 'CylinderFunction':
        """x -> f(x + a)."""
        shift = a.power_rationals()
        return CylinderFunction(self.ctx, tuple(
            (Ball.make(self.ctx.p, b.level, [c - s for c, s in zip(b.center, shift)]), v)
            for b, v in self.terms), self.normalized)

    def dilate(self, lam: Fraction) -> 'CylinderFunction':
        """x -> f(lam * x) for a nonzero rational lam."""
        lam = Fraction(lam)
        if lam == 0:
            raise DomainError("dilation by 0")
        v = rational_valuation(lam, self.ctx.p)
        return CylinderFunction(self.ctx, tuple(
            (Ball.make(self.ctx.p, b.level - v, [c / lam for c in b.center]), value)
            for b, value in self.terms), self.normalized)

    def restrict(self, ball: Ball) -> 'CylinderFunction':
        """f * indicator(ball)."""
        terms = []
        for b, v in self.normalize().terms:
            if b.contains_ball(ball):
                terms.append((ball, v))
            elif ball.contains_ball(b):
                terms.append((b, v))
        return CylinderFunction(self.ctx, tuple(terms), True)


# =============================================================================
# ANGULAR FUNCTIONS ON Z_n = mu_{q-1} x Sigma_n
# =============================================================================

@dataclass(frozen=True)
class FiniteLevelAngular:
    """Function on Z_n constant on the cosets of Sigma_n ∩ (1 + p^level O)."""
    ctx: FieldContext = field(repr=False)
    level: int
    table: Mapping[AngularKey, Value]

    def __post_init__(self):
        expected = set(angular_keys(self.ctx, self.level))
        if set(self.table) != expected:
            raise PreconditionError(
                f"angular table covers {len(self.table)} cosets, level {self.level} has {len(expected)}")

    @classmethod
    def constant(cls, ctx: FieldContext, level: int, value: Value = Fraction(1)) -> 'FiniteLevelAngular':
        return cls(ctx, level, {key: value for key in angular_keys(ctx, level)})

    @classmethod
    def from_function(cls, ctx: FieldContext, level: int,
                      fn: Callable[[Vector, Vector], Value]) -> 'FiniteLevelAngular':
        return cls(ctx, level, {key: fn(*key) for key in angular_keys(ctx, level)})

    def value(self, omega_residue: Vector, xi_key: Vector) -> Value:
        """Lookup by omega residue and xi modulo p^k for any k >= level."""
        mod = self.ctx.p ** self.level
        return self.table[(omega_residue, tuple(c % mod for c in xi_key))]

    def at(self, omega: ExtElement, xi: ExtElement) -> Value:
        return self.value(omega.residue(), xi.key(self.level))

    def refine(self, level: int) -> 'FiniteLevelAngular':
        if level < self.level:
            raise PreconditionError("cannot coarsen an angular function")
        return FiniteLevelAngular(self.ctx, level,
                                  {key: self.value(*key) for key in angular_keys(self.ctx, level)})

    def translate(self, omega0: ExtElement, xi0: ExtElement) -> 'FiniteLevelAngular':
        """(omega, xi) -> F(omega0 omega, xi0 xi)."""
        cosets = sigma_cosets(self.ctx, self.level)
        table = {}
        for (w_res, x_key) in self.table:
            omega = teichmuller_residue(self.ctx, w_res, self.level)
            table[(w_res, x_key)] = self.at(omega0 * omega, xi0 * cosets[x_key])
        return FiniteLevelAngular(self.ctx, self.level, table)


# =============================================================================
# ENUMERATION
# =============================================================================

def _check_budget(ctx: FieldContext, m: int, budget: int) -> None:
    if m > ctx.precision:
        raise PrecisionError(f"level {m} exceeds the working precision {ctx.precision}")
    if ctx.q ** m > budget:
        raise PreconditionError(f"q^m = {ctx.q ** m} exceeds the enumeration budget {budget}")


def enumerate_units(ctx: FieldContext, m: int, budget: int = ENUMERATION_BUDGET) -> List[ExtElement]:
    """Representatives of U / (1 + p^m O): q^(m-1)(q-1) units known modulo p^m."""
    if m < 1:
        raise PreconditionError("unit enumeration needs m >= 1")
    _check_budget(ctx, m, budget)
    p = ctx.p
    units = []
    for vec in itertools.product(range(p ** m), repeat=ctx.n):
        if any(c % p for c in vec):
            units.append(ExtElement(ctx, 0, tuple(vec), m))
    logger.debug(f"Enumerated {len(units)} units mod p^{m}")
    return units


def enumerate_principal_units(ctx: FieldContext, m: int) -> List[ExtElement]:
    """Representatives of (1 + pO) / (1 + p^m O)."""
    _check_budget(ctx, m, ENUMERATION_BUDGET)
    p = ctx.p
    result = []
    for tail in itertools.product(range(p ** (m - 1)), repeat=ctx.n):
        vec = tuple((1 if j == 0 else 0) + p * t for j, t in enumerate(tail))
        result.append(ExtElement(ctx, 0, tuple(c % p ** m for c in vec), m))
    return result


@lru_cache(maxsize=None)
def sigma_cosets(ctx: FieldContext, m: int) -> Dict[Vector, ExtElement]:
    """
    Cosets of Sigma_n ∩ (1 + p^m O) in Sigma_n, keyed by xi modulo p^m.

    xi(u) modulo p^m depends only on u modulo p^m, so decomposing the principal
    units at level m reaches every coset.
    """
    cosets: Dict[Vector, ExtElement] = {}
    for u in enumerate_principal_units(ctx, m):
        xi = decompose(ctx, u).xi
        cosets.setdefault(xi.key(m), xi)
    expected = ctx.p ** ((ctx.n - 1) * (m - 1))
    if len(cosets) != expected:
        raise InternalConsistencyError(f"found {len(cosets)} Sigma cosets at level {m}, expected {expected}")
    logger.debug(f"Sigma_n has {len(cosets)} cosets at level {m}")
    return dict(sorted(cosets.items()))


def sigma_index(ctx: FieldContext, m: int) -> int:
    """[Sigma_n : Sigma_n ∩ (1 + p^m O)] = p^((n-1)(m-1))."""
    return ctx.p ** ((ctx.n - 1) * (m - 1))


def angular_keys(ctx: FieldContext, m: int) -> List[AngularKey]:
    return [(w, x) for w in ctx.residue_classes() for x in sigma_cosets(ctx, m)]


# =============================================================================
# SPHERICAL GRID
# =============================================================================

@dataclass(frozen=True)
class GridPoint:
    """Cell omega * xi(1 + p^M O ∩ Sigma) * rho(1 + p^M Z_p) of the unit group."""
    omega_residue: Vector
    xi_key: Vector
    rho: int
    point: ExtElement
    weight: Fraction


@lru_cache(maxsize=None)
def spherical_grid(ctx: FieldContext, level: int) -> Tuple[GridPoint, ...]:
    """
    All cells of U at the given level with their product Haar weight
    (1 / #Xi_level) * p^-level; the weights sum to (q - 1) / p.
    """
    if level < 1:
        raise PreconditionError("grid level must be >= 1")
    _check_budget(ctx, level, ENUMERATION_BUDGET)
    p = ctx.p
    cosets = sigma_cosets(ctx, level)
    weight = Fraction(1, len(cosets) * p ** level)
    mod = p ** level
    points = []
    for residue in ctx.residue_classes():
        omega = teichmuller_residue(ctx, residue, level)
        for key, xi in cosets.items():
            omega_xi = omega * xi
            for a in range(p ** (level - 1)):
                rho = (1 + p * a) % mod
                point = omega_xi * ctx.scalar(rho)
                points.append(GridPoint(residue, key, rho, point, weight))
    logger.debug(f"Spherical grid at level {level}: {len(points)} cells")
    return tuple(points)


# =============================================================================
# INTEGRALS
# =============================================================================

def integrate_K(ctx: FieldContext, f: CylinderFunction) -> Value:
    """Additive Haar integral: sum of value * q^-k over disjoint balls."""
    f = f.normalize()
    total: Value = Fraction(0)
    for ball, value in f.terms:
        total += value * ball.volume(ctx.n)
    return total


def sigma_haar_integrate(ctx: FieldContext,
                         g: Union[Callable[[Vector], Value], Mapping[Vector, Value]],
                         m: int, margin: int = 1,
                         budget: int = ENUMERATION_BUDGET) -> Value:
    """
    Integral over Sigma_n (total mass 1) of g, given on xi modulo p^m, as the
    pushforward average of g(xi(u)) over the units modulo p^(m + margin).
    """
    lookup = g.__getitem__ if isinstance(g, Mapping) else g
    units = enumerate_units(ctx, m + margin, budget)
    mod = ctx.p ** m
    total: Value = Fraction(0)
    for u in units:
        xi = decompose(ctx, u).xi
        total += lookup(tuple(c % mod for c in xi.unit))
    return total / len(units)


def shell_sum(ctx: FieldContext, f: CylinderFunction, nu: int, level: int) -> Value:
    """Sum over the grid at `level` of weight * f(p^nu u)."""
    total: Value = Fraction(0)
    for cell in spherical_grid(ctx, level):
        value = f(cell.point.shift(nu))
        if value != 0:
            total += cell.weight * value
    return total


def spherical_integrate(ctx: FieldContext, f: CylinderFunction) -> Value:
    """
    Right-hand side of the additive integration formula in spherical coordinates:
    p^(1-n) sum_omega int_Sigma dxi int_{Q_p^(1)} f(omega xi r) |r|^(n-1) dr.

    Shells v(r) = nu between the support bound and the constancy level are summed
    on the grid; the shells below the constancy level, where f equals f(0), are
    summed as a geometric series.
    """
    f = f.normalize()
    if not f.terms:
        return Fraction(0)
    p, n, q = ctx.p, ctx.n, ctx.q
    L = f.level
    lowest = f.support_valuation
    prefactor = Fraction(p) ** (1 - n)
    total: Value = Fraction(0)
    for nu in range(int(min(lowest, L)), L):
        # |r|^(n-1) dr on the shell is p^(-nu n) d rho
        total += prefactor * Fraction(p) ** (-nu * n) * shell_sum(ctx, f, nu, L - nu)
    f0 = f.at_zero()
    if f0 != 0:
        tail = prefactor * Fraction(q - 1, p) * Fraction(q) ** (-L) / (1 - Fraction(1, q))
        total += f0 * tail
    return total


def integrate_multiplicative(ctx: FieldContext, f: CylinderFunction,
                             spherical: bool = False) -> Value:
    """
    Integral of f(x) dx / ||x|| over K^*; f must vanish near 0.

    With spherical=True the right-hand side c * sum_omega int dxi int f dr/|r|
    with c = p^(1-n) is evaluated instead.
    """
    f = f.normalize()
    if f.at_zero() != 0:
        raise DomainError("f(x)/||x|| is not integrable when f(0) != 0")
    if not f.terms:
        return Fraction(0)
    p, n, q = ctx.p, ctx.n, ctx.q
    L = f.level
    lowest = int(min(f.support_valuation, L))
    total: Value = Fraction(0)
    for nu in range(lowest, L):
        if spherical:
            total += Fraction(p) ** (1 - n) * shell_sum(ctx, f, nu, L - nu)
        else:
            inner = integrate_K(ctx, f.restrict(Ball.make(p, nu, [0] * n)))
            inner -= integrate_K(ctx, f.restrict(Ball.make(p, nu + 1, [0] * n)))
            total += Fraction(q) ** nu * inner
    return total


def radial_shell_measure(p: int, j: int, m: int = 2) -> Fraction:
    """
    Measure of {r in Q_p^(1): |r|_p = p^j} by counting r = p^-j rho with
    rho modulo p^m in 1 + pZ_p; each class has measure p^j p^-m.
    """
    count = sum(1 for a in range(p ** m) if a % p == 1)
    return count * Fraction(p) ** (j - m)


def pushforward_counts(ctx: FieldContext, m: int,
                       workers: int = 1) -> Counter:
    """Counts of (omega residue, xi mod p^m, rho mod p^m) over the units modulo p^m."""
    units = enumerate_units(ctx, m)
    mod = ctx.p ** m

    def triple(u: ExtElement):
        c = decompose(ctx, u)
        return c.omega.residue(), c.xi.key(m), c.r.mantissa % mod

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return Counter(pool.map(triple, units))
    return Counter(triple(u) for u in units)


def multiplicative_constant_check(ctx: FieldContext, m: int = 2, workers: int = 1) -> Fraction:
    """
    Recovers c in  int f dx/||x|| = c sum_omega int dxi int f dr/|r|  for f = 1_U.

    Left side: count of units modulo p^m times q^-m. Right side: every distinct
    (omega, xi-coset, rho) cell reached by the decomposition, weighted by
    (1 / #Xi_m) * p^-m.
    """
    counts = pushforward_counts(ctx, m, workers)
    units = sum(counts.values())
    lhs = Fraction(units, ctx.q ** m)
    rhs = Fraction(len(counts), sigma_index(ctx, m) * ctx.p ** m)
    logger.info(f"Constant check p={ctx.p} n={ctx.n} m={m}: lhs={lhs} rhs={rhs}")
    return lhs / rhs


# =============================================================================
# RANDOM TEST FUNCTIONS
# =============================================================================

def random_cylinder_function(ctx: FieldContext, rng: np.random.Generator,
                             max_level: int = 2, max_terms: int = 4,
                             min_level: int = 0) -> CylinderFunction:
    """Random rational combination of balls with centers in O and levels in [min_level, max_level]."""
    p = ctx.p
    count = int(rng.integers(1, max_terms + 1))
    terms = []
    for _ in range(count):
        k = int(rng.integers(min_level, max_level + 1))
        span = max(k, 0)
        coords = [Fraction(int(rng.integers(0, p ** span))) for _ in range(ctx.n)]
        value = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5)))
        terms.append((Ball.make(p, k, coords), value))
    return CylinderFunction(ctx, tuple(terms)).normalize()
