"""
JSON Serialization
Umwandlung aller Nutzdaten in einfache JSON-Strukturen und zurück.

Values are exact where possible: rationals travel as "num/den" strings,
complex numbers as [real, imag], p-adic mantissas as decimal strings.
"""

import json
import math
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, TextIO, Union

from .distributions import Quasicharacter, ResidueReport
from .errors import PreconditionError
from .field import ExtElement, FieldContext, construct_field
from .haar import Ball, CylinderFunction, FiniteLevelAngular, Value
from .padic import PadicScalar
from .spherical import SphericalCoords


# =============================================================================
# VALUES
# =============================================================================

def value_to_json(value: Value) -> Union[str, List[float]]:
    if isinstance(value, complex):
        return [value.real, value.imag]
    return str(Fraction(value))


def value_from_json(data: Union[str, int, float, Sequence[float]]) -> Value:
    if isinstance(data, (list, tuple)):
        real, imag = data
        return complex(real, imag)
    if isinstance(data, float):
        return Fraction(data).limit_denominator()
    return Fraction(data)


# =============================================================================
# SCALARS, FIELDS, ELEMENTS
# =============================================================================

def scalar_to_dict(x: PadicScalar) -> Dict[str, Any]:
    return {
        'p': x.prime,
        'valuation': 'inf' if x.is_zero else x.valuation,
        'mantissa': str(x.mantissa),
        'precision': x.precision,
    }


def scalar_from_dict(data: Dict[str, Any]) -> PadicScalar:
    p = int(data['p'])
    precision = int(data['precision'])
    if data['valuation'] == 'inf':
        return PadicScalar.zero(p, precision)
    return PadicScalar(p, int(data['valuation']), int(data['mantissa']), precision)


def context_to_dict(ctx: FieldContext) -> Dict[str, Any]:
    return {'p': ctx.p, 'n': ctx.n, 'precision': ctx.precision, 'modulus': list(ctx.modulus)}


def context_from_dict(data: Dict[str, Any]) -> FieldContext:
    return construct_field(int(data['p']), int(data['n']), int(data['precision']),
                           data.get('modulus'))


def element_to_dict(x: ExtElement) -> List[Dict[str, Any]]:
    """Canonical-basis coordinates (x_1, ..., x_n), theta_n = 1 last."""
    return [scalar_to_dict(c) for c in x.coefficients()]


def element_from_dict(ctx: FieldContext, data: Sequence[Any]) -> ExtElement:
    """
    Accepts PadicScalar records or plain rationals ("1/3", 2) per coordinate.
    """
    coordinates = []
    for entry in data:
        if isinstance(entry, dict):
            coordinates.append(scalar_from_dict(entry))
        else:
            coordinates.append(Fraction(entry))
    return ExtElement.from_coordinates(ctx, coordinates)


def coords_to_dict(ctx: FieldContext, c: SphericalCoords) -> Dict[str, Any]:
    return {
        'omega': element_to_dict(c.omega),
        'xi': element_to_dict(c.xi),
        'r': scalar_to_dict(c.r),
    }


# =============================================================================
# FUNCTIONS AND CHARACTERS
# =============================================================================

def cylinder_to_dict(f: CylinderFunction) -> Dict[str, Any]:
    """Ball centers as power-basis rationals reduced modulo p^k."""
    return {
        'terms': [{'center': [str(c) for c in ball.center], 'k': ball.level,
                   'value': value_to_json(value)}
                  for ball, value in f.terms],
    }


def cylinder_from_dict(ctx: FieldContext, data: Dict[str, Any]) -> CylinderFunction:
    """
    Center entries are power-basis rationals, or a list of PadicScalar records in
    canonical-basis order (the element format).
    """
    terms = []
    for term in data.get('terms', []):
        k = int(term['k'])
        center = term['center']
        if center and isinstance(center[0], dict):
            ball = Ball.around(ctx, element_from_dict(ctx, center), k)
        else:
            if len(center) != ctx.n:
                raise PreconditionError(f"ball center has {len(center)} coordinates, need {ctx.n}")
            ball = Ball.make(ctx.p, k, [Fraction(c) for c in center])
        terms.append((ball, value_from_json(term['value'])))
    return CylinderFunction(ctx, tuple(terms)).normalize()


def quasicharacter_to_dict(pi: Quasicharacter) -> Dict[str, Any]:
    return pi.to_dict()


def quasicharacter_from_dict(p: int, data: Dict[str, Any]) -> Quasicharacter:
    s = data.get('s', 0)
    s = complex(*s) if isinstance(s, (list, tuple)) else Fraction(s)
    theta = data.get('theta') or {}
    return Quasicharacter(p, s, int(theta.get('level', 0)), int(theta.get('exponent', 0)))


def angular_to_dict(F: FiniteLevelAngular) -> Dict[str, Any]:
    values = set(F.table.values())
    if len(values) == 1:
        return {'level': F.level, 'constant': value_to_json(values.pop())}
    return {
        'level': F.level,
        'entries': [{'omega': list(w), 'xi': list(x), 'value': value_to_json(v)}
                    for (w, x), v in sorted(F.table.items())],
    }


def angular_from_dict(ctx: FieldContext, data: Dict[str, Any]) -> FiniteLevelAngular:
    level = int(data.get('level', 1))
    if 'constant' in data:
        return FiniteLevelAngular.constant(ctx, level, value_from_json(data['constant']))
    table = {(tuple(e['omega']), tuple(e['xi'])): value_from_json(e['value'])
             for e in data.get('entries', [])}
    return FiniteLevelAngular(ctx, level, table)


def residue_to_dict(report: Optional[ResidueReport]) -> Optional[Dict[str, Any]]:
    return None if report is None else report.to_dict()


# =============================================================================
# OUTPUT
# =============================================================================

def _default(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, PadicScalar):
        return scalar_to_dict(obj)
    if isinstance(obj, ExtElement):
        return element_to_dict(obj)
    if isinstance(obj, (tuple, set, frozenset)):
        return list(obj)
    if hasattr(obj, 'to_dict'):
        return obj.to_dict()
    if hasattr(obj, 'item'):
        return obj.item()
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def _finite(obj: Any) -> Any:
    """json forbids inf/nan in strict mode; valuations of zero become "inf"."""
    if isinstance(obj, float) and math.isinf(obj):
        return 'inf' if obj > 0 else '-inf'
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def dumps(payload: Dict[str, Any]) -> str:
    """Deterministic JSON: sorted keys, fixed indentation."""
    normalized = json.loads(json.dumps(payload, default=_default))
    return json.dumps(_finite(normalized), sort_keys=True, indent=2, ensure_ascii=False)


def dump(payload: Dict[str, Any], stream: TextIO) -> None:
    stream.write(dumps(payload))
    stream.write('\n')


def provenance(ctx: Optional[FieldContext], seed: Optional[int], version: str,
               p: Optional[int] = None, n: Optional[int] = None,
               precision: Optional[int] = None) -> Dict[str, Any]:
    """The {p, n, N, modulus, seed, version} block embedded in every output."""
    if ctx is not None:
        return {'p': ctx.p, 'n': ctx.n, 'N': ctx.precision, 'modulus': list(ctx.modulus),
                'seed': seed, 'version': version}
    return {'p': p, 'n': n, 'N': precision, 'modulus': None, 'seed': seed, 'version': version}


__all__ = [
    'value_to_json', 'value_from_json', 'scalar_to_dict', 'scalar_from_dict',
    'context_to_dict', 'context_from_dict', 'element_to_dict', 'element_from_dict',
    'coords_to_dict', 'cylinder_to_dict', 'cylinder_from_dict', 'quasicharacter_to_dict',
    'quasicharacter_from_dict', 'angular_to_dict', 'angular_from_dict', 'residue_to_dict',
    'dumps', 'dump', 'provenance',
]
