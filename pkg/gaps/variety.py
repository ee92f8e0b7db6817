"""Projective varieties given by homogeneous polynomial parametrizations.

A variety X in P^m is the image of m+1 homogeneous polynomials of a common
degree w in the parameters t0..tn. Everything downstream is computed from
point evaluations and first derivatives of these maps, so no ideal of X is
ever needed.

Monomials are always listed in graded-lex order with t0 > t1 > ... > tn.
"""
import itertools
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import prod
from pathlib import Path

import numpy as np
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .exactalg import DenseMatrix, FieldContext, SeededSampler, kernel_basis, rank
from .exceptions import GenericityFailure, SpecError, VarietyFileError

logger = logging.getLogger(__name__)

NONDEGENERACY_MARGIN = 5
REDRAWS_PER_POINT = 5
DELPEZZO_ATTEMPTS = 5
PROJECTIVE_DIM_TRIALS = 3

_POLYNOMIAL_CHARS = re.compile(r'^[0-9t\s*^+\-/()]+$')
_TRANSFORMATIONS = standard_transformations + (convert_xor,)


def parameter_symbols(count):
    return tuple(sympy.symbols(f't0:{count}'))


def monomial_exponents(nvars, degree):
    """Exponent vectors of the given degree, graded-lex with t0 > ... > t_{n}."""
    exponents = []
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        vector = [0] * nvars
        for i in combo:
            vector[i] += 1
        exponents.append(tuple(vector))
    return exponents


@dataclass(frozen=True)
class Parametrization:
    """m+1 homogeneous maps of one degree w >= 1 in t0..tn, over the integers."""
    label: str
    param_count: int
    maps: tuple
    family: str = 'custom'
    family_params: tuple = ()

    def __post_init__(self):
        if len(self.maps) < 2:
            raise SpecError(f"{self.label}: need at least two coordinate maps")
        degrees = {poly.total_degree() for poly in self.maps}
        if len(degrees) != 1 or not all(poly.is_homogeneous for poly in self.maps):
            raise SpecError(f"{self.label}: maps are not homogeneous of one common degree")
        if degrees.pop() < 1:
            raise SpecError(f"{self.label}: maps must have positive degree")

    @property
    def ambient_dim(self):
        return len(self.maps) - 1

    @property
    def degree(self):
        return self.maps[0].total_degree()

    @property
    def gens(self):
        return parameter_symbols(self.param_count)

    @property
    def options(self):
        return dict(self.family_params)

    @cached_property
    def _terms(self):
        return tuple(
            tuple((int(coeff), monom) for monom, coeff in poly.terms() if coeff)
            for poly in self.maps
        )

    @cached_property
    def _derivative_terms(self):
        rows = []
        for gen in self.gens:
            rows.append(tuple(
                tuple((int(coeff), monom) for monom, coeff in poly.diff(gen).terms() if coeff)
                for poly in self.maps
            ))
        return tuple(rows)

    def evaluate(self, params, ctx):
        """Coordinates of the image of ``params``."""
        return [_evaluate_terms(terms, params, ctx) for terms in self._terms]

    def jacobian(self, params, ctx):
        """Row i holds the partial derivatives of all maps by t_i."""
        return [[_evaluate_terms(terms, params, ctx) for terms in row] for row in self._derivative_terms]

    def __str__(self):
        return self.label


def _evaluate_terms(terms, params, ctx):
    if ctx.is_prime:
        p = ctx.prime
        return sum(coeff * prod(pow(t, e, p) for t, e in zip(params, monom) if e) for coeff, monom in terms) % p
    return ctx.element(sum(coeff * prod(t ** e for t, e in zip(params, monom) if e) for coeff, monom in terms))


def _integral(poly):
    """Clear denominators and content; the image in P^m does not change."""
    _, poly = poly.clear_denoms(convert=True)
    _, poly = poly.primitive()
    return poly


def build(label, expressions, param_count, family='custom', family_params=()):
    """Parametrization from sympy expressions in t0..t_{param_count-1}."""
    gens = parameter_symbols(param_count)
    maps = []
    for expr in expressions:
        poly = sympy.Poly(expr, *gens, domain='QQ')
        if poly.is_zero:
            raise SpecError(f"{label}: zero coordinate map")
        maps.append(_integral(poly))
    return Parametrization(label, param_count, tuple(maps), family, tuple(sorted(family_params)))


def veronese(n, deg):
    if n < 1:
        raise SpecError(f"veronese: n must be at least 1, got {n}")
    if deg < 2:
        raise SpecError(f"veronese: degree {deg} gives a linear or degenerate image, need d >= 2")
    gens = parameter_symbols(n + 1)
    maps = [sympy.Mul(*(g ** e for g, e in zip(gens, exps))) for exps in monomial_exponents(n + 1, deg)]
    return build(f"veronese:n={n},d={deg}", maps, n + 1, 'veronese', (('n', n), ('d', deg)))


def segre(a, b):
    if a < 1 or b < 1:
        raise SpecError(f"segre: factors must have dimension at least 1, got a={a}, b={b}")
    gens = parameter_symbols(a + b + 2)
    xs, ys = gens[:a + 1], gens[a + 1:]
    maps = [x * y for x in xs for y in ys]
    return build(f"segre:a={a},b={b}", maps, a + b + 2, 'segre', (('a', a), ('b', b)))


def toric(exponents, label=None):
    """Monomial map t -> t^(column) for each column of the exponent matrix.

    Rows of ``exponents`` correspond to parameters, columns to coordinates.
    """
    rows = [list(row) for row in exponents]
    if not rows or not rows[0]:
        raise SpecError("toric: empty exponent matrix")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise SpecError("toric: exponent matrix rows have different lengths")
    if any(int(e) != e or e < 0 for row in rows for e in row):
        raise SpecError("toric: exponents must be nonnegative integers")
    columns = [tuple(int(row[k]) for row in rows) for k in range(width)]
    if len({sum(col) for col in columns}) != 1:
        raise SpecError("toric: columns have different coordinate sums (map is not homogeneous)")
    if len(set(columns)) != len(columns):
        raise SpecError("toric: repeated exponent column")
    gens = parameter_symbols(len(rows))
    maps = [sympy.Mul(*(g ** e for g, e in zip(gens, col))) for col in columns]
    return build(label or f"toric({len(rows)}x{width})", maps, len(rows), 'toric')


def delpezzo(k, sampler):
    """Plane cubics through k sampled points: a Del Pezzo surface of degree 9-k in P^(9-k).

    Base points are integers from the rational sampling box whatever the run
    mode, so exact and modular runs see the same surface.
    """
    if not 1 <= k <= 6:
        raise SpecError(f"delpezzo: need 1 <= k <= 6, got {k} (use veronese:n=2,d=3 for k = 0)")
    qq = FieldContext.rational()
    cubics = monomial_exponents(3, 3)
    for attempt in range(DELPEZZO_ATTEMPTS):
        points = [sampler.elements(qq, 3) for _ in range(k)]
        table = DenseMatrix(qq, [[prod(x ** e for x, e in zip(point, exps)) for exps in cubics] for point in points])
        if rank(table) == k:
            break
        logger.warning("delpezzo: %d base points impose dependent conditions (attempt %d), resampling",
                       k, attempt + 1)
    else:
        raise GenericityFailure(f"delpezzo: base points stayed special after {DELPEZZO_ATTEMPTS} attempts")
    gens = parameter_symbols(3)
    monomials = [sympy.Mul(*(g ** e for g, e in zip(gens, exps))) for exps in cubics]
    maps = [sympy.Add(*(c * mono for c, mono in zip(row, monomials))) for row in kernel_basis(table).to_lists()]
    return build(f"delpezzo:k={k}", maps, 3, 'delpezzo', (('k', k),))


def from_file(path, sampler=None, ctx=None):
    """
    Read a variety file; see README for the format.

    Args:
        path (str): Path to the variety file
        sampler (SeededSampler): Stream for the non-degeneracy points
        ctx (FieldContext): Field of the non-degeneracy rank, qq by default

    Returns:
        Parametrization: The maps of the file, certified non-degenerate

    Raises:
        VarietyFileError: With the offending line number, or without one
            when the maps are linearly dependent on X
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise VarietyFileError(f"cannot read {path}: {e}") from e
    header = {}
    expressions = []
    gens = None
    degree = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if len(header) < 2:
            keyword, _, value = line.partition(' ')
            expected = 'params' if not header else 'degree'
            if keyword != expected:
                raise VarietyFileError(f"expected '{expected} <count>', got {line!r}", lineno)
            try:
                header[keyword] = int(value)
            except ValueError:
                raise VarietyFileError(f"'{keyword}' needs an integer, got {value.strip()!r}", lineno) from None
            if header[keyword] < 1:
                raise VarietyFileError(f"'{keyword}' must be positive", lineno)
            if keyword == 'params':
                gens = parameter_symbols(header['params'])
            else:
                degree = header['degree']
            continue
        expressions.append(_parse_polynomial(line, gens, degree, lineno))
    if len(header) < 2:
        raise VarietyFileError("missing 'params' or 'degree' header")
    if len(expressions) < 2:
        raise VarietyFileError("need at least two coordinate maps")
    variety = build(path.name, expressions, len(gens), 'file', (('path', str(path)),))
    sampler = sampler or SeededSampler(0).substream('nondegeneracy', str(path))
    if not nondegeneracy_check(variety, sampler, ctx or FieldContext.rational()):
        raise VarietyFileError(f"{path.name}: maps span only a hyperplane (degenerate parametrization)")
    logger.info("read %s: %d maps of degree %d in %d parameters, non-degenerate",
                path.name, len(expressions), degree, len(gens))
    return variety


def _parse_polynomial(line, gens, degree, lineno):
    if not _POLYNOMIAL_CHARS.match(line):
        raise VarietyFileError(f"unexpected characters in {line!r}", lineno)
    names = {str(g): g for g in gens}
    try:
        expr = parse_expr(line, local_dict=names, transformations=_TRANSFORMATIONS)
    except (SyntaxError, TypeError, ValueError, sympy.SympifyError) as e:
        raise VarietyFileError(f"cannot parse {line!r}: {e}", lineno) from None
    unknown = expr.free_symbols - set(gens)
    if unknown:
        raise VarietyFileError(f"unknown variables {sorted(map(str, unknown))}", lineno)
    poly = sympy.Poly(expr, *gens, domain='QQ')
    if poly.is_zero:
        raise VarietyFileError("zero polynomial", lineno)
    if not poly.is_homogeneous or poly.total_degree() != degree:
        raise VarietyFileError(f"polynomial is not homogeneous of degree {degree}", lineno)
    return expr


def read_exponent_matrix(path):
    """Whitespace or comma separated integer rows, '#' comments allowed."""
    rows = []
    try:
        lines = Path(path).read_text(encoding='utf-8').splitlines()
    except OSError as e:
        raise VarietyFileError(f"cannot read {path}: {e}") from e
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split('#', 1)[0].replace(',', ' ').strip()
        if not line:
            continue
        try:
            rows.append([int(x) for x in line.split()])
        except ValueError:
            raise VarietyFileError(f"non-integer exponent in {line!r}", lineno) from None
    return rows


@dataclass(frozen=True)
class VarietySpec:
    """A parsed spec string such as ``veronese:n=2,d=3``."""
    family: str
    options: tuple
    text: str

    def get(self, key):
        return dict(self.options)[key]


_FAMILY_KEYS = {
    'veronese': ('n', 'd'),
    'segre': ('a', 'b'),
    'delpezzo': ('k',),
    'toric': ('file',),
}


def parse_spec(text):
    family, sep, rest = text.strip().partition(':')
    if not sep or not rest:
        raise SpecError(f"bad variety spec {text!r}; expected e.g. veronese:n=2,d=3")
    if family == 'file':
        return VarietySpec('file', (('path', rest),), text)
    if family not in _FAMILY_KEYS:
        raise SpecError(f"unknown variety family {family!r}")
    options = {}
    for item in rest.split(','):
        key, eq, value = item.partition('=')
        key = key.strip()
        if not eq or key not in _FAMILY_KEYS[family]:
            raise SpecError(f"{family}: unexpected option {item!r}")
        options[key] = value.strip()
    missing = set(_FAMILY_KEYS[family]) - set(options)
    if missing:
        raise SpecError(f"{family}: missing option(s) {', '.join(sorted(missing))}")
    if family != 'toric':
        try:
            options = {key: int(value) for key, value in options.items()}
        except ValueError:
            raise SpecError(f"{family}: options must be integers in {text!r}") from None
    return VarietySpec(family, tuple(sorted(options.items())), text)


def from_spec(text, seed=0):
    """Build the variety named by a CLI spec string."""
    spec = parse_spec(text)
    if spec.family == 'veronese':
        return veronese(spec.get('n'), spec.get('d'))
    if spec.family == 'segre':
        return segre(spec.get('a'), spec.get('b'))
    if spec.family == 'delpezzo':
        k = spec.get('k')
        return delpezzo(k, SeededSampler(seed).substream('delpezzo-base-points', k))
    if spec.family == 'toric':
        path = spec.get('file')
        return toric(read_exponent_matrix(path), label=f"toric:{Path(path).name}")
    return from_file(spec.get('path'), SeededSampler(seed).substream('nondegeneracy', spec.get('path')))


def expand_range(text):
    """Expand ``veronese:n=2,d=2..6`` into one spec string per instance."""
    family, sep, rest = text.strip().partition(':')
    if not sep or not rest:
        raise SpecError(f"bad range spec {text!r}")
    axes = []
    for item in rest.split(','):
        key, eq, value = item.partition('=')
        if not eq:
            raise SpecError(f"bad range item {item!r}")
        low, dots, high = value.partition('..')
        if dots:
            try:
                values = range(int(low), int(high) + 1)
            except ValueError:
                raise SpecError(f"bad range bounds in {item!r}") from None
        else:
            values = [value.strip()]
        if not values:
            raise SpecError(f"empty range {item!r}")
        axes.append([f"{key.strip()}={v}" for v in values])
    return [f"{family}:{','.join(combo)}" for combo in itertools.product(*axes)]


@dataclass(frozen=True)
class VarietyInfo:
    m: int
    d: int
    c: int


@dataclass(frozen=True)
class PointSample:
    """A point of X: its parameter values and its coordinates."""
    params: tuple
    coords: tuple


@dataclass(frozen=True)
class JetBlock:
    params: tuple
    value_row: tuple
    jacobian_rows: tuple

    def matrix(self, ctx):
        return DenseMatrix(ctx, [self.value_row, *self.jacobian_rows])

    def euler_holds(self, degree, ctx):
        """sum_i t_i * d(phi)/d(t_i) == w * phi, exactly."""
        for k, value in enumerate(self.value_row):
            lhs = sum(t * row[k] for t, row in zip(self.params, self.jacobian_rows))
            if ctx.element(lhs) != ctx.element(degree * value):
                return False
        return True


def _projective_key(coords, ctx):
    lead = next((x for x in coords if x), None)
    if lead is None:
        return None
    if ctx.is_prime:
        inverse = pow(lead, -1, ctx.prime)
        return tuple(x * inverse % ctx.prime for x in coords)
    return tuple(Fraction(x) / lead for x in coords)


def sample_points(variety, k, sampler, ctx):
    """
    Sample k points of X with nonzero, pairwise non-proportional coordinates.

    Args:
        variety (Parametrization): The parametrized variety
        k (int): Number of points
        sampler (SeededSampler): Source of the parameter values
        ctx (FieldContext): Field the parameters and coordinates live in

    Returns:
        list: k PointSample objects, in draw order
    """
    if k < 1:
        raise ValueError("sample_points needs k >= 1")
    points = []
    seen = set()
    rejected = 0
    while len(points) < k:
        params = tuple(sampler.elements(ctx, variety.param_count))
        coords = tuple(variety.evaluate(params, ctx))
        key = _projective_key(coords, ctx)
        if key is None or key in seen:
            rejected += 1
            if rejected >= REDRAWS_PER_POINT * k:
                raise GenericityFailure(f"{variety}: {rejected} rejected draws while sampling {k} points")
            continue
        seen.add(key)
        points.append(PointSample(params, coords))
    return points


def points_over(variety, points, ctx):
    """The same parameter values read in ``ctx``, coordinates re-evaluated there."""
    moved = []
    for point in points:
        params = tuple(ctx.element(t) for t in point.params)
        moved.append(PointSample(params, tuple(variety.evaluate(params, ctx))))
    return moved


def coordinate_table(points):
    """Object array with one row of coordinates per point."""
    return np.array([p.coords for p in points], dtype=object)


def jet_block(variety, point, ctx):
    return JetBlock(point.params, point.coords, tuple(tuple(row) for row in variety.jacobian(point.params, ctx)))


def projective_dim(variety, sampler, ctx):
    """dim X from the rank of the jet at a few sampled points."""
    points = sample_points(variety, PROJECTIVE_DIM_TRIALS, sampler, ctx)
    ranks = [jet_block(variety, p, ctx).matrix(ctx).rank() for p in points]
    if len(set(ranks)) == len(ranks):
        raise GenericityFailure(f"{variety}: jet ranks {ranks} disagree pairwise")
    if len(set(ranks)) > 1:
        logger.warning("%s: jet ranks %s at sampled points, using the maximum", variety, ranks)
    return max(ranks) - 1


def nondegeneracy_check(variety, sampler, ctx, margin=NONDEGENERACY_MARGIN):
    """True iff the coordinates are linearly independent on X."""
    size = variety.ambient_dim + 1
    try:
        points = sample_points(variety, size + margin, sampler, ctx)
    except GenericityFailure as e:
        logger.warning("non-degeneracy check could not sample: %s", e)
        return False
    return DenseMatrix(ctx, coordinate_table(points)).rank() == size


def variety_info(variety, sampler, ctx):
    m = variety.ambient_dim
    d = projective_dim(variety, sampler, ctx)
    if not 1 <= d < m:
        raise SpecError(f"{variety}: dimension {d} in P^{m} has no positive codimension")
    return VarietyInfo(m, d, m - d)
