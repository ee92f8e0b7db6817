"""Combinatorial properties of gap vectors, checked on finished reports.

Checks never raise; a failed property is a CheckResult with passed=False.
Conjectural values are marked informational and never gate a run.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from math import comb

import sympy

from .exceptions import InternalInconsistency

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    lhs: object = None
    rhs: object = None
    note: str = ''
    informational: bool = False

    def as_dict(self):
        return {'name': self.name, 'passed': self.passed, 'lhs': self.lhs, 'rhs': self.rhs, 'note': self.note}


class VarietyClass(Enum):
    MINIMAL_DEGREE = 'MinimalDegree'
    ALMOST_MINIMAL = 'AlmostMinimalOrCubicHypersurfaceClass'
    GENERAL = 'General'


def _increments(gap):
    return [b - a for a, b in zip(gap, gap[1:])]


def verify_gap_properties(report):
    """
    Check the structural properties of a gap vector and its faces.

    Args:
        report (GapReport): Output of gap_vector

    Returns:
        list: One CheckResult per property, in a fixed order
    """
    gap = list(report.gap)
    c, eps = report.c, report.epsilon
    steps = _increments(gap)
    bounds = [c - j for j in range(1, c)]
    checks = [
        CheckResult('nonnegative', all(g >= 0 for g in gap), min(gap), 0),
        CheckResult('weakly_increasing', all(s >= 0 for s in steps), steps, 0,
                    'first differences of the gap vector'),
        CheckResult('last_entry_is_epsilon', gap[-1] == eps, gap[-1], eps),
    ]

    if c == 1:
        checks.append(CheckResult('penultimate_entry', True, note='skipped: hypersurface (c = 1)'))
    else:
        expected = max(eps - 1, 0)
        note = 'minimal degree (eps = 0)' if eps == 0 else 'eps - 1'
        checks.append(CheckResult('penultimate_entry', gap[-2] == expected, gap[-2], expected, note))

    checks.append(CheckResult('increment_bound', all(s <= b for s, b in zip(steps, bounds)), steps, bounds,
                              'g_{j+1} - g_j <= c - j'))

    maximal = [j for j, (s, b) in enumerate(zip(steps, bounds), start=1) if s == b]
    no_quadrics = [face.j for face in report.faces[:-1] if face.dim_IY2 == 0]
    checks.append(CheckResult('maximal_increment_iff_no_quadrics', maximal == no_quadrics, maximal, no_quadrics,
                              'j with g_{j+1} - g_j = c - j versus j with dim I(Y_j)_2 = 0'))

    persistent = list(range(maximal[0], c)) if maximal else []
    checks.append(CheckResult('maximal_growth_persists', maximal == persistent, maximal, persistent,
                              'once growth is maximal it stays maximal'))

    checks.append(CheckResult('difference_sum', sum(steps) == eps - gap[0], sum(steps), eps - gap[0],
                              'sum of first differences = eps - g_1'))

    identity = [c - j + report.face(j + 1).dim_IY2 - report.face(j).dim_IY2 for j in range(1, c)]
    checks.append(CheckResult('increment_identity', steps == identity, steps, identity,
                              '(c - j) + dim I(Y_{j+1})_2 - dim I(Y_j)_2'))

    sigmas = [face.dim_sigma for face in report.faces]
    dims_b = [face.dim_B for face in report.faces]
    eps_ys = [face.eps_Y for face in report.faces]
    checks += [
        CheckResult('face_containment', all(s <= b for s, b in zip(sigmas, dims_b)), sigmas, dims_b,
                    'dim Sigma(Gamma) <= dim B'),
        CheckResult('secant_nondefective', all(face.secant_nondefective for face in report.faces),
                    [face.j for face in report.faces if not face.secant_nondefective], [],
                    'faces whose conditions fall short of j(d+1)'),
        CheckResult('sigma_monotone', all(b <= a for a, b in zip(sigmas, sigmas[1:])), sigmas, None),
        CheckResult('eps_Y_monotone', all(b <= a for a, b in zip(eps_ys, eps_ys[1:])), eps_ys, None),
        CheckResult('epsilon_two_forms', eps == comb(c + 1, 2) - report.dim_I2, eps,
                    comb(c + 1, 2) - report.dim_I2, 'C(c+1, 2) - dim I(X)_2'),
    ]
    for check in checks:
        if not check.passed:
            logger.warning("%s: check %s failed (%r vs %r)", report.label, check.name, check.lhs, check.rhs)
    return checks


def veronese_p2_closed_form(d):
    """Gap vector of the d-th Veronese embedding of P^2."""
    if d < 2:
        raise ValueError(f"closed form needs d >= 2, got {d}")
    base = comb(d + 1, 2)
    return tuple(
        0 if j <= base else (j - base) * (d - 1) - comb(j + 1 - base, 2)
        for j in range(1, comb(d + 2, 2) - 2)
    )


def veronese_epsilon(n, d):
    return comb(n + 2 * d, 2 * d) - (n + 1) * comb(n + d, d) + comb(n + 1, 2)


def conjecture_values(n, d):
    """Conjectured first positive index and tail of the gap vector of nu_d(P^n).

    Returns (j_bar, tail) with tail[i] the value at j = j_bar + i, up to c.
    """
    if n < 1 or d < 2:
        raise ValueError(f"conjecture needs n >= 1 and d >= 2, got n={n}, d={d}")
    forms_2d = comb(n + 2 * d, 2 * d)
    forms_d = comb(n + d, d)
    c = forms_d - 1 - n
    half = sympy.Rational(1, 2)
    root = sympy.sqrt((n + half) ** 2 + 2 * forms_2d - 2 * (n + 1) * forms_d)
    j_bar = int(sympy.ceiling(forms_d - (n + 1) + half - root))
    tail = tuple(forms_2d - j * (n + 1) - comb(forms_d - j + 1, 2) for j in range(max(j_bar, 1), c + 1))
    return j_bar, tail


def conjectured_gap(n, d):
    """The full conjectured vector: zeros before j_bar, then the tail."""
    j_bar, tail = conjecture_values(n, d)
    return (0,) * (max(j_bar, 1) - 1) + tail


def _veronese_options(report):
    options = report.options
    if report.family != 'veronese':
        return None
    return options['n'], options['d']


def closed_form_checks(report):
    """Exact formulas for Veronese embeddings; these gate like theorem checks."""
    options = _veronese_options(report)
    if options is None:
        return []
    n, d = options
    checks = [CheckResult('veronese_epsilon_formula', report.epsilon == veronese_epsilon(n, d),
                          report.epsilon, veronese_epsilon(n, d),
                          'C(n+2d, 2d) - (n+1) C(n+d, d) + C(n+1, 2)')]
    if n == 2:
        expected = list(veronese_p2_closed_form(d))
        checks.append(CheckResult('veronese_p2_closed_form', list(report.gap) == expected,
                                  list(report.gap), expected))
    return checks


def conjecture_checks(report):
    """Conjectured Veronese values, compared for information only."""
    options = _veronese_options(report)
    if options is None:
        return []
    n, d = options
    j_bar, tail = conjecture_values(n, d)
    gap = list(report.gap)
    first_positive = next((j for j, g in enumerate(gap, start=1) if g > 0), None)
    return [
        CheckResult('conjecture_gap', gap == list(conjectured_gap(n, d)), gap, list(conjectured_gap(n, d)),
                    'informational', informational=True),
        CheckResult('conjecture_first_positive', first_positive == j_bar, first_positive, j_bar,
                    'informational', informational=True),
        CheckResult('conjecture_tail_reaches_epsilon', bool(tail) and tail[-1] == report.epsilon,
                    tail[-1] if tail else None, report.epsilon, 'informational', informational=True),
    ]


def conjecture_match(report):
    """True/False for Veronese reports, None otherwise."""
    options = _veronese_options(report)
    if options is None:
        return None
    return tuple(report.gap) == conjectured_gap(*options)


def classify(report):
    """Class of X read off eps, with the gap-vector shape it forces."""
    gap = tuple(report.gap)
    if report.epsilon == 0:
        if any(gap):
            raise InternalInconsistency(f"{report.label}: eps = 0 but gap = {gap}")
        return VarietyClass.MINIMAL_DEGREE
    if report.epsilon == 1:
        if gap != (0,) * (report.c - 1) + (1,):
            raise InternalInconsistency(f"{report.label}: eps = 1 but gap = {gap}")
        return VarietyClass.ALMOST_MINIMAL
    return VarietyClass.GENERAL


def certifies_strict_inclusion(report):
    """Sigma != P on X exactly when X is not of minimal degree."""
    return report.epsilon > 0


def run_checks(report):
    return verify_gap_properties(report) + closed_form_checks(report) + conjecture_checks(report)


def gating_failures(checks):
    return [check for check in checks if not check.passed and not check.informational]
