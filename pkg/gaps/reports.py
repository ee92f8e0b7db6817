"""Rendering of gap reports and check results as JSON, CSV and text tables."""
import csv
import io
import json

FACE_KEYS = ('j', 'dim_sigma', 'dim_P_formula', 'dim_B', 'secant_nondefective', 'eps_Y', 'dim_IY2')

CSV_COLUMNS = ('variety', 'mode', 'seed', 'j', 'gap') + FACE_KEYS[1:]

SWEEP_COLUMNS = ('variety', 'n', 'd', 'm', 'c', 'epsilon', 'gap', 'conjecture_j_bar', 'conjecture_match', 'error')


def report_to_dict(report, checks=(), variety_class=None):
    """Key order is part of the output format; do not sort."""
    return {
        'variety': report.label,
        'm': report.m,
        'd': report.d,
        'c': report.c,
        'w': report.w,
        'mode': report.ctx.mode,
        'prime': report.ctx.prime,
        'certainty': report.ctx.certainty,
        'seed': report.seed,
        'trials': report.trials,
        'margin': report.margin,
        'nested': report.nested,
        'dim_R2': report.dim_R2,
        'dim_I2': report.dim_I2,
        'epsilon': report.epsilon,
        'gap': list(report.gap),
        'class': variety_class.value if variety_class is not None else None,
        'faces': [{key: getattr(face, key) for key in FACE_KEYS} for face in report.faces],
        'checks': [check.as_dict() for check in checks],
    }


def create_json(report, checks=(), variety_class=None):
    return json.dumps(report_to_dict(report, checks, variety_class), indent=2) + '\n'


def create_csv(report):
    """One row per face."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(CSV_COLUMNS)
    for face, g in zip(report.faces, report.gap):
        writer.writerow([report.label, report.ctx.mode, report.seed, face.j, g]
                        + [_cell(getattr(face, key)) for key in FACE_KEYS[1:]])
    return buffer.getvalue()


def generate_output(report, checks, output_format, variety_class=None):
    """Render a report in the requested format ('json' or 'csv')."""
    if output_format == 'json':
        return create_json(report, checks, variety_class)
    elif output_format == 'csv':
        return create_csv(report)
    else:
        raise ValueError(f"Unsupported output format: {output_format}")


def create_sweep_csv(rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([_cell(row.get(key)) for key in SWEEP_COLUMNS])
    return buffer.getvalue()


def sweep_row(spec, report=None, conjecture=None, error=None):
    """Row dict for one sweep instance; ``conjecture`` is (j_bar, match) or None."""
    row = {'variety': spec, 'error': error or ''}
    if report is not None:
        options = report.options
        row.update(
            n=options.get('n'), d=options.get('d'), m=report.m, c=report.c, epsilon=report.epsilon,
            gap=';'.join(str(g) for g in report.gap),
        )
    if conjecture is not None:
        row['conjecture_j_bar'], row['conjecture_match'] = conjecture
    return row


def checks_table(checks):
    """Fixed-width text table for terminals."""
    width = max((len(check.name) for check in checks), default=4)
    lines = [f"{'check':<{width}}  result  detail"]
    for check in checks:
        if check.informational:
            status = 'info' if not check.passed else 'ok'
        else:
            status = 'PASS' if check.passed else 'FAIL'
        detail = check.note
        if check.lhs is not None or check.rhs is not None:
            detail = f"{check.lhs} vs {check.rhs}" + (f"  ({check.note})" if check.note else '')
        lines.append(f"{check.name:<{width}}  {status:<6}  {detail}")
    return '\n'.join(lines) + '\n'


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    return value
