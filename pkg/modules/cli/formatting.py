"""Flag parsing and CSV/JSON output shared by every command.

Reals are written with 17 significant digits so that they read back to
the same double; infinity is spelled ``inf`` both ways.
"""
import csv
import io
import json
import math
from contextlib import contextmanager

import click
import numpy as np
from flask import current_app

from modules.exceptions import ModuliError, SerializationError


def parse_real(text, field):
    """Decimal real or ``inf``/``-inf``."""
    if isinstance(text, (int, float)):
        return float(text)
    value = str(text).strip().lower()
    if value in ('inf', '+inf', 'infinity'):
        return math.inf
    if value in ('-inf', '-infinity'):
        return -math.inf
    try:
        result = float(value)
    except ValueError:
        raise SerializationError(field, f'not a real number: {text!r}') from None
    if math.isnan(result):
        raise SerializationError(field, 'nan is not accepted')
    return result


def parse_real_list(text, field):
    """Comma-separated reals, e.g. ``1,1.5,inf``."""
    parts = [part for part in str(text).split(',') if part.strip()]
    if not parts:
        raise SerializationError(field, 'expected at least one value')
    return [parse_real(part, f'{field}[{i}]') for i, part in enumerate(parts)]


def parse_int_list(text, field):
    values = parse_real_list(text, field)
    for i, value in enumerate(values):
        if not math.isfinite(value) or int(value) != value:
            raise SerializationError(f'{field}[{i}]', f'not an integer: {value!r}')
    return [int(v) for v in values]


def load_json_text(text, field):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SerializationError(field, f'invalid JSON: {exc.msg}') from None


def format_cell(value):
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return format(float(value), '.17g')
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, dict):
        return json.dumps(jsonable(value), sort_keys=True)
    return str(value)


def write_csv(header, rows, path=None):
    """Write to ``path`` when given, otherwise to standard output."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    if path is None:
        click.echo(buffer.getvalue(), nl=False)
    else:
        with open(path, 'w') as f:
            f.write(buffer.getvalue())


def jsonable(value):
    """Plain JSON types; non-finite floats become the strings ``inf``, ``-inf`` and ``nan``."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isfinite(value):
            return value
        return 'nan' if math.isnan(value) else ('inf' if value > 0 else '-inf')
    return value


def emit_json(data):
    click.echo(json.dumps(jsonable(data), indent=2))


def dump_json(data, path):
    with open(path, 'w') as f:
        json.dump(jsonable(data), f, indent=2)


@contextmanager
def input_errors():
    """Turn toolkit errors into usage errors (exit status 2)."""
    try:
        yield
    except ModuliError as exc:
        raise click.UsageError(str(exc)) from None


def solver_options():
    config = current_app.config
    return {
        'max_iter': int(config['SOLVER_MAX_ITER']),
        'patience': int(config['SOLVER_PATIENCE']),
        'workers': max(1, int(config['THREADS'])),
    }


def exit_on_breach(breached, what):
    if breached:
        current_app.logger.warning('%s outside tolerance', what)
        click.get_current_context().exit(1)
