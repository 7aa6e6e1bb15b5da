import inspect

import click
from flask import Blueprint, current_app

from modules.cli.formatting import exit_on_breach, input_errors, parse_real, solver_options, write_csv
from modules.exceptions import SerializationError
from .models import BUILDERS, JENSEN_KINDS, VerifyOutcome, evaluate

constructions_bp = Blueprint('constructions_bp', __name__, cli_group=None)


def build_construction(name, params):
    """Call the builder registered under ``name`` with the flags it accepts."""
    builder = BUILDERS[name]
    accepted = inspect.signature(builder).parameters
    for key in sorted(params):
        if key not in accepted:
            raise SerializationError(key, f'not a parameter of {name}')
    for key, parameter in accepted.items():
        if parameter.default is inspect.Parameter.empty and key not in params:
            raise SerializationError(key, 'missing')
    return builder(**params)


def verify_tolerances(tolerance):
    config = current_app.config
    return {
        'tolerance': tolerance,
        'exact_tolerance': float(config['VERIFY_TOLERANCE']),
        'solver_tolerance': float(config['SOLVER_TOLERANCE']),
    }


@constructions_bp.cli.command('verify')
@click.argument('builder', type=click.Choice(sorted(BUILDERS)))
@click.option('--n', type=int)
@click.option('--q')
@click.option('--p')
@click.option('--eps')
@click.option('--kind', type=click.Choice(JENSEN_KINDS))
@click.option('--a')
@click.option('--b')
@click.option('--tolerance')
def verify_command(builder, n, q, p, eps, kind, a, b, tolerance):
    """Compare a construction's predicted ratio with a fresh computation."""
    with input_errors():
        params = {'n': n, 'kind': kind}
        for name, text in (('q', q), ('p', p), ('eps', eps), ('a', a), ('b', b)):
            if text is not None:
                params[name] = parse_real(text, name)
        params = {k: v for k, v in params.items() if v is not None}
        construction = build_construction(builder, params)
        tolerance = None if tolerance is None else parse_real(tolerance, 'tolerance')
        outcome = evaluate(construction, **verify_tolerances(tolerance), **solver_options())
    write_csv(VerifyOutcome.CSV_HEADER, [outcome.csv_row()])
    exit_on_breach(not outcome.passed, f'{outcome.construction} prediction')
