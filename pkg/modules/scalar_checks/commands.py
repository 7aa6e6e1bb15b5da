import click
from flask import Blueprint, current_app

from modules.cli.formatting import exit_on_breach, input_errors, parse_real, write_csv
from .models import SUITES, VIOLATION_HEADER, run_suite

scalar_checks_bp = Blueprint('scalar_checks_bp', __name__, cli_group=None)


@scalar_checks_bp.cli.command('check')
@click.argument('name', type=click.Choice(sorted(SUITES)))
@click.option('--grid', type=int, help='Grid resolution for alpha, beta and cosine.')
@click.option('--seeds', type=int, help='Random instances for the seeded suites.')
@click.option('--tolerance')
@click.option('--violations', 'violations_path', type=click.Path(dir_okay=False),
              help='Also write the violating cases to this CSV file.')
def check_command(name, grid, seeds, tolerance, violations_path):
    """Run one scalar inequality suite; exits 1 when any case fails."""
    with input_errors():
        tolerance = None if tolerance is None else parse_real(tolerance, 'tolerance')
        result = run_suite(name, grid=grid, seeds=seeds, tolerance=tolerance)
    write_csv(result.header, result.rows)
    if violations_path is not None:
        write_csv(VIOLATION_HEADER, result.violations, violations_path)
    for violation in result.violations:
        current_app.logger.warning('violation: %s', violation)
    exit_on_breach(not result.passed, f'{name} suite')
