import click
from flask import Blueprint

from modules.cli.formatting import input_errors, parse_real, write_csv
from .models import CSV_HEADER, grid_rows

constants_bp = Blueprint('constants_bp', __name__, cli_group=None)


@constants_bp.cli.command('constants')
@click.option('--pmin', default='1', show_default=True)
@click.option('--pmax', default='4', show_default=True)
@click.option('--qmin', default='1', show_default=True)
@click.option('--qmax', default='4', show_default=True)
@click.option('--step', default='0.5', show_default=True)
def constants_command(pmin, pmax, qmin, qmax, step):
    """Exponents and bounds over an inclusive (p, q) grid, as CSV."""
    with input_errors():
        rows = grid_rows(parse_real(pmin, 'pmin'), parse_real(pmax, 'pmax'),
                         parse_real(qmin, 'qmin'), parse_real(qmax, 'qmax'),
                         parse_real(step, 'step'))
    write_csv(CSV_HEADER, rows)
