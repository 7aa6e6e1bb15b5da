import click
from flask import Blueprint

from modules.cli.formatting import emit_json, exit_on_breach, input_errors, solver_options, write_csv
from modules.distributions.codec import load_config
from .models import CSV_HEADER, applicable_reports

moduli_bp = Blueprint('moduli_bp', __name__, cli_group=None)


@moduli_bp.cli.command('ratio')
@click.argument('config_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default='csv', show_default=True)
def ratio_command(config_path, fmt):
    """Every ratio defined for the configuration stored in CONFIG_PATH."""
    with input_errors():
        config = load_config(config_path)
        reports = applicable_reports(config, **solver_options())
    if fmt == 'json':
        emit_json([report.to_dict() for report in reports])
    else:
        write_csv(CSV_HEADER, [report.csv_row() for report in reports])
    exit_on_breach(any(not report.within_bound for report in reports), 'a ratio')
