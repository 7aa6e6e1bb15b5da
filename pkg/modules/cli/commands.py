"""``sweep`` group: run ``verify`` or ``ratio`` over a parameter grid."""
import itertools

import click
from flask import Blueprint, current_app

from modules.constructions.commands import build_construction, verify_tolerances
from modules.constructions.models import BUILDERS, VerifyOutcome, evaluate
from modules.distributions.codec import load_config
from modules.distributions.models import Config
from modules.exceptions import DegenerateRatioError, DomainError
from modules.moduli.models import CSV_HEADER, applicable_reports
from .formatting import (
    exit_on_breach, input_errors, parse_int_list, parse_real, parse_real_list, solver_options,
    write_csv,
)

sweep_bp = Blueprint('sweep_bp', __name__, cli_group='sweep')


@sweep_bp.cli.command('verify')
@click.argument('builder', type=click.Choice(sorted(BUILDERS)))
@click.option('--n', 'n_values', help='Comma-separated integers.')
@click.option('--q', 'q_values', help='Comma-separated reals; inf allowed.')
@click.option('--p', 'p_values', required=True, help='Comma-separated reals.')
@click.option('--eps', 'eps_values')
@click.option('--kind', 'kinds', help='Comma-separated Jensen kinds.')
@click.option('--tolerance')
def sweep_verify_command(builder, n_values, q_values, p_values, eps_values, kinds, tolerance):
    """One verify row per point of the product grid."""
    rows = []
    failed = False
    with input_errors():
        axes = {'p': parse_real_list(p_values, 'p')}
        if n_values is not None:
            axes['n'] = parse_int_list(n_values, 'n')
        if q_values is not None:
            axes['q'] = parse_real_list(q_values, 'q')
        if eps_values is not None:
            axes['eps'] = parse_real_list(eps_values, 'eps')
        if kinds is not None:
            axes['kind'] = [kind.strip() for kind in kinds.split(',') if kind.strip()]
        tolerances = verify_tolerances(None if tolerance is None else parse_real(tolerance, 'tolerance'))
        for values in itertools.product(*axes.values()):
            params = dict(zip(axes, values))
            try:
                construction = build_construction(builder, params)
            except DomainError as exc:
                current_app.logger.warning('skipping %s %s: %s', builder, params, exc)
                continue
            outcome = evaluate(construction, **tolerances, **solver_options())
            rows.append(outcome.csv_row())
            failed = failed or not outcome.passed
    write_csv(VerifyOutcome.CSV_HEADER, rows)
    exit_on_breach(failed, f'a {builder} prediction')


@sweep_bp.cli.command('ratio')
@click.argument('config_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--p', 'p_values', required=True, help='Comma-separated moment exponents.')
def sweep_ratio_command(config_path, p_values):
    """All applicable ratios of one configuration for several exponents."""
    rows = []
    breached = False
    with input_errors():
        config = load_config(config_path)
        for p in parse_real_list(p_values, 'p'):
            try:
                reports = applicable_reports(Config(config.space, config.X, config.Y, p),
                                             **solver_options())
            except (DegenerateRatioError, DomainError) as exc:
                current_app.logger.warning('skipping p=%g: %s', p, exc)
                continue
            rows.extend(report.csv_row() for report in reports)
            breached = breached or any(not report.within_bound for report in reports)
    write_csv(CSV_HEADER, rows)
    exit_on_breach(breached, 'a ratio')
