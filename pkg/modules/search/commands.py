import click
from flask import Blueprint, current_app

from modules.cli.formatting import (
    dump_json, emit_json, exit_on_breach, input_errors, load_json_text, parse_real, solver_options,
    write_csv,
)
from modules.spaces.models import WeightedLq, space_from_dict
from .models import SearchObjective, SearchSpec, run_search
from .store import add_run, delete_run, get_all_runs, get_run_by_id

search_bp = Blueprint('search_bp', __name__, cli_group=None)

OBJECTIVE_FLAGS = {objective.value.lower(): objective for objective in SearchObjective}
RUNS_HEADER = ['id', 'created', 'objective', 'p', 'best_ratio', 'seed']


def parse_search_space(text, n_atoms_x, n_atoms_y):
    """Space JSON; a WeightedLq without weights gets 2 * max(atoms) unit coordinates."""
    data = load_json_text(text, 'space')
    if isinstance(data, dict) and data.get('kind') == WeightedLq.kind \
            and 'weights' not in data and 'dim' not in data:
        data = {**data, 'dim': 2 * max(n_atoms_x, n_atoms_y)}
    return space_from_dict(data)


@search_bp.cli.command('search')
@click.option('--space', 'space_text', required=True,
              help='Space as JSON, e.g. \'{"kind": "WeightedLq", "q": 3}\'.')
@click.option('--objective', type=click.Choice(sorted(OBJECTIVE_FLAGS)), default='roundness',
              show_default=True)
@click.option('--p', required=True)
@click.option('--n-atoms-x', type=int, default=8, show_default=True)
@click.option('--n-atoms-y', type=int, default=8, show_default=True)
@click.option('--budget', type=int, default=10_000, show_default=True)
@click.option('--restarts', type=int, default=1, show_default=True)
@click.option('--seed', type=int, required=True)
@click.option('--warm-start/--no-warm-start', default=True, show_default=True)
@click.option('--out', type=click.Path(dir_okay=False), help='Write the full result here.')
@click.option('--record/--no-record', default=True, show_default=True,
              help='Append the run to the ledger.')
def search_command(space_text, objective, p, n_atoms_x, n_atoms_y, budget, restarts, seed,
                   warm_start, out, record):
    """Hill-climb a ratio; the reported value is an empirical lower bound."""
    options = solver_options()
    with input_errors():
        spec = SearchSpec(
            parse_search_space(space_text, n_atoms_x, n_atoms_y), OBJECTIVE_FLAGS[objective],
            parse_real(p, 'p'), n_atoms_x, n_atoms_y, budget, restarts, seed, warm_start,
            {'max_iter': options['max_iter'], 'patience': options['patience']},
        )
        result = run_search(spec, workers=options['workers'])
    summary = {k: v for k, v in result.to_dict().items() if k not in ('trace', 'best_config')}
    if out is not None:
        dump_json(result.to_dict(), out)
    if record:
        summary['run_id'] = add_run(result, current_app.config['RUNS_LEDGER'])['id']
    emit_json(summary)
    exit_on_breach(not result.within_bound, 'search ratio')


@search_bp.cli.command('runs')
@click.option('--show', 'show_id', help='Print one recorded run as JSON.')
@click.option('--delete', 'delete_id', help='Remove one run from the ledger.')
def runs_command(show_id, delete_id):
    """List, show or delete recorded search runs."""
    path = current_app.config['RUNS_LEDGER']
    if show_id is not None:
        run = get_run_by_id(show_id, path)
        if run is None:
            raise click.UsageError(f'no run with id {show_id}')
        emit_json(run)
        return
    if delete_id is not None:
        if not delete_run(delete_id, path):
            raise click.UsageError(f'no run with id {delete_id}')
        click.echo(f'deleted {delete_id}')
        return
    rows = [[run['id'], run['created'], run['spec']['objective'], run['spec']['p'],
             run['best_ratio'], run['seed']] for run in get_all_runs(path)]
    write_csv(RUNS_HEADER, rows)
