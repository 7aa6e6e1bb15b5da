import csv
import io
import json

import pytest

from modules.search.commands import parse_search_space
from modules.spaces.models import WeightedLq

REAL_LINE = '{"kind": "RealLine"}'


def _search(runner, *extra):
    return runner.invoke(args=['search', '--space', REAL_LINE, '--p', '1', '--seed', '3',
                               '--n-atoms-x', '3', '--n-atoms-y', '3', '--budget', '30', *extra])


def test_search_summary(runner):
    result = _search(runner, '--no-record')
    assert result.exit_code == 0, result.output
    summary = json.loads(result.stdout)
    assert summary['label'] == 'empirical lower bound'
    assert summary['objective'] == 'Roundness'
    assert summary['seed'] == 3
    assert 0 < summary['best_ratio'] <= 2 + 1e-9
    assert 'trace' not in summary
    assert 'run_id' not in summary


def test_search_is_reproducible(runner):
    first = json.loads(_search(runner, '--no-record').stdout)
    second = json.loads(_search(runner, '--no-record').stdout)
    assert first['best_ratio'] == second['best_ratio']


def test_search_writes_result_that_ratio_can_read(runner, tmp_path):
    out = tmp_path / 'best.json'
    result = _search(runner, '--no-record', '--out', str(out))
    assert result.exit_code == 0, result.output
    saved = json.loads(out.read_text())
    assert saved['trace'][0][0] == 0
    ratio = runner.invoke(args=['ratio', str(out)])
    assert ratio.exit_code == 0, ratio.output
    rows = {row['name']: row for row in csv.DictReader(io.StringIO(ratio.stdout))
            if not row['target']}
    assert float(rows['Roundness']['value']) == pytest.approx(saved['best_ratio'], rel=1e-12)


def test_recorded_runs(runner):
    summary = json.loads(_search(runner).stdout)
    run_id = summary['run_id']

    listing = runner.invoke(args=['runs'])
    assert listing.exit_code == 0
    [row] = list(csv.DictReader(io.StringIO(listing.stdout)))
    assert row['id'] == run_id
    assert row['objective'] == 'Roundness'
    assert row['seed'] == '3'

    shown = runner.invoke(args=['runs', '--show', run_id])
    assert json.loads(shown.stdout)['best_ratio'] == summary['best_ratio']

    deleted = runner.invoke(args=['runs', '--delete', run_id])
    assert deleted.exit_code == 0
    assert f'deleted {run_id}' in deleted.stdout
    assert runner.invoke(args=['runs']).stdout == 'id,created,objective,p,best_ratio,seed\n'


@pytest.mark.parametrize('flag', ['--show', '--delete'])
def test_unknown_run_id(runner, flag):
    result = runner.invoke(args=['runs', flag, 'nope'])
    assert result.exit_code == 2
    assert 'no run with id nope' in result.output


@pytest.mark.parametrize('extra', [
    ['--space', '{"kind": "Hilbert"}'],
    ['--space', 'not json'],
    ['--p', '0'],
    ['--budget', '0'],
    ['--objective', 'mixture', '--space', '{"kind": "BipartiteGraph", "n": 3}'],
])
def test_search_rejects_bad_input(runner, extra):
    args = ['search', '--space', REAL_LINE, '--p', '1', '--seed', '1', '--no-record']
    result = runner.invoke(args=args + extra)
    assert result.exit_code == 2


def test_search_breach_exits_with_one(runner, mocker):
    breached = mocker.Mock(within_bound=False)
    breached.to_dict.return_value = {'label': 'empirical lower bound', 'best_ratio': 5.0,
                                     'trace': [], 'best_config': {}}
    mocker.patch('modules.search.commands.run_search', return_value=breached)
    result = _search(runner, '--no-record')
    assert result.exit_code == 1


def test_weighted_lq_without_weights_gets_a_default_dimension():
    space = parse_search_space('{"kind": "WeightedLq", "q": 3}', 4, 6)
    assert space == WeightedLq.unit(3, 12)
    assert parse_search_space('{"kind": "WeightedLq", "q": 3, "dim": 5}', 4, 6).dim == 5
