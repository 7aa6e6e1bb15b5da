import csv
import io
import json

import pytest

from modules.constructions.models import make_bipartite
from modules.distributions.codec import config_to_dict, dump_config


@pytest.fixture
def bipartite_config(tmp_path):
    path = tmp_path / 'k33.json'
    dump_config(make_bipartite(3, 2).config, path)
    return path


def test_ratio_csv(runner, bipartite_config):
    result = runner.invoke(args=['ratio', str(bipartite_config)])
    assert result.exit_code == 0, result.output
    rows = list(csv.DictReader(io.StringIO(result.stdout)))
    by_name = {row['name']: row for row in rows}
    assert set(by_name) == {'Roundness', 'RandomZ', 'MetricBarycenter', 'LogRoundness'}
    assert float(by_name['MetricBarycenter']['value']) == pytest.approx(2 / 3 * 4 + 1)
    assert by_name['MetricBarycenter']['bound_side'] == 'upper'
    assert by_name['LogRoundness']['value'] == '-inf'


def test_ratio_json(runner, bipartite_config):
    result = runner.invoke(args=['ratio', str(bipartite_config), '--format', 'json'])
    assert result.exit_code == 0, result.output
    reports = json.loads(result.stdout)
    assert reports[0]['name'] == 'Roundness'
    assert reports[-1]['value'] == '-inf'


def test_ratio_on_linear_space_includes_solver(runner, tmp_path):
    path = tmp_path / 'line.json'
    path.write_text(json.dumps({
        'space': {'kind': 'RealLine'},
        'p': 2,
        'X': {'atoms': [0.0, 1.0], 'probs': ['1/2', '1/2']},
        'Y': {'atoms': [3.0]},
    }))
    result = runner.invoke(args=['ratio', str(path), '--format', 'json'])
    assert result.exit_code == 0, result.output
    reports = {r['name']: r for r in json.loads(result.stdout) if r['target'] is None}
    assert 'solver' in reports['Barycenter']


def test_ratio_breach_exits_with_one(runner, tmp_path, mocker):
    path = tmp_path / 'k33.json'
    dump_config(make_bipartite(3, 2).config, path)
    mocker.patch('modules.moduli.models.roundness_bound', return_value=1.0)
    result = runner.invoke(args=['ratio', str(path)])
    assert result.exit_code == 1


def test_ratio_rejects_malformed_config(runner, tmp_path):
    path = tmp_path / 'bad.json'
    data = config_to_dict(make_bipartite(2, 1).config)
    data['X']['atoms'][0] = 'L0'
    path.write_text(json.dumps(data))
    result = runner.invoke(args=['ratio', str(path)])
    assert result.exit_code == 2
    assert 'X.atoms[0]' in result.output


def test_ratio_rejects_degenerate_config(runner, tmp_path):
    path = tmp_path / 'same.json'
    path.write_text(json.dumps({'space': {'kind': 'RealLine'}, 'p': 1,
                                'X': {'atoms': [1.0]}, 'Y': {'atoms': [1.0]}}))
    assert runner.invoke(args=['ratio', str(path)]).exit_code == 2
