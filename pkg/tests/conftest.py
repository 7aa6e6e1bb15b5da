import pytest

from app import create_app


@pytest.fixture
def app(tmp_path):
    app = create_app({
        'TESTING': True,
        'SOLVER_MAX_ITER': 20_000,
        'SOLVER_PATIENCE': 1_000,
        'RUNS_LEDGER': str(tmp_path / 'runs.json'),
    })
    yield app


@pytest.fixture
def runner(app):
    return app.test_cli_runner()
