import logging

from flask.logging import default_handler

from app import create_app


def test_defaults_and_overrides():
    app = create_app({'THREADS': 4})
    assert app.config['THREADS'] == 4
    assert app.config['SOLVER_MAX_ITER'] == 50_000
    assert app.config['RUNS_LEDGER'] == 'search_runs.json'


def test_prefixed_environment(monkeypatch):
    monkeypatch.setenv('MODULI_THREADS', '8')
    monkeypatch.setenv('MODULI_LOG_LEVEL', 'DEBUG')
    app = create_app()
    assert app.config['THREADS'] == 8
    assert logging.getLogger('modules').level == logging.DEBUG
    create_app({'LOG_LEVEL': 'WARNING'})


def test_library_logger_uses_flask_handler(app):
    handlers = logging.getLogger('modules').handlers
    assert handlers.count(default_handler) == 1
    create_app()
    assert logging.getLogger('modules').handlers.count(default_handler) == 1


def test_commands_are_registered(runner):
    result = runner.invoke(args=['--help'])
    assert result.exit_code == 0
    for command in ('constants', 'ratio', 'verify', 'check', 'search', 'runs', 'sweep'):
        assert command in result.output
    sweep = runner.invoke(args=['sweep', '--help'])
    assert 'verify' in sweep.output
    assert 'ratio' in sweep.output
