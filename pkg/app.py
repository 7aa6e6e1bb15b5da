import logging
import sys

from flask import Flask
from flask.cli import FlaskGroup
from flask.logging import default_handler

from modules.cli.commands import sweep_bp
from modules.constants.commands import constants_bp
from modules.constructions.commands import constructions_bp
from modules.moduli.commands import moduli_bp
from modules.scalar_checks.commands import scalar_checks_bp
from modules.search.commands import search_bp


def create_app(overrides=None):
    app = Flask(__name__)
    app.config.from_mapping(
        THREADS=1,
        SOLVER_MAX_ITER=50_000,
        SOLVER_PATIENCE=2_000,
        VERIFY_TOLERANCE=1e-6,
        SOLVER_TOLERANCE=1e-4,
        RUNS_LEDGER='search_runs.json',
        LOG_LEVEL='WARNING',
    )
    # MODULI_THREADS=8 and friends override the defaults above
    app.config.from_prefixed_env('MODULI')
    if overrides:
        app.config.update(overrides)

    # Library modules log under "modules"; route them through Flask's handler
    level = app.config['LOG_LEVEL']
    library_logger = logging.getLogger('modules')
    if default_handler not in library_logger.handlers:
        library_logger.addHandler(default_handler)
    library_logger.setLevel(level)
    app.logger.setLevel(level)

    for blueprint in (constants_bp, moduli_bp, constructions_bp, scalar_checks_bp, search_bp,
                      sweep_bp):
        app.register_blueprint(blueprint)
    return app


cli = FlaskGroup(create_app=create_app, add_default_commands=False, add_version_option=False,
                 help='Moment inequalities between independent random vectors in Banach spaces.')


def main(argv=None):
    """Run one command and return its exit status (0 ok, 1 tolerance breach, 2 bad input)."""
    try:
        cli.main(args=argv, prog_name='moduli')
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
