"""JSON ledger of finished search runs."""
import datetime
import json
import os
import uuid

from modules.cli.formatting import jsonable

DEFAULT_LEDGER = 'search_runs.json'


def _ensure_ledger_exists(path=DEFAULT_LEDGER):
    if not os.path.exists(path):
        with open(path, 'w') as f:
            json.dump([], f)
        return
    # an empty, unreadable or non-list file starts over as an empty ledger
    try:
        with open(path, 'r') as f:
            data = json.load(f)
        if not isinstance(data, list):
            raise ValueError('ledger is not a list')
    except (json.JSONDecodeError, ValueError):
        with open(path, 'w') as f:
            json.dump([], f)


def _write(runs, path):
    with open(path, 'w') as f:
        json.dump(jsonable(runs), f, indent=4)


def get_all_runs(path=DEFAULT_LEDGER):
    _ensure_ledger_exists(path)
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except (json.JSONDecodeError, FileNotFoundError):
        return []


def add_run(result, path=DEFAULT_LEDGER):
    """Append a SearchResult; returns the stored record."""
    runs = get_all_runs(path)
    record = {
        'id': str(uuid.uuid4()),
        'created': datetime.datetime.now(datetime.timezone.utc).isoformat(timespec='seconds'),
        'spec': result.spec.to_dict(),
        'best_ratio': result.best_ratio,
        'seed': result.seed,
        'result': result.to_dict(),
    }
    runs.append(record)
    _write(runs, path)
    return record


def get_run_by_id(run_id, path=DEFAULT_LEDGER):
    for run in get_all_runs(path):
        if run['id'] == run_id:
            return run
    return None


def delete_run(run_id, path=DEFAULT_LEDGER):
    runs = get_all_runs(path)
    kept = [run for run in runs if run['id'] != run_id]
    if len(kept) < len(runs):
        _write(kept, path)
        return True
    return False
