"""JSON encoding of distributions and configurations.

Complex coordinates are written as ``[re, im]`` pairs; a plain real array
of exactly the point shape is also accepted on input. Probabilities may be
JSON numbers or exact decimal/fraction strings such as ``"0.125"`` or
``"1/3"``.
"""
import json
from fractions import Fraction

import numpy as np

from modules.exceptions import ModuliError, SerializationError
from modules.spaces.models import BipartiteGraph, RealLine, Snowflake, Vertex, space_from_dict
from .models import Config, FiniteDist


def _point_space(space):
    while isinstance(space, Snowflake):
        space = space.base
    return space


def point_to_json(space, atom):
    base = _point_space(space)
    if isinstance(base, BipartiteGraph):
        return int(atom)
    if isinstance(base, RealLine):
        return float(atom)
    atom = np.asarray(atom, dtype=complex)
    return np.stack([atom.real, atom.imag], axis=-1).tolist()


def point_from_json(space, data, field):
    base = _point_space(space)
    if isinstance(base, BipartiteGraph):
        if isinstance(data, dict):
            try:
                return Vertex(data['side'], int(data['index']))
            except (KeyError, TypeError, ValueError) as exc:
                raise SerializationError(field, f'bad vertex: {exc}') from None
        if isinstance(data, bool) or not isinstance(data, int):
            raise SerializationError(field, f'expected a vertex id, got {data!r}')
        return data
    if isinstance(base, RealLine):
        if isinstance(data, bool) or not isinstance(data, (int, float)):
            raise SerializationError(field, f'expected a real number, got {data!r}')
        return float(data)
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise SerializationError(field, 'coordinates must be numbers or [re, im] pairs') from None
    shape = base.point_shape
    if arr.shape == shape:
        return arr.astype(complex)
    if arr.shape == shape + (2,):
        return arr[..., 0] + 1j * arr[..., 1]
    raise SerializationError(field, f'expected shape {shape} or {shape + (2,)}, got {arr.shape}')


def parse_probability(value, field):
    if isinstance(value, bool):
        raise SerializationError(field, 'probability cannot be a boolean')
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise SerializationError(field, f'not a probability: {value!r}')


def dist_to_dict(X, include_space=True):
    data = {
        'atoms': [point_to_json(X.space, atom) for atom in X.atoms],
        'probs': [float(p) for p in X.probs],
    }
    if include_space:
        data = {'space': X.space.to_dict(), **data}
    return data


def dist_from_dict(data, space=None, field='dist'):
    if not isinstance(data, dict):
        raise SerializationError(field, 'expected an object')
    if space is None:
        space = space_from_dict(data.get('space'), f'{field}.space')
    atoms = data.get('atoms')
    if not isinstance(atoms, list) or not atoms:
        raise SerializationError(f'{field}.atoms', 'expected a nonempty list')
    points = [point_from_json(space, a, f'{field}.atoms[{i}]') for i, a in enumerate(atoms)]
    probs = data.get('probs')
    if probs is None:
        probs = [1.0 / len(points)] * len(points)
    elif not isinstance(probs, list):
        raise SerializationError(f'{field}.probs', 'expected a list')
    else:
        probs = [parse_probability(v, f'{field}.probs[{i}]') for i, v in enumerate(probs)]
    try:
        return FiniteDist(space, points, probs)
    except ModuliError as exc:
        raise SerializationError(field, str(exc)) from None


def config_to_dict(config):
    return {
        'space': config.space.to_dict(),
        'p': config.p,
        'X': dist_to_dict(config.X, include_space=False),
        'Y': dist_to_dict(config.Y, include_space=False),
    }


def config_from_dict(data):
    if not isinstance(data, dict):
        raise SerializationError('config', 'expected an object')
    space = space_from_dict(data.get('space'), 'space')
    X = dist_from_dict(data.get('X'), space, 'X')
    Y = dist_from_dict(data.get('Y'), space, 'Y')
    if 'p' not in data:
        raise SerializationError('p', 'missing')
    try:
        return Config(space, X, Y, float(data['p']))
    except (TypeError, ValueError) as exc:
        raise SerializationError('p', str(exc)) from None


def load_config(path):
    """Read a configuration file; a saved search result is unwrapped to its ``best_config``."""
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise SerializationError('config', f'invalid JSON at line {exc.lineno}: {exc.msg}') from None
    if isinstance(data, dict) and 'best_config' in data:
        data = data['best_config']
    return config_from_dict(data)


def dump_config(config, path):
    with open(path, 'w') as f:
        json.dump(config_to_dict(config), f, indent=4)
