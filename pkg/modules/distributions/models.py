"""Finitely supported distributions and their exact moment functionals.

Every expectation reduces to a finite double sum over atom pairs, computed
from the space's distance matrix.
"""
import math
from dataclasses import dataclass

import numpy as np

from modules.exceptions import DomainError, SpaceMismatchError
from modules.spaces.models import Space

PROBABILITY_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class FiniteDist:
    space: Space
    atoms: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        atoms = self.space.coerce_many(list(self.atoms))
        probs = np.asarray(self.probs, dtype=float).reshape(-1)
        if atoms.shape[0] == 0:
            raise DomainError('a distribution needs at least one atom')
        if probs.shape[0] != atoms.shape[0]:
            raise DomainError(f'{atoms.shape[0]} atoms but {probs.shape[0]} probabilities')
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise DomainError('probabilities must be finite and nonnegative')
        total = math.fsum(probs)
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise DomainError(f'probabilities sum to {total!r}, not 1')
        object.__setattr__(self, 'atoms', atoms)
        object.__setattr__(self, 'probs', probs)

    def __len__(self):
        return self.atoms.shape[0]


@dataclass(frozen=True, eq=False)
class Config:
    """A pair of independent distributions on one space and a moment exponent."""
    space: Space
    X: FiniteDist
    Y: FiniteDist
    p: float

    def __post_init__(self):
        if self.X.space != self.space or self.Y.space != self.space:
            raise SpaceMismatchError('X and Y must live on the configuration space')
        object.__setattr__(self, 'p', _check_p(self.p))


def _check_p(p):
    p = float(p)
    if not p > 0 or math.isinf(p):
        raise DomainError(f'moment exponent must be positive and finite, got {p}')
    return p


def _same_space(X, Y):
    if X.space != Y.space:
        raise SpaceMismatchError(f'{X.space.kind} and {Y.space.kind} distributions cannot be combined')


def finite_dist(space, atoms, probs=None):
    """Build a FiniteDist; uniform weights when ``probs`` is omitted."""
    atoms = list(atoms)
    if probs is None:
        probs = np.full(len(atoms), 1.0 / len(atoms)) if atoms else []
    return FiniteDist(space, atoms, probs)


def point_mass(space, atom):
    return FiniteDist(space, [atom], [1.0])


def make_config(X, Y, p):
    _same_space(X, Y)
    return Config(X.space, X, Y, p)


def _atom_key(atom):
    # adding zero folds -0.0 into 0.0 so equal atoms share a key
    return np.ascontiguousarray(atom + 0).tobytes()


def mixture(X, Y):
    """Half-half mixture; atoms that coincide exactly are merged."""
    _same_space(X, Y)
    index = {}
    atoms = []
    probs = []
    for dist in (X, Y):
        for atom, prob in zip(dist.atoms, dist.probs):
            key = _atom_key(atom)
            if key in index:
                probs[index[key]] += 0.5 * prob
            else:
                index[key] = len(atoms)
                atoms.append(atom)
                probs.append(0.5 * prob)
    return FiniteDist(X.space, atoms, probs)


def moments_about(X, points, p):
    """E d(X, z)^p for every z in a stack of coerced points."""
    p = _check_p(p)
    distances = X.space.pairwise(X.atoms, points)
    return X.probs @ distances ** p


def cross_moment(X, Y, p):
    """E d(X, Y)^p for independent X and Y."""
    _same_space(X, Y)
    p = _check_p(p)
    distances = X.space.pairwise(X.atoms, Y.atoms)
    return float(X.probs @ distances ** p @ Y.probs)


def self_moment(X, p):
    return cross_moment(X, X, p)


def mean(X):
    if not X.space.linear:
        raise SpaceMismatchError(f'{X.space.kind} has no linear structure')
    return np.tensordot(X.probs, X.atoms, axes=1)


def centered_moment(X, p):
    """E d(X, E[X])^p."""
    centre = mean(X)
    return float(moments_about(X, centre[None], p)[0])


def log_cross_moment(X, Y):
    """E log d(X, Y); ``-inf`` once a coinciding pair carries positive mass."""
    _same_space(X, Y)
    distances = X.space.pairwise(X.atoms, Y.atoms)
    joint = np.outer(X.probs, Y.probs)
    charged = joint > 0
    if np.any(distances[charged] == 0):
        return -math.inf
    return float(np.sum(joint[charged] * np.log(distances[charged])))
