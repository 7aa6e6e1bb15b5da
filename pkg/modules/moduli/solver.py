"""Multi-start projected subgradient minimisation of the barycentric objective.

The objective z -> E d(X, z)^p + E d(Y, z)^p is convex for p >= 1 on a
normed space, so every start converges towards the same infimum; several
starts only guard against slow progress on nonsmooth kinks. Steps are
normalised subgradients with length s0 / sqrt(k), s0 the support diameter.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from modules.distributions.models import mean, moments_about
from modules.exceptions import DomainError, SpaceMismatchError

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 50_000
DEFAULT_PATIENCE = 2_000
RELATIVE_IMPROVEMENT = 1e-12
POLISH_MAX_DIMENSION = 64


@dataclass(frozen=True, eq=False)
class BarycenterCert:
    z_star: np.ndarray
    value: float
    iterations: int
    starts: int
    best_start: str

    def to_dict(self):
        z = np.asarray(self.z_star)
        if np.iscomplexobj(z):
            z_json = np.stack([z.real, z.imag], axis=-1).tolist()
        else:
            z_json = z.tolist()
        return {'z_star': z_json, 'value': self.value, 'iterations': self.iterations,
                'starts': self.starts, 'best_start': self.best_start}


def barycenter_objective(c, z):
    """E d(X, z)^p + E d(Y, z)^p at a single point z."""
    z = c.space.coerce(z)[None]
    return float(moments_about(c.X, z, c.p)[0] + moments_about(c.Y, z, c.p)[0])


class _Objective:
    """Value and subgradient over the pooled support of X and Y."""

    def __init__(self, c):
        self.space = c.space
        self.p = c.p
        self.points = np.concatenate([c.X.atoms, c.Y.atoms])
        self.weights = np.concatenate([c.X.probs, c.Y.probs])

    def value(self, z):
        return float(self.weights @ self.space.norms(self.points - z) ** self.p)

    def evaluate(self, z):
        diffs = self.points - z
        norms = self.space.norms(diffs)
        value = float(self.weights @ norms ** self.p)
        coef = self.weights * self.p * norms ** (self.p - 1)
        grad = -np.tensordot(coef, self.space.subgradients(diffs), axes=1)
        return value, self.space.project(grad)

    def diameter(self):
        return float(self.space.pairwise(self.points, self.points).max())


def _descend(objective, z0, step0, max_iter, patience):
    space = objective.space
    z = space.project(np.array(z0, dtype=space.dtype))
    value, grad = objective.evaluate(z)
    best_value, best_z = value, z
    stall = 0
    k = 0
    while k < max_iter:
        k += 1
        size = math.sqrt(float(np.sum(np.abs(grad) ** 2)))
        if size == 0 or step0 == 0:
            break
        z = space.project(z - (step0 / math.sqrt(k)) * grad / size)
        value, grad = objective.evaluate(z)
        if value < best_value:
            improved = best_value - value > RELATIVE_IMPROVEMENT * max(abs(best_value), 1e-300)
            best_value, best_z = value, z
            stall = 0 if improved else stall + 1
        else:
            stall += 1
        if stall >= patience:
            break
    return best_value, best_z, k


def _to_real(z):
    z = np.asarray(z)
    if np.iscomplexobj(z):
        return np.concatenate([z.real.ravel(), z.imag.ravel()])
    return np.atleast_1d(z).astype(float).ravel()


def _from_real(vec, template):
    if np.iscomplexobj(template):
        half = vec.size // 2
        return (vec[:half] + 1j * vec[half:]).reshape(template.shape)
    return vec.reshape(template.shape)


def _polish(objective, z, value):
    space = objective.space

    def f(vec):
        return objective.value(space.project(_from_real(vec, z)))

    result = minimize(f, _to_real(z), method='Powell',
                      options={'xtol': 1e-10, 'ftol': 1e-15, 'maxfev': 20_000})
    candidate = space.project(_from_real(result.x, z))
    candidate_value = objective.value(candidate)
    if candidate_value < value:
        logger.debug('polish lowered the objective from %.17g to %.17g', value, candidate_value)
        return candidate_value, candidate
    return value, z


def starting_points(c):
    """Labelled starts: every atom of X then Y, the mixture mean, the origin."""
    starts = []
    for i, atom in enumerate(np.concatenate([c.X.atoms, c.Y.atoms])):
        starts.append((f'Atom({i})', atom))
    starts.append(('MixtureMean', 0.5 * mean(c.X) + 0.5 * mean(c.Y)))
    starts.append(('Zero', c.space.zero()))
    return starts


def minimize_barycenter(c, max_iter=DEFAULT_MAX_ITER, patience=DEFAULT_PATIENCE,
                        workers=1, polish=True):
    """Estimate inf_z E d(X, z)^p + E d(Y, z)^p and return a BarycenterCert."""
    if not c.space.linear:
        raise SpaceMismatchError(f'{c.space.kind} has no linear structure to optimise over')
    if c.p < 1:
        raise DomainError(f'the barycentric objective is not convex for p={c.p} < 1')
    objective = _Objective(c)
    step0 = objective.diameter()
    starts = starting_points(c)

    def run(start):
        label, z0 = start
        value, z, iterations = _descend(objective, z0, step0, max_iter, patience)
        logger.debug('start %s: %.17g after %d iterations', label, value, iterations)
        return value, z, iterations

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(start) for start in starts]

    # strict comparison keeps the lowest index among ties
    best = 0
    for index, result in enumerate(results):
        if result[0] < results[best][0]:
            best = index
    value, z, iterations = results[best]
    if polish and _to_real(z).size <= POLISH_MAX_DIMENSION:
        value, z = _polish(objective, z, value)

    value = barycenter_objective(c, z)
    logger.info('barycenter minimum %.17g from start %s', value, starts[best][0])
    return BarycenterCert(z, value, iterations, len(starts), starts[best][0])
