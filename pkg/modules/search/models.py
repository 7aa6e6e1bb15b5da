"""Seeded hill-climbing over finite configurations to push a ratio upwards.

Every value a search reports is an empirical lower bound on the modulus,
never a proof of the modulus itself.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from modules.constructions.models import make_disjoint_bernoulli, make_schatten_parallelogram
from modules.distributions.codec import config_to_dict
from modules.distributions.models import Config, FiniteDist, cross_moment
from modules.exceptions import DegenerateRatioError, DomainError, SpaceMismatchError
from modules.moduli.models import BOUND_TOLERANCE, barycenter_ratio, mixture_ratio, roundness_ratio
from modules.spaces.models import BipartiteGraph, ParallelogramS1, Schatten, Snowflake, WeightedLq

logger = logging.getLogger(__name__)

EMPIRICAL_LABEL = 'empirical lower bound'
SEED_LIMIT = 2 ** 64

INITIAL_SCALE = 0.5
MIN_SCALE, MAX_SCALE = 1e-6, 10.0
GROW, SHRINK = 1.5, 0.9
PERTURB_SHARE, REWEIGHT_SHARE = 0.6, 0.25
DIRICHLET_CONCENTRATION = 100.0
DIRICHLET_FLOOR = 1e-3
MAX_WARM_BERNOULLI_N = 6
MAX_INITIAL_DRAWS = 100
CERTIFY_DRIFT = 1e-10


class SearchObjective(str, Enum):
    ROUNDNESS = 'Roundness'
    BARYCENTER = 'Barycenter'
    MIXTURE = 'Mixture'


@dataclass(frozen=True, eq=False)
class SearchSpec:
    space: object
    objective: SearchObjective
    p: float
    n_atoms_x: int
    n_atoms_y: int
    budget: int
    restarts: int = 1
    seed: int = 0
    warm_start: bool = True
    solver_options: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'objective', SearchObjective(self.objective))
        p = float(self.p)
        if not 0 < p < math.inf:
            raise DomainError(f'p must be positive and finite, got {p}')
        object.__setattr__(self, 'p', p)
        for name, lowest in (('n_atoms_x', 1), ('n_atoms_y', 1), ('budget', 1), ('restarts', 1),
                             ('seed', 0)):
            value = getattr(self, name)
            if int(value) != value or value < lowest:
                raise DomainError(f'{name} must be an integer >= {lowest}, got {value}')
            object.__setattr__(self, name, int(value))
        if self.seed >= SEED_LIMIT:
            raise DomainError(f'seed must fit in 64 bits, got {self.seed}')
        if self.objective is not SearchObjective.ROUNDNESS and not self.space.linear:
            raise SpaceMismatchError(f'{self.objective.value} search needs a linear space')
        if self.objective is SearchObjective.BARYCENTER and p < 1:
            raise DomainError('barycenter search needs p >= 1')

    def to_dict(self):
        return {
            'space': self.space.to_dict(),
            'objective': self.objective.value,
            'p': self.p,
            'n_atoms_x': self.n_atoms_x,
            'n_atoms_y': self.n_atoms_y,
            'budget': self.budget,
            'restarts': self.restarts,
            'seed': self.seed,
            'warm_start': self.warm_start,
        }


@dataclass(frozen=True, eq=False)
class SearchResult:
    spec: SearchSpec
    best_config: Config
    best_ratio: float
    trace: list
    seed: int
    restart: int
    warm_start_ratio: float = None
    bound: float = None
    label: str = EMPIRICAL_LABEL

    @property
    def within_bound(self):
        """False only when the ratio breaks a proven upper bound, which means a bug."""
        return self.bound is None or self.best_ratio <= self.bound + BOUND_TOLERANCE * max(1.0, self.bound)

    def to_dict(self):
        return {
            'label': self.label,
            'objective': self.spec.objective.value,
            'p': self.spec.p,
            'seed': self.seed,
            'restart': self.restart,
            'best_ratio': self.best_ratio,
            'warm_start_ratio': self.warm_start_ratio,
            'upper_bound': self.bound,
            'trace': [[i, r] for i, r in self.trace],
            'best_config': config_to_dict(self.best_config),
        }


@dataclass(frozen=True, eq=False)
class _State:
    xs: np.ndarray
    px: np.ndarray
    ys: np.ndarray
    py: np.ndarray

    def side(self, index):
        return (self.xs, self.px) if index == 0 else (self.ys, self.py)

    def with_side(self, index, atoms, probs):
        if index == 0:
            return _State(atoms, probs, self.ys, self.py)
        return _State(self.xs, self.px, atoms, probs)


@dataclass(frozen=True, eq=False)
class _Climb:
    restart: int
    state: _State
    value: float
    trace: list
    warm_start_ratio: float


# ---------------------------------------------------------------------------
# Objective
# ---------------------------------------------------------------------------

def _objective_report(objective, config, solver_options):
    if objective is SearchObjective.ROUNDNESS:
        return roundness_ratio(config)
    if objective is SearchObjective.MIXTURE:
        return mixture_ratio(config)
    return barycenter_ratio(config, **solver_options)


def certify_ratio(config, objective, **solver_options):
    """Recompute the objective from scratch through the moduli module."""
    return _objective_report(SearchObjective(objective), config, solver_options).value


def _config(spec, state):
    space = spec.space
    return Config(space, FiniteDist(space, state.xs, state.px),
                  FiniteDist(space, state.ys, state.py), spec.p)


def _score(spec, state):
    try:
        return _objective_report(spec.objective, _config(spec, state), spec.solver_options).value
    except DegenerateRatioError:
        return -math.inf


# ---------------------------------------------------------------------------
# Geometry helpers
# ---------------------------------------------------------------------------

def _base(space):
    while isinstance(space, Snowflake):
        space = space.base
    return space


def _snowflake_power(space):
    power = 1.0
    while isinstance(space, Snowflake):
        power *= space.alpha
        space = space.base
    return power


def _complex_coordinates(base):
    return isinstance(base, (Schatten, ParallelogramS1))


def _noise(base, rng, shape, scale):
    step = scale * rng.normal(size=shape)
    if _complex_coordinates(base):
        step = step + 1j * scale * rng.normal(size=shape)
    return step


def _random_atoms(base, rng, count):
    if isinstance(base, BipartiteGraph):
        return rng.integers(0, 2 * base.n, size=count)
    atoms = _noise(base, rng, (count,) + base.point_shape, 1.0)
    return base.project(atoms.astype(base.dtype))


def _random_state(spec, rng):
    base = _base(spec.space)
    nx = int(rng.integers(1, spec.n_atoms_x + 1))
    ny = int(rng.integers(1, spec.n_atoms_y + 1))
    return _State(_random_atoms(base, rng, nx), rng.dirichlet(np.ones(nx)),
                  _random_atoms(base, rng, ny), rng.dirichlet(np.ones(ny)))


def _warm_state(spec):
    """Atoms of the library construction matching the space, when one fits the bounds."""
    if spec.objective is not SearchObjective.ROUNDNESS:
        return None
    space = spec.space
    fewest = min(spec.n_atoms_x, spec.n_atoms_y)
    if isinstance(space, WeightedLq) and math.isfinite(space.q):
        if space.zero_sum or len(set(space.weights)) != 1 or space.weights[0] == 0:
            return None
        n = min(MAX_WARM_BERNOULLI_N, int(math.log2(fewest)), int(math.log2(space.dim)) - 1)
        if n < 2:
            return None
        built = make_disjoint_bernoulli(n, space.q, spec.p).config
        pad = space.dim - built.space.dim
        xs, ys = (np.pad(atoms, ((0, 0), (0, pad))) for atoms in (built.X.atoms, built.Y.atoms))
    elif isinstance(space, ParallelogramS1) and space.n <= fewest:
        built = make_schatten_parallelogram(space.n, spec.p).config
        xs, ys = built.X.atoms, built.Y.atoms
    else:
        return None
    return _State(xs, built.X.probs, ys, built.Y.probs)


def _normalized(spec, state):
    """Rescale to unit cross moment; returns the state and its recomputed score."""
    base = _base(spec.space)
    if base.linear:
        config = _config(spec, state)
        cross = cross_moment(config.X, config.Y, spec.p)
        if cross > 0 and math.isfinite(cross):
            factor = cross ** (-1.0 / (spec.p * _snowflake_power(spec.space)))
            state = _State(state.xs * factor, state.px, state.ys * factor, state.py)
    return state, _score(spec, state)


# ---------------------------------------------------------------------------
# Moves
# ---------------------------------------------------------------------------

def _perturb(base, atoms, rng, scale):
    atoms = atoms.copy()
    i = int(rng.integers(len(atoms)))
    if isinstance(base, BipartiteGraph):
        atoms[i] = rng.integers(0, 2 * base.n)
        return atoms
    flat = atoms.reshape(len(atoms), -1)
    j = int(rng.integers(flat.shape[1]))
    step = scale * rng.normal()
    if _complex_coordinates(base) and rng.random() < 0.5:
        step = 1j * step
    flat[i, j] += step
    return base.project(atoms)


def _reweight(probs, rng):
    return rng.dirichlet(probs * DIRICHLET_CONCENTRATION + DIRICHLET_FLOOR)


def _resize(base, atoms, probs, bound, rng, scale):
    if rng.random() < 0.5 and len(atoms) < bound:
        i = int(rng.integers(len(atoms)))
        if isinstance(base, BipartiteGraph):
            extra = rng.integers(0, 2 * base.n, size=1)
        else:
            extra = base.project(atoms[i:i + 1] + _noise(base, rng, atoms[i:i + 1].shape, scale))
        probs = np.append(probs, 0.5 * probs[i])
        probs[i] *= 0.5
        return np.concatenate([atoms, extra.astype(atoms.dtype)]), probs
    if len(atoms) > 1:
        i = int(rng.integers(len(atoms)))
        probs = np.delete(probs, i)
        total = probs.sum()
        probs = probs / total if total > 0 else np.full(len(probs), 1.0 / len(probs))
        return np.delete(atoms, i, axis=0), probs
    return atoms, probs


def _propose(spec, state, rng, scale):
    base = _base(spec.space)
    index = int(rng.integers(2))
    atoms, probs = state.side(index)
    draw = rng.random()
    if draw < PERTURB_SHARE:
        atoms = _perturb(base, atoms, rng, scale)
    elif draw < PERTURB_SHARE + REWEIGHT_SHARE:
        probs = _reweight(probs, rng)
    else:
        bound = spec.n_atoms_x if index == 0 else spec.n_atoms_y
        atoms, probs = _resize(base, atoms, probs, bound, rng, scale)
    return state.with_side(index, atoms, probs)


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------

def _initial(spec, rng, restart):
    if restart == 0 and spec.warm_start:
        warm = _warm_state(spec)
        if warm is not None:
            state, value = _normalized(spec, warm)
            logger.debug('restart 0 warm-started at %.12g', value)
            return state, value, value
    for _ in range(MAX_INITIAL_DRAWS):
        state, value = _normalized(spec, _random_state(spec, rng))
        if math.isfinite(value):
            return state, value, None
    raise DomainError('could not draw a non-degenerate starting configuration')


def _climb(spec, restart):
    rng = np.random.default_rng([spec.seed, restart])
    state, value, warm = _initial(spec, rng, restart)
    trace = [(0, value)]
    scale = INITIAL_SCALE
    for iteration in range(1, spec.budget + 1):
        candidate = _propose(spec, state, rng, scale)
        if _score(spec, candidate) > value:
            state, value = _normalized(spec, candidate)
            # rescaling may round the ratio down in the last bits
            trace.append((iteration, max(value, trace[-1][1])))
            scale = min(scale * GROW, MAX_SCALE)
            logger.debug('restart %d iteration %d accepted %.12g', restart, iteration, value)
        else:
            scale = max(scale * SHRINK, MIN_SCALE)
    logger.debug('restart %d finished at %.12g', restart, value)
    return _Climb(restart, state, value, trace, warm)


def run_search(spec, workers=1):
    """Hill-climb ``spec.restarts`` times and certify the best configuration found."""
    if workers > 1 and spec.restarts > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            climbs = list(pool.map(lambda r: _climb(spec, r), range(spec.restarts)))
    else:
        climbs = [_climb(spec, r) for r in range(spec.restarts)]
    best = max(climbs, key=lambda climb: climb.value)
    config = _config(spec, best.state)
    report = _objective_report(spec.objective, config, spec.solver_options)
    best_ratio = report.value
    if abs(best_ratio - best.value) > CERTIFY_DRIFT * max(1.0, abs(best_ratio)):
        logger.warning('certified ratio %.17g drifted from the search value %.17g',
                       best_ratio, best.value)
    logger.info('search %s p=%g: best %.12g (%s) from restart %d', spec.objective.value, spec.p,
                best_ratio, EMPIRICAL_LABEL, best.restart)
    return SearchResult(spec, config, best_ratio, best.trace, spec.seed, best.restart,
                        climbs[0].warm_start_ratio, report.bound)
