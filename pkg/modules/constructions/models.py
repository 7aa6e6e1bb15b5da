"""Extremal configurations with closed-form predicted ratios.

Each builder returns a ``NamedConstruction``: a configuration, the modulus
it exercises and the value that modulus should take on it. ``evaluate``
recomputes the modulus through ``modules.moduli`` and compares.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from modules.distributions.models import Config, finite_dist
from modules.exceptions import DomainError
from modules.moduli.models import (
    RatioName, barycenter_ratio, jensen_inf_ratio, jensen_ratio, metric_barycenter_ratio,
    roundness_ratio,
)
from modules.spaces.models import BipartiteGraph, ParallelogramS1, RealLine, WeightedLq

logger = logging.getLogger(__name__)

MAX_RADEMACHER_N = 14
EXACT_TOLERANCE = 1e-6
SOLVER_TOLERANCE = 1e-4
ONE_SIDED_TOLERANCE = 1e-7


class ConstructionId(str, Enum):
    FN_INF = 'Fn_inf'
    FN_Q = 'Fn_q'
    BIPARTITE = 'Bipartite'
    DISJOINT_BERNOULLI = 'DisjointBernoulli'
    JENSEN_TWO_POINT = 'JensenTwoPoint'
    JENSEN_EPS = 'JensenEps'
    JENSEN_BASIS = 'JensenBasis'
    JENSEN_RADEMACHER = 'JensenRademacher'
    SCHATTEN_PARALLELOGRAM = 'SchattenParallelogram'
    TWO_POINT = 'TwoPoint'
    EPS_ATOM = 'EpsAtom'


class PredictionKind(str, Enum):
    EXACT = 'ExactRatio'
    LOWER_BOUND = 'LowerBound'
    UPPER_BOUND_LIMIT = 'UpperBoundLimit'


@dataclass(frozen=True, eq=False)
class NamedConstruction:
    id: ConstructionId
    params: dict
    config: Config
    predicted: float
    prediction_kind: PredictionKind
    modulus: RatioName

    def __post_init__(self):
        if not math.isfinite(self.predicted):
            raise DomainError(f'{self.id.value}: predicted value is not finite')


@dataclass(frozen=True, eq=False)
class VerifyOutcome:
    construction: str
    params: dict
    modulus: str
    prediction_kind: str
    predicted: float
    computed: float
    slack: float
    tolerance: float
    passed: bool

    CSV_HEADER = ['construction', 'params', 'modulus', 'prediction_kind', 'predicted',
                  'computed', 'slack', 'tolerance', 'passed']

    def csv_row(self):
        params = ';'.join(f'{k}={v}' for k, v in self.params.items())
        return [self.construction, params, self.modulus, self.prediction_kind, self.predicted,
                self.computed, self.slack, self.tolerance, int(self.passed)]


def _check_int(name, value, lowest):
    if int(value) != value or value < lowest:
        raise DomainError(f'{name} must be an integer >= {lowest}, got {value}')
    return int(value)


def _check_p(p, lowest=1.0, strict=False):
    p = float(p)
    if (p <= lowest) if strict else (p < lowest):
        raise DomainError(f'p must be {">" if strict else ">="} {lowest:g}, got {p}')
    return p


def _uniform_config(space, xs, ys, p):
    return Config(space, finite_dist(space, xs), finite_dist(space, ys), p)


# ---------------------------------------------------------------------------
# Barycentric sharpness in l_inf and l_q
# ---------------------------------------------------------------------------

def fn_atoms(n):
    """Integer coordinates of the two n-point sets in the zero-sum hyperplane of R^{2n}."""
    big, small, rest = 3 * n - 2, -(n + 2), n - 2
    A = [[big if k == j else small for k in range(n)] + [rest] * n for j in range(n)]
    B = [[rest] * n + [big if k == j else small for k in range(n)] for j in range(n)]
    return A, B


def make_fn(n, q, p):
    n = _check_int('n', n, 2)
    p = _check_p(p)
    q = float(q)
    A, B = fn_atoms(n)
    space = WeightedLq.unit(q, 2 * n, zero_sum=True)
    config = _uniform_config(space, np.array(A, dtype=float), np.array(B, dtype=float), p)
    if math.isinf(q):
        predicted = 2 * ((3 * n - 2) / (2 * n)) ** p
        return NamedConstruction(ConstructionId.FN_INF, {'n': n, 'q': q, 'p': p}, config,
                                 predicted, PredictionKind.EXACT, RatioName.BARYCENTER)
    mass = (3 * n - 2) ** q + (n - 1) * (n + 2) ** q + n * (n - 2) ** q
    predicted = 2 * mass ** (p / q) / (2 * n) ** (p * (q + 1) / q)
    return NamedConstruction(ConstructionId.FN_Q, {'n': n, 'q': q, 'p': p}, config,
                             predicted, PredictionKind.LOWER_BOUND, RatioName.BARYCENTER)


def permute_fn(construction, sigma, rho):
    """Apply the coordinate permutation (sigma on the first half, rho on the second).

    Such permutations are linear isometries of the zero-sum hyperplane, so
    every moment is unchanged.
    """
    n = construction.config.space.dim // 2
    sigma, rho = list(sigma), list(rho)
    if sorted(sigma) != list(range(n)) or sorted(rho) != list(range(n)):
        raise DomainError('sigma and rho must be permutations of range(n)')
    order = np.array(sigma + [n + r for r in rho])
    c = construction.config
    X = finite_dist(c.space, c.X.atoms[:, order], c.X.probs)
    Y = finite_dist(c.space, c.Y.atoms[:, order], c.Y.probs)
    return NamedConstruction(construction.id, dict(construction.params), Config(c.space, X, Y, c.p),
                             construction.predicted, construction.prediction_kind,
                             construction.modulus)


# ---------------------------------------------------------------------------
# Metric, roundness and trace-class examples
# ---------------------------------------------------------------------------

def make_bipartite(n, p):
    n = _check_int('n', n, 1)
    p = _check_p(p)
    space = BipartiteGraph(n)
    config = _uniform_config(space, list(range(n)), list(range(n, 2 * n)), p)
    predicted = (n - 1) / n * 2 ** p + 1
    return NamedConstruction(ConstructionId.BIPARTITE, {'n': n, 'p': p}, config, predicted,
                             PredictionKind.EXACT, RatioName.METRIC_BARYCENTER)


def rademacher_matrix(n):
    """Rows r_1..r_n of the coordinate functions on {-1, 1}^n."""
    if n > MAX_RADEMACHER_N:
        raise DomainError(f'n={n} exceeds {MAX_RADEMACHER_N}: the cube has 2^n points')
    cube = np.array(list(itertools.product((-1.0, 1.0), repeat=n)))
    return cube.T


def make_disjoint_bernoulli(n, q, p):
    n = _check_int('n', n, 1)
    p = _check_p(p)
    q = float(q)
    if math.isinf(q):
        raise DomainError('the disjoint Bernoulli construction needs a finite q')
    r = rademacher_matrix(n)
    zeros = np.zeros_like(r)
    space = WeightedLq(q, np.full(2 * r.shape[1], 2.0 ** -n))
    xs = np.concatenate([r, zeros], axis=1)
    ys = np.concatenate([zeros, r], axis=1)
    config = _uniform_config(space, xs, ys, p)
    predicted = (1 - 1 / n) * 2 ** (1 + p * (q - 2) / q)
    return NamedConstruction(ConstructionId.DISJOINT_BERNOULLI, {'n': n, 'q': q, 'p': p}, config,
                             predicted, PredictionKind.EXACT, RatioName.ROUNDNESS)


def make_schatten_parallelogram(n, p):
    n = _check_int('n', n, 1)
    p = _check_p(p)
    space = ParallelogramS1(n)
    eye = np.eye(2 * n, dtype=complex)
    config = _uniform_config(space, eye[:n], 1j * eye[n:], p)
    predicted = (1 - 1 / n) * 2 ** (p / 2 + 1)
    return NamedConstruction(ConstructionId.SCHATTEN_PARALLELOGRAM, {'n': n, 'p': p}, config,
                             predicted, PredictionKind.EXACT, RatioName.ROUNDNESS)


def make_two_point(p, a=0.0, b=1.0):
    p = _check_p(p)
    if a == b:
        raise DomainError('the two points must differ')
    space = RealLine()
    config = _uniform_config(space, [a, b], [a, b], p)
    return NamedConstruction(ConstructionId.TWO_POINT, {'p': p, 'a': a, 'b': b}, config,
                             2 ** (2 - p), PredictionKind.EXACT, RatioName.BARYCENTER)


def _check_eps(eps):
    eps = float(eps)
    if not 0 < eps < 1:
        raise DomainError(f'eps must lie in (0, 1), got {eps}')
    return eps


def make_eps_atom(eps, p):
    """Mass eps at 1 and 1 - eps at 0, against the best single centre."""
    eps = _check_eps(eps)
    p = _check_p(p, strict=True)
    space = RealLine()
    X = finite_dist(space, [0.0, 1.0], [1 - eps, eps])
    e = 1 / (p - 1)
    predicted = 2 * (eps ** e + (1 - eps) ** e) ** (p - 1)
    return NamedConstruction(ConstructionId.EPS_ATOM, {'eps': eps, 'p': p}, Config(space, X, X, p),
                             predicted, PredictionKind.EXACT, RatioName.JENSEN_INF)


# ---------------------------------------------------------------------------
# Jensen examples
# ---------------------------------------------------------------------------

JENSEN_KINDS = ('TwoPoint', 'Eps', 'Basis', 'Rademacher')


def make_jensen(kind, p, eps=None, n=None, q=None):
    p = _check_p(p)
    if kind == 'TwoPoint':
        space = RealLine()
        X = finite_dist(space, [-1.0, 1.0])
        return _jensen(ConstructionId.JENSEN_TWO_POINT, {'p': p}, X, p, 2 ** (p - 1))
    if kind == 'Eps':
        eps = _check_eps(eps)
        space = RealLine()
        X = finite_dist(space, [0.0, 1.0], [1 - eps, eps])
        predicted = 2 * eps * (1 - eps) / ((1 - eps) * eps ** p + eps * (1 - eps) ** p)
        return _jensen(ConstructionId.JENSEN_EPS, {'eps': eps, 'p': p}, X, p, predicted)
    if kind in ('Basis', 'Rademacher'):
        n = _check_int('n', n, 1)
        q = float(q)
        if not 1 <= q < math.inf:
            raise DomainError(f'q must be a finite real >= 1, got {q}')
        if kind == 'Basis':
            space = WeightedLq.unit(q, n)
            vectors = np.eye(n)
            exponent, cid = p / q, ConstructionId.JENSEN_BASIS
        else:
            vectors = rademacher_matrix(n)
            space = WeightedLq(q, np.full(vectors.shape[1], 2.0 ** -n))
            exponent, cid = p * (q - 1) / q, ConstructionId.JENSEN_RADEMACHER
        X = finite_dist(space, np.concatenate([vectors, -vectors]))
        predicted = (n - 1) / n * 2 ** exponent + 2 ** p / (2 * n)
        return _jensen(cid, {'n': n, 'q': q, 'p': p}, X, p, predicted)
    raise DomainError(f'unknown Jensen construction {kind!r}; expected one of {JENSEN_KINDS}')


def _jensen(cid, params, X, p, predicted):
    return NamedConstruction(cid, params, Config(X.space, X, X, p), predicted,
                             PredictionKind.EXACT, RatioName.JENSEN)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

def compute(construction, **solver_options):
    """Evaluate the construction's modulus from scratch."""
    c = construction.config
    modulus = construction.modulus
    if modulus == RatioName.BARYCENTER:
        return barycenter_ratio(c, **solver_options).value
    if modulus == RatioName.METRIC_BARYCENTER:
        return metric_barycenter_ratio(c).value
    if modulus == RatioName.ROUNDNESS:
        return roundness_ratio(c).value
    if modulus == RatioName.JENSEN:
        return jensen_ratio(c.X, c.p).value
    if modulus == RatioName.JENSEN_INF:
        return jensen_inf_ratio(c.X, c.p, **solver_options).value
    raise DomainError(f'no evaluator for {modulus.value}')


def _uses_solver(construction):
    return construction.modulus in (RatioName.BARYCENTER, RatioName.JENSEN_INF)


def evaluate(construction, tolerance=None, exact_tolerance=EXACT_TOLERANCE,
             solver_tolerance=SOLVER_TOLERANCE, **solver_options):
    """Compare the predicted value with a fresh computation.

    Exact predictions pass within a relative tolerance (looser when the
    barycentric solver is involved); lower bounds pass when the computed
    value does not fall below them, upper-bound limits when it does not
    exceed them.
    """
    computed = compute(construction, **solver_options)
    predicted = construction.predicted
    kind = construction.prediction_kind
    if kind == PredictionKind.EXACT:
        if tolerance is None:
            tolerance = solver_tolerance if _uses_solver(construction) else exact_tolerance
        slack = abs(computed - predicted)
        passed = slack <= tolerance * max(1.0, abs(predicted))
    elif kind == PredictionKind.LOWER_BOUND:
        tolerance = ONE_SIDED_TOLERANCE if tolerance is None else tolerance
        slack = computed - predicted
        passed = slack >= -tolerance
    else:
        tolerance = ONE_SIDED_TOLERANCE if tolerance is None else tolerance
        slack = predicted - computed
        passed = slack >= -tolerance
    if not passed:
        logger.warning('%s %s: predicted %.17g, computed %.17g', construction.id.value,
                       construction.params, predicted, computed)
    return VerifyOutcome(construction.id.value, dict(construction.params),
                         construction.modulus.value, kind.value, predicted, computed, slack,
                         tolerance, passed)


BUILDERS = {
    'fn': make_fn,
    'bipartite': make_bipartite,
    'disjoint-bernoulli': make_disjoint_bernoulli,
    'jensen': make_jensen,
    'schatten-parallelogram': make_schatten_parallelogram,
    'two-point': make_two_point,
    'eps-atom': make_eps_atom,
}
