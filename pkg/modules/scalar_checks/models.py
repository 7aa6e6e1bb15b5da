"""Scalar and Hilbert-space inequalities checked on finite data.

Covers the sub-additivity of E|X+Y|^q for q >= 3, the log-moment identities
used for L_0 embeddings, the Gaussian smoothing step behind mean-zero
roundness, and the Parseval inequalities for kernels on product measures.
Every check returns a ``CheckResult``; ``run_suite`` sweeps one of them over
a grid or a set of seeds and collects the violations.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy import integrate

from modules.exceptions import DomainError
from .quadrature import quad_log_singular

logger = logging.getLogger(__name__)

PROBABILITY_TOLERANCE = 1e-12
CENTERING_TOLERANCE = 1e-12
SUBADDITIVITY_TOLERANCE = 1e-10
SMOOTHING_TOLERANCE = 1e-12
HILBERT_TOLERANCE = 1e-10
LOG_MOMENT_TOLERANCE = 1e-6
LAPLACE_CUTOFF = 1e-12
LAPLACE_TAIL_DECAY = 30.0


class CheckResult(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

def _check_probs(probs, size, name):
    probs = np.asarray(probs, dtype=float).reshape(-1)
    if probs.shape[0] != size:
        raise DomainError(f'{name}: {size} points but {probs.shape[0]} probabilities')
    if size == 0:
        raise DomainError(f'{name}: needs at least one point')
    if np.any(probs < 0) or not np.all(np.isfinite(probs)):
        raise DomainError(f'{name}: probabilities must be finite and nonnegative')
    total = math.fsum(probs)
    if abs(total - 1.0) > PROBABILITY_TOLERANCE:
        raise DomainError(f'{name}: probabilities sum to {total!r}, not 1')
    return probs


@dataclass(frozen=True, eq=False)
class ScalarDist:
    atoms: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float).reshape(-1)
        if not np.all(np.isfinite(atoms)):
            raise DomainError('atoms must be finite reals')
        object.__setattr__(self, 'atoms', atoms)
        object.__setattr__(self, 'probs', _check_probs(self.probs, atoms.shape[0], 'ScalarDist'))

    def expect(self, values):
        return float(np.dot(self.probs, values))

    @property
    def mean(self):
        return self.expect(self.atoms)


def scalar_dist(atoms, probs=None):
    """Uniform over ``atoms`` unless ``probs`` is given."""
    atoms = np.asarray(atoms, dtype=float).reshape(-1)
    if probs is None:
        probs = np.full(atoms.shape[0], 1.0 / max(atoms.shape[0], 1))
    return ScalarDist(atoms, probs)


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """A complex function on a product of two finite probability spaces."""
    mu: np.ndarray
    nu: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 2:
            raise DomainError(f'kernel values must form a matrix, got shape {values.shape}')
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'mu', _check_probs(self.mu, values.shape[0], 'mu'))
        object.__setattr__(self, 'nu', _check_probs(self.nu, values.shape[1], 'nu'))

    @property
    def norm_squared(self):
        return float(self.mu @ np.abs(self.values) ** 2 @ self.nu)

    @property
    def row_marginal(self):
        """x -> sum_y nu(y) f(x, y)."""
        return self.values @ self.nu

    @property
    def column_marginal(self):
        """y -> sum_x mu(x) f(x, y)."""
        return self.mu @ self.values

    @property
    def total_mean(self):
        return complex(self.mu @ self.values @ self.nu)


class HilbertVariant(str, Enum):
    ROUNDNESS = 'Roundness'
    MIXTURE = 'Mixture'
    ANTISYM = 'Antisym'


# ---------------------------------------------------------------------------
# Sub-additivity for q >= 3
# ---------------------------------------------------------------------------

def _signed_power(x, s):
    return np.sign(x) * np.abs(x) ** s


def alpha_fn(x, y, q):
    """|x+y|^q - |x|^q - |y|^q - q sign(x)|x|^(q-1) y - q x sign(y)|y|^(q-1).

    Non-negative on the whole plane once q >= 3. Accepts arrays.
    """
    if not q >= 1:
        raise DomainError(f'alpha needs q >= 1, got {q}')
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    value = (np.abs(x + y) ** q - np.abs(x) ** q - np.abs(y) ** q
             - q * _signed_power(x, q - 1) * y - q * x * _signed_power(y, q - 1))
    return float(value) if value.ndim == 0 else value


def beta_ratio(beta, q):
    """E|X+Y|^q / (E|X|^q + E|Y|^q) for the i.i.d. pair of ``beta_distributions``."""
    if not 0 < beta <= 0.5:
        raise DomainError(f'beta must lie in (0, 1/2], got {beta}')
    if not q > 0:
        raise DomainError(f'q must be positive, got {q}')
    b, a = beta, 1.0 - beta
    numerator = b * b * 2 ** q * a ** q + a * a * 2 ** q * b ** q + 2 * b * a * (1 - 2 * b) ** q
    return numerator / (2 * b * a ** q + 2 * a * b ** q)


def beta_distributions(beta):
    """Mean-zero two-point law: 1 - beta with probability beta, -beta otherwise."""
    if not 0 < beta <= 0.5:
        raise DomainError(f'beta must lie in (0, 1/2], got {beta}')
    dist = ScalarDist([1.0 - beta, -beta], [beta, 1.0 - beta])
    return dist, dist


def _require_centered(X, name):
    scale = max(1.0, float(np.max(np.abs(X.atoms))))
    if abs(X.mean) > CENTERING_TOLERANCE * scale:
        raise DomainError(f'{name} must have mean zero, got {X.mean!r}')


def check_subadditivity(X, Y, q, tolerance=SUBADDITIVITY_TOLERANCE):
    """E|X+Y|^q >= E|X|^q + E|Y|^q for independent mean-zero X and Y."""
    if not q > 0:
        raise DomainError(f'q must be positive, got {q}')
    _require_centered(X, 'X')
    _require_centered(Y, 'Y')
    sums = np.abs(X.atoms[:, None] + Y.atoms[None, :]) ** q
    lhs = float(X.probs @ sums @ Y.probs)
    rhs = X.expect(np.abs(X.atoms) ** q) + Y.expect(np.abs(Y.atoms) ** q)
    return CheckResult(lhs, rhs, lhs >= rhs - tolerance * max(1.0, rhs))


# ---------------------------------------------------------------------------
# Log moments
# ---------------------------------------------------------------------------

def laplace_log_identity(W):
    """E log W against the integral of (e^-s - E e^-sW) / s over (0, inf)."""
    if np.any(W.atoms <= 0):
        raise DomainError('the log identity needs strictly positive atoms')
    lhs = W.expect(np.log(W.atoms))

    def integrand(s):
        return float(np.dot(W.probs, np.expm1(-s) - np.expm1(-s * W.atoms))) / s

    upper = LAPLACE_TAIL_DECAY / min(1.0, float(W.atoms.min()))
    decades = max(1, math.ceil(math.log10(upper / LAPLACE_CUTOFF)))
    edges = np.geomspace(LAPLACE_CUTOFF, upper, decades + 1)
    # the integrand tends to E W - 1 as s -> 0
    rhs = (W.mean - 1.0) * LAPLACE_CUTOFF
    for lo, hi in zip(edges[:-1], edges[1:]):
        piece, _ = integrate.quad(integrand, lo, hi, epsabs=1e-13, epsrel=1e-11, limit=200)
        rhs += piece
    return CheckResult(lhs, rhs, abs(lhs - rhs) <= LOG_MOMENT_TOLERANCE)


def _log_cosine_gap(root):
    """theta -> log|cos theta - cos root|, written as a product of sines to stay exact near root."""
    def integrand(theta):
        return (math.log(2) + np.log(np.abs(np.sin(0.5 * (theta + root))))
                + np.log(np.abs(np.sin(0.5 * (theta - root)))))
    return integrand


def _angle_log_moment(root):
    integrand = _log_cosine_gap(root)
    value = (quad_log_singular(integrand, 0.0, root, 'right')
             + quad_log_singular(integrand, root, math.pi, 'left'))
    return value / math.pi


def shifted_cosine_log_moment(t):
    """E log|cos T - t| for T uniform on the circle."""
    t = float(t)
    if abs(t) <= 1:
        return _angle_log_moment(math.acos(t))
    value, _ = integrate.quad(lambda theta: math.log(abs(math.cos(theta) - t)), 0.0, math.pi,
                              limit=200)
    return value / math.pi


def cosine_log_moment(alpha):
    """E log|cos T - cos alpha|; equals -log 2 for every alpha."""
    return _angle_log_moment(abs(math.remainder(float(alpha), 2 * math.pi)))


def shifted_cosine_closed_form(t):
    if abs(t) <= 1:
        return -math.log(2)
    return math.log((abs(t) + math.sqrt(t * t - 1)) / 2)


def gaussian_smoothing_check(X, Y, s, tolerance=SMOOTHING_TOLERANCE):
    """E exp(-s(Z-Z')^2) >= E exp(-s(X-Y)^2) where Z is the even mixture of X and Y."""
    if not s >= 0:
        raise DomainError(f's must be nonnegative, got {s}')

    def kernel(A, B):
        gaps = A.atoms[:, None] - B.atoms[None, :]
        return float(A.probs @ np.exp(-s * gaps ** 2) @ B.probs)

    cross = kernel(X, Y)
    lhs = 0.25 * (kernel(X, X) + 2 * cross + kernel(Y, Y))
    return CheckResult(lhs, cross, lhs >= cross - tolerance)


# ---------------------------------------------------------------------------
# Hilbert-space kernels
# ---------------------------------------------------------------------------

def _weighted_spread(weights, values):
    """sum_{i,j} w_i w_j |v_i - v_j|^2."""
    gaps = values[:, None] - values[None, :]
    return float(weights @ np.abs(gaps) ** 2 @ weights)


def mixture_constant(alpha, beta):
    return max(abs(1 - alpha) ** 2 + abs(1 - beta) ** 2, 1.0)


def verify_scalar_hilbert(f, variant, alpha=0.5, beta=0.5, tolerance=HILBERT_TOLERANCE):
    variant = HilbertVariant(variant)
    norm = f.norm_squared
    rows, columns = f.row_marginal, f.column_marginal
    if variant is HilbertVariant.ROUNDNESS:
        lhs = 2 * norm
        rhs = _weighted_spread(f.mu, rows) + _weighted_spread(f.nu, columns)
    elif variant is HilbertVariant.MIXTURE:
        m = f.total_mean
        lhs = mixture_constant(alpha, beta) * norm
        rhs = (float(f.mu @ np.abs(rows - alpha * m) ** 2)
               + float(f.nu @ np.abs(columns - beta * m) ** 2))
    else:
        if f.values.shape[0] != f.values.shape[1] or not np.allclose(f.mu, f.nu, rtol=0, atol=1e-15):
            raise DomainError('the antisymmetric inequality needs a kernel on a square of one measure')
        lhs = 2 * norm
        rhs = float(f.mu @ np.abs(columns - rows) ** 2)
    return CheckResult(lhs, rhs, rhs <= lhs + tolerance * max(1.0, lhs))


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

VIOLATION_HEADER = ['suite', 'case', 'lhs', 'rhs']


@dataclass
class SuiteResult:
    name: str
    header: list
    rows: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations


ALPHA_QS = (3.0, 3.5, 4.0, 6.0)
BETA_QS = (1.5, 2.5, 3.0, 4.0)
SUBADDITIVITY_QS = (3.0, 4.0, 5.5)
SMOOTHING_SCALES = (0.1, 1.0, 10.0)

SUITE_DEFAULTS = {
    'alpha': {'grid': 400, 'seeds': None, 'tolerance': 1e-10},
    'beta': {'grid': 500, 'seeds': None, 'tolerance': 1e-12},
    'subadditivity': {'grid': None, 'seeds': 1000, 'tolerance': SUBADDITIVITY_TOLERANCE},
    'smoothing': {'grid': None, 'seeds': 1000, 'tolerance': SMOOTHING_TOLERANCE},
    'hilbert': {'grid': None, 'seeds': 1000, 'tolerance': HILBERT_TOLERANCE},
    'cosine': {'grid': 50, 'seeds': None, 'tolerance': LOG_MOMENT_TOLERANCE},
    'laplace': {'grid': None, 'seeds': 20, 'tolerance': LOG_MOMENT_TOLERANCE},
}


def _random_centered(rng, size):
    atoms = rng.normal(scale=rng.uniform(0.1, 3.0), size=size)
    probs = rng.dirichlet(np.ones(size))
    return ScalarDist(atoms - float(np.dot(probs, atoms)), probs)


def _random_kernel(rng, square=False):
    m = int(rng.integers(1, 7))
    k = m if square else int(rng.integers(1, 7))
    mu = rng.dirichlet(np.ones(m))
    nu = mu if square else rng.dirichlet(np.ones(k))
    values = rng.normal(size=(m, k)) + 1j * rng.normal(size=(m, k))
    return KernelMatrix(mu, nu, values)


def _alpha_suite(result, grid, seeds, tolerance):
    axis = np.linspace(-10.0, 10.0, grid)
    x, y = np.meshgrid(axis, axis, indexing='ij')
    for q in ALPHA_QS:
        scaled = alpha_fn(x, y, q) / (1 + np.abs(x) + np.abs(y)) ** q
        bad = np.argwhere(scaled < -tolerance)
        for i, j in bad:
            result.violations.append(['alpha', f'q={q:g},x={x[i, j]!r},y={y[i, j]!r}',
                                      float(scaled[i, j]), -tolerance])
        result.rows.append([q, scaled.size, float(scaled.min()), len(bad)])


def _beta_suite(result, grid, seeds, tolerance):
    betas = np.linspace(0.0, 0.5, grid + 1)[1:]
    for q in BETA_QS:
        ratios = np.array([beta_ratio(b, q) for b in betas])
        if q < 3:
            # sub-additivity must fail somewhere below 3
            failures = 0 if ratios.min() < 1 else 1
            if failures:
                result.violations.append(['beta', f'q={q:g}', float(ratios.min()), 1.0])
        else:
            bad = np.flatnonzero(ratios < 1 - tolerance)
            failures = len(bad)
            for i in bad:
                result.violations.append(['beta', f'q={q:g},beta={betas[i]!r}',
                                          float(ratios[i]), 1.0])
        result.rows.append([q, len(betas), float(ratios.min()),
                            float(betas[int(np.argmin(ratios))]), failures])


def _seeded(seeds):
    for seed in range(seeds):
        yield seed, np.random.default_rng(seed)


def _subadditivity_suite(result, grid, seeds, tolerance):
    for q in SUBADDITIVITY_QS:
        failures = 0
        for seed, rng in _seeded(seeds):
            X = _random_centered(rng, int(rng.integers(1, 6)))
            Y = _random_centered(rng, int(rng.integers(1, 6)))
            check = check_subadditivity(X, Y, q, tolerance)
            if not check.holds:
                failures += 1
                result.violations.append(['subadditivity', f'q={q:g},seed={seed}',
                                          check.lhs, check.rhs])
        result.rows.append([q, seeds, failures])


def _smoothing_suite(result, grid, seeds, tolerance):
    for s in SMOOTHING_SCALES:
        failures = 0
        for seed, rng in _seeded(seeds):
            X = scalar_dist(rng.normal(scale=2.0, size=int(rng.integers(1, 6))))
            Y = scalar_dist(rng.normal(scale=2.0, size=int(rng.integers(1, 6))))
            check = gaussian_smoothing_check(X, Y, s, tolerance)
            if not check.holds:
                failures += 1
                result.violations.append(['smoothing', f's={s:g},seed={seed}',
                                          check.lhs, check.rhs])
        result.rows.append([s, seeds, failures])


def _hilbert_cases(rng):
    yield HilbertVariant.ROUNDNESS, _random_kernel(rng), {}
    weights = rng.normal(size=4)
    yield HilbertVariant.MIXTURE, _random_kernel(rng), {
        'alpha': complex(weights[0], weights[1]), 'beta': complex(weights[2], weights[3])}
    yield HilbertVariant.MIXTURE, _random_kernel(rng), {'alpha': 0.5, 'beta': 0.5}
    yield HilbertVariant.ANTISYM, _random_kernel(rng, square=True), {}


def _hilbert_suite(result, grid, seeds, tolerance):
    failures = {}
    for seed, rng in _seeded(seeds):
        for variant, kernel, options in _hilbert_cases(rng):
            label = variant.value if not options else f'{variant.value}({options["alpha"]},{options["beta"]})'
            check = verify_scalar_hilbert(kernel, variant, tolerance=tolerance, **options)
            failures.setdefault(variant.value, 0)
            if not check.holds:
                failures[variant.value] += 1
                result.violations.append(['hilbert', f'{label},seed={seed}', check.lhs, check.rhs])
    for name, count in failures.items():
        result.rows.append([name, seeds, count])


def _cosine_suite(result, grid, seeds, tolerance):
    target = -math.log(2)
    for alpha in np.linspace(0.0, math.pi, grid):
        value = cosine_log_moment(alpha)
        error = abs(value - target)
        if error > tolerance:
            result.violations.append(['cosine', f'alpha={alpha!r}', value, target])
        result.rows.append([float(alpha), value, error])


def _laplace_suite(result, grid, seeds, tolerance):
    for seed, rng in _seeded(seeds):
        size = int(rng.integers(1, 6))
        W = ScalarDist(rng.uniform(0.1, 10.0, size=size), rng.dirichlet(np.ones(size)))
        check = laplace_log_identity(W)
        error = abs(check.lhs - check.rhs)
        if error > tolerance:
            result.violations.append(['laplace', f'seed={seed}', check.lhs, check.rhs])
        result.rows.append([seed, size, check.lhs, check.rhs, error])


SUITES = {
    'alpha': (['q', 'points', 'min_scaled_alpha', 'violations'], _alpha_suite),
    'beta': (['q', 'points', 'min_ratio', 'argmin_beta', 'violations'], _beta_suite),
    'subadditivity': (['q', 'pairs', 'violations'], _subadditivity_suite),
    'smoothing': (['s', 'pairs', 'violations'], _smoothing_suite),
    'hilbert': (['variant', 'kernels', 'violations'], _hilbert_suite),
    'cosine': (['alpha', 'value', 'error'], _cosine_suite),
    'laplace': (['seed', 'atoms', 'lhs', 'rhs', 'error'], _laplace_suite),
}


def run_suite(name, grid=None, seeds=None, tolerance=None):
    """Run one named suite; unset knobs fall back to ``SUITE_DEFAULTS``."""
    if name not in SUITES:
        raise DomainError(f'unknown suite {name!r}; expected one of {", ".join(SUITES)}')
    defaults = SUITE_DEFAULTS[name]
    grid = defaults['grid'] if grid is None else grid
    seeds = defaults['seeds'] if seeds is None else seeds
    tolerance = defaults['tolerance'] if tolerance is None else tolerance
    if grid is not None and grid < 1:
        raise DomainError(f'grid must be a positive integer, got {grid}')
    if seeds is not None and seeds < 0:
        raise DomainError(f'seeds must be nonnegative, got {seeds}')
    header, runner = SUITES[name]
    result = SuiteResult(name, header)
    runner(result, grid, seeds, tolerance)
    logger.info('suite %s: %d rows, %d violations', name, len(result.rows), len(result.violations))
    return result
