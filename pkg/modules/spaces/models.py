"""Normed and metric spaces that host every distribution in the toolkit.

Points are numpy arrays internally: complex vectors for ``WeightedLq`` and
``ParallelogramS1``, complex square matrices for ``Schatten``, float
scalars for ``RealLine`` and integer vertex ids for ``BipartiteGraph``.
``CVector``, ``CMatrix`` and ``Vertex`` are the typed wrappers callers can
pass in; every space coerces them (and plain sequences) to its own array
form and rejects points of another kind.
"""
import math
from dataclasses import dataclass
from functools import cached_property
from typing import ClassVar

import numpy as np

from modules.exceptions import DomainError, SerializationError, SpaceMismatchError
from .linalg import singular_system

RADICAND_CLAMP = 1e-12
SINGULAR_VALUE_FLOOR = 1e-13
PAIRWISE_CHUNK_ELEMENTS = 1 << 22
MAX_SCHATTEN_DIM = 64

LAMBDA_VARIANTS = ('squared', 'printed')


def _check_q(q, allow_inf=True):
    q = float(q)
    if math.isnan(q) or q < 1:
        raise DomainError(f'q must be >= 1, got {q}')
    if math.isinf(q) and not allow_inf:
        raise DomainError('q must be finite here')
    return q


@dataclass(frozen=True, eq=False)
class CVector:
    """Complex vector with nonnegative coordinate weights."""
    entries: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex).reshape(-1)
        if self.weights is None:
            weights = np.ones(entries.shape[0])
        else:
            weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if entries.shape[0] == 0:
            raise DomainError('CVector needs at least one entry')
        if weights.shape != entries.shape:
            raise DomainError(f'{entries.shape[0]} entries but {weights.shape[0]} weights')
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise DomainError('weights must be finite and nonnegative')
        object.__setattr__(self, 'entries', entries)
        object.__setattr__(self, 'weights', weights)

    def __len__(self):
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class CMatrix:
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] == 0:
            raise DomainError(f'CMatrix must be square and nonempty, got shape {entries.shape}')
        if not np.all(np.isfinite(entries)):
            raise DomainError('CMatrix has non-finite entries')
        object.__setattr__(self, 'entries', entries)

    @property
    def dim(self):
        return self.entries.shape[0]


@dataclass(frozen=True)
class Vertex:
    side: str
    index: int

    def __post_init__(self):
        if self.side not in ('L', 'R'):
            raise DomainError(f"vertex side must be 'L' or 'R', got {self.side!r}")


# ---------------------------------------------------------------------------
# Norm kernels on stacked difference arrays
# ---------------------------------------------------------------------------

def _weighted_lq(c, weights, q):
    """Weighted l_q norm along the last axis."""
    a = np.abs(c)
    if math.isinf(q):
        return a[..., weights > 0].max(axis=-1)
    if q == 1:
        return (a * weights).sum(axis=-1)
    top = a.max(axis=-1, keepdims=True)
    top = np.where(top > 0, top, 1.0)
    return top[..., 0] * ((weights * (a / top) ** q).sum(axis=-1)) ** (1.0 / q)


def _weighted_lq_subgradient(c, weights, q):
    a = np.abs(c)
    unit = np.divide(c, a, out=np.zeros_like(c), where=a > 0)
    if math.isinf(q):
        masked = np.where(weights > 0, a, -1.0)
        first = masked.argmax(axis=-1)
        g = np.zeros_like(c)
        rows = np.arange(c.shape[0])
        g[rows, first] = unit[rows, first]
        return g
    if q == 1:
        return weights * unit
    norm = _weighted_lq(c, weights, q)[:, None]
    safe = np.where(norm > 0, norm, 1.0)
    g = weights * (a / safe) ** (q - 1) * unit
    return np.where(norm > 0, g, 0)


def _parallelogram(c, variant):
    re, im = c.real, c.imag
    rr = (re * re).sum(axis=-1)
    ii = (im * im).sum(axis=-1)
    ri = (re * im).sum(axis=-1)
    inner = ri * ri if variant == 'squared' else ri
    area = np.sqrt(np.clip(rr * ii - inner, 0.0, None))
    total = rr + ii
    lower = total - 2.0 * area
    lower = np.where(np.abs(lower) <= RADICAND_CLAMP * np.maximum(total, 1.0), 0.0, lower)
    return 0.5 * np.sqrt(total + 2.0 * area) + 0.5 * np.sqrt(np.clip(lower, 0.0, None))


def _parallelogram_subgradient(c):
    # the squared-area distance equals the top singular value of [Re c, Im c]
    re, im = c.real, c.imag
    rr = (re * re).sum(axis=-1)
    ii = (im * im).sum(axis=-1)
    ri = (re * im).sum(axis=-1)
    half_gap = 0.5 * (rr - ii)
    top = 0.5 * (rr + ii) + np.sqrt(half_gap * half_gap + ri * ri)
    b1 = np.stack([top - ii, ri], axis=-1)
    b2 = np.stack([ri, top - rr], axis=-1)
    use_second = np.linalg.norm(b2, axis=-1) > np.linalg.norm(b1, axis=-1)
    b = np.where(use_second[:, None], b2, b1)
    length = np.linalg.norm(b, axis=-1)
    b = np.where(length[:, None] > 0, b / np.where(length > 0, length, 1.0)[:, None], [1.0, 0.0])
    sigma = np.sqrt(np.clip(top, 0.0, None))
    left = (re * b[:, :1] + im * b[:, 1:]) / np.where(sigma > 0, sigma, 1.0)[:, None]
    g = left * b[:, :1] + 1j * left * b[:, 1:]
    return np.where(sigma[:, None] > 0, g, 0)


# ---------------------------------------------------------------------------
# Spaces
# ---------------------------------------------------------------------------

class Space:
    """Common interface; concrete kinds are frozen dataclasses below."""
    kind: ClassVar[str]
    linear: ClassVar[bool] = True
    dtype: ClassVar[type] = complex

    @property
    def point_shape(self):
        raise NotImplementedError

    def coerce(self, point):
        raise NotImplementedError

    def coerce_many(self, points):
        arrays = [self.coerce(p) for p in points]
        if not arrays:
            return np.zeros((0,) + self.point_shape, dtype=self.dtype)
        return np.stack(arrays)

    def norms(self, diffs):
        raise SpaceMismatchError(f'{self.kind} has no norm')

    def subgradients(self, diffs):
        raise SpaceMismatchError(f'{self.kind} has no norm')

    def project(self, z):
        return z

    def zero(self):
        if not self.linear:
            raise SpaceMismatchError(f'{self.kind} has no origin')
        return np.zeros(self.point_shape, dtype=self.dtype)

    def pairwise(self, xs, ys):
        """Distance matrix between two stacks of coerced points."""
        xs = np.asarray(xs)
        ys = np.asarray(ys)
        out = np.empty((xs.shape[0], ys.shape[0]))
        per_row = max(1, ys.shape[0] * int(np.prod(self.point_shape, dtype=int)))
        step = max(1, PAIRWISE_CHUNK_ELEMENTS // per_row)
        for start in range(0, xs.shape[0], step):
            block = xs[start:start + step]
            out[start:start + step] = self.norms(block[:, None] - ys[None])
        return out

    def distance(self, x, y):
        xs = self.coerce(x)[None]
        ys = self.coerce(y)[None]
        return float(self.pairwise(xs, ys)[0, 0])

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class WeightedLq(Space):
    """l_q with coordinate weights; ``zero_sum`` restricts to the hyperplane sum(x) = 0."""
    q: float
    weights: tuple
    zero_sum: bool = False

    kind: ClassVar[str] = 'WeightedLq'

    def __post_init__(self):
        object.__setattr__(self, 'q', _check_q(self.q))
        weights = tuple(float(w) for w in np.asarray(self.weights, dtype=float).reshape(-1))
        if not weights:
            raise DomainError('WeightedLq needs at least one coordinate')
        if any(w < 0 or not math.isfinite(w) for w in weights):
            raise DomainError('weights must be finite and nonnegative')
        if math.isinf(self.q) and not any(w > 0 for w in weights):
            raise DomainError('sup norm with all-zero weights')
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def unit(cls, q, dim, zero_sum=False):
        return cls(q, (1.0,) * int(dim), zero_sum)

    @cached_property
    def weight_array(self):
        return np.asarray(self.weights)

    @property
    def dim(self):
        return len(self.weights)

    @property
    def point_shape(self):
        return (self.dim,)

    def coerce(self, point):
        if isinstance(point, CVector):
            if len(point) != self.dim or not np.array_equal(point.weights, self.weight_array):
                raise SpaceMismatchError('CVector weights do not match the space')
            return point.entries
        if isinstance(point, (CMatrix, Vertex)):
            raise SpaceMismatchError(f'{type(point).__name__} is not a point of {self.kind}')
        arr = np.asarray(point, dtype=complex).reshape(-1)
        if arr.shape != self.point_shape:
            raise SpaceMismatchError(f'expected {self.dim} coordinates, got {arr.shape[0]}')
        return arr

    def norms(self, diffs):
        return _weighted_lq(diffs, self.weight_array, self.q)

    def subgradients(self, diffs):
        return _weighted_lq_subgradient(diffs, self.weight_array, self.q)

    def project(self, z):
        if self.zero_sum:
            return z - z.mean(axis=-1, keepdims=True)
        return z

    def to_dict(self):
        return {'kind': self.kind, 'q': _q_to_json(self.q), 'weights': list(self.weights),
                'zero_sum': self.zero_sum}


@dataclass(frozen=True)
class Schatten(Space):
    q: float
    dim: int

    kind: ClassVar[str] = 'Schatten'

    def __post_init__(self):
        object.__setattr__(self, 'q', _check_q(self.q, allow_inf=False))
        if not 1 <= int(self.dim) <= MAX_SCHATTEN_DIM:
            raise DomainError(f'matrix dimension must lie in [1, {MAX_SCHATTEN_DIM}], got {self.dim}')
        object.__setattr__(self, 'dim', int(self.dim))

    @property
    def point_shape(self):
        return (self.dim, self.dim)

    def coerce(self, point):
        if isinstance(point, (CVector, Vertex)):
            raise SpaceMismatchError(f'{type(point).__name__} is not a point of {self.kind}')
        arr = point.entries if isinstance(point, CMatrix) else np.asarray(point, dtype=complex)
        if arr.shape != self.point_shape:
            raise SpaceMismatchError(f'expected a {self.dim}x{self.dim} matrix, got shape {arr.shape}')
        return arr

    def norms(self, diffs):
        flat = diffs.reshape((-1,) + self.point_shape)
        out = np.array([_schatten(a, self.q) for a in flat])
        return out.reshape(diffs.shape[:-2])

    def subgradients(self, diffs):
        out = np.zeros_like(diffs)
        for k, a in enumerate(diffs):
            sigma, V = singular_system(a)
            keep = sigma > SINGULAR_VALUE_FLOOR * max(sigma[0], 1.0)
            if not np.any(keep):
                continue
            s, Vk = sigma[keep], V[:, keep]
            norm = (s ** self.q).sum() ** (1.0 / self.q)
            out[k] = a @ Vk @ np.diag(s ** (self.q - 2)) @ Vk.conj().T / norm ** (self.q - 1)
        return out

    def to_dict(self):
        return {'kind': self.kind, 'q': self.q, 'dim': self.dim}


def _schatten(a, q):
    sigma = singular_system(a)[0]
    if q == 1:
        return float(sigma.sum())
    top = sigma[0] if sigma.size else 0.0
    if top == 0:
        return 0.0
    return float(top * ((sigma / top) ** q).sum() ** (1.0 / q))


@dataclass(frozen=True)
class ParallelogramS1(Space):
    """Complex 2n-vectors under the closed-form trace-class distance."""
    n: int
    lambda_variant: str = 'squared'

    kind: ClassVar[str] = 'ParallelogramS1'

    def __post_init__(self):
        if int(self.n) < 1:
            raise DomainError('n must be positive')
        if self.lambda_variant not in LAMBDA_VARIANTS:
            raise DomainError(f'unknown area variant {self.lambda_variant!r}')
        object.__setattr__(self, 'n', int(self.n))

    @property
    def point_shape(self):
        return (2 * self.n,)

    def coerce(self, point):
        if isinstance(point, CVector):
            if len(point) != 2 * self.n or not np.all(point.weights == 1.0):
                raise SpaceMismatchError(f'expected a unit-weight CVector of length {2 * self.n}')
            return point.entries
        if isinstance(point, (CMatrix, Vertex)):
            raise SpaceMismatchError(f'{type(point).__name__} is not a point of {self.kind}')
        arr = np.asarray(point, dtype=complex).reshape(-1)
        if arr.shape != self.point_shape:
            raise SpaceMismatchError(f'expected {2 * self.n} coordinates, got {arr.shape[0]}')
        return arr

    def norms(self, diffs):
        return _parallelogram(diffs, self.lambda_variant)

    def subgradients(self, diffs):
        if self.lambda_variant != 'squared':
            raise DomainError('the printed area variant does not define a norm')
        return _parallelogram_subgradient(diffs)

    def to_dict(self):
        return {'kind': self.kind, 'n': self.n, 'lambda_variant': self.lambda_variant}


@dataclass(frozen=True)
class RealLine(Space):
    kind: ClassVar[str] = 'RealLine'
    dtype: ClassVar[type] = float

    @property
    def point_shape(self):
        return ()

    def coerce(self, point):
        if isinstance(point, (CVector, CMatrix, Vertex)):
            raise SpaceMismatchError(f'{type(point).__name__} is not a point of {self.kind}')
        arr = np.asarray(point)
        if arr.shape != () or np.iscomplexobj(arr) and arr.imag != 0:
            raise SpaceMismatchError(f'expected a real scalar, got {point!r}')
        return np.asarray(float(arr.real))

    def norms(self, diffs):
        return np.abs(diffs)

    def subgradients(self, diffs):
        return np.sign(diffs)

    def to_dict(self):
        return {'kind': self.kind}


@dataclass(frozen=True)
class Snowflake(Space):
    """The metric d(x, y)**alpha over a base space."""
    base: Space
    alpha: float

    kind: ClassVar[str] = 'Snowflake'
    linear: ClassVar[bool] = False

    def __post_init__(self):
        alpha = float(self.alpha)
        if not 0 < alpha <= 1:
            raise DomainError(f'snowflake exponent must lie in (0, 1], got {alpha}')
        object.__setattr__(self, 'alpha', alpha)

    @property
    def point_shape(self):
        return self.base.point_shape

    @property
    def dtype(self):
        return self.base.dtype

    def coerce(self, point):
        return self.base.coerce(point)

    def pairwise(self, xs, ys):
        return self.base.pairwise(xs, ys) ** self.alpha

    def to_dict(self):
        return {'kind': self.kind, 'alpha': self.alpha, 'base': self.base.to_dict()}


@dataclass(frozen=True)
class BipartiteGraph(Space):
    """Shortest-path metric of K_{n,n}; vertex ids 0..n-1 on the left, n..2n-1 on the right."""
    n: int

    kind: ClassVar[str] = 'BipartiteGraph'
    linear: ClassVar[bool] = False
    dtype: ClassVar[type] = int

    def __post_init__(self):
        if int(self.n) < 1:
            raise DomainError('n must be positive')
        object.__setattr__(self, 'n', int(self.n))

    @property
    def point_shape(self):
        return ()

    def vertex_id(self, vertex):
        return vertex.index + (self.n if vertex.side == 'R' else 0)

    def vertices(self):
        return np.arange(2 * self.n)

    def coerce(self, point):
        if isinstance(point, Vertex):
            if not 0 <= point.index < self.n:
                raise SpaceMismatchError(f'vertex index {point.index} outside K_{self.n},{self.n}')
            return np.asarray(self.vertex_id(point))
        if isinstance(point, (CVector, CMatrix)):
            raise SpaceMismatchError(f'{type(point).__name__} is not a vertex')
        arr = np.asarray(point)
        if arr.shape != () or not np.issubdtype(arr.dtype, np.integer) or not 0 <= int(arr) < 2 * self.n:
            raise SpaceMismatchError(f'expected a vertex id in [0, {2 * self.n}), got {point!r}')
        return np.asarray(int(arr))

    def pairwise(self, xs, ys):
        xs = np.asarray(xs)[:, None]
        ys = np.asarray(ys)[None, :]
        same_side = (xs < self.n) == (ys < self.n)
        return np.where(xs == ys, 0.0, np.where(same_side, 2.0, 1.0))

    def to_dict(self):
        return {'kind': self.kind, 'n': self.n}


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def lq_norm(x, q):
    """Weighted l_q norm of a CVector; q may be ``inf``."""
    q = _check_q(q)
    if not isinstance(x, CVector):
        x = CVector(x)
    if math.isinf(q) and not np.any(x.weights > 0):
        raise DomainError('sup norm with all-zero weights')
    return float(_weighted_lq(x.entries, x.weights, q))


def schatten_norm(A, q):
    """Schatten-q norm of a square matrix from Jacobi singular values."""
    q = _check_q(q, allow_inf=False)
    if not isinstance(A, CMatrix):
        A = CMatrix(A)
    if A.dim > MAX_SCHATTEN_DIM:
        raise DomainError(f'Schatten norms need m <= {MAX_SCHATTEN_DIM}, got m = {A.dim}')
    return _schatten(A.entries, q)


def parallelogram_s1_distance(a, b, n, lambda_variant='squared'):
    space = ParallelogramS1(n, lambda_variant)
    a = a if isinstance(a, CVector) else CVector(a)
    b = b if isinstance(b, CVector) else CVector(b)
    if len(a) != len(b):
        raise SpaceMismatchError(f'lengths differ: {len(a)} and {len(b)}')
    return space.distance(a, b)


def distance(S, x, y):
    return S.distance(x, y)


def pairwise_distances(S, xs, ys):
    """Distance matrix between two lists of points of S."""
    return S.pairwise(S.coerce_many(list(xs)), S.coerce_many(list(ys)))


def space_to_dict(S):
    return S.to_dict()


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def _q_to_json(q):
    return 'inf' if math.isinf(q) else q


def _q_from_json(value, field):
    if isinstance(value, str) and value.strip().lower() in ('inf', 'infinity'):
        return math.inf
    try:
        return float(value)
    except (TypeError, ValueError):
        raise SerializationError(field, f'not a real number: {value!r}') from None


def space_from_dict(data, field='space'):
    if not isinstance(data, dict) or 'kind' not in data:
        raise SerializationError(field, 'expected an object with a "kind"')
    kind = data['kind']
    try:
        if kind == WeightedLq.kind:
            if 'weights' in data:
                weights = data['weights']
            elif 'dim' in data:
                weights = [1.0] * int(data['dim'])
            else:
                raise SerializationError(f'{field}.weights', 'missing')
            return WeightedLq(_q_from_json(data.get('q'), f'{field}.q'), weights,
                              bool(data.get('zero_sum', False)))
        if kind == Schatten.kind:
            return Schatten(_q_from_json(data.get('q'), f'{field}.q'), int(data['dim']))
        if kind == ParallelogramS1.kind:
            return ParallelogramS1(int(data['n']), data.get('lambda_variant', 'squared'))
        if kind == RealLine.kind:
            return RealLine()
        if kind == Snowflake.kind:
            return Snowflake(space_from_dict(data.get('base'), f'{field}.base'), float(data['alpha']))
        if kind == BipartiteGraph.kind:
            return BipartiteGraph(int(data['n']))
    except SerializationError:
        raise
    except KeyError as exc:
        raise SerializationError(f'{field}.{exc.args[0]}', 'missing') from None
    except (TypeError, ValueError) as exc:
        raise SerializationError(field, str(exc)) from None
    raise SerializationError(f'{field}.kind', f'unknown space kind {kind!r}')
