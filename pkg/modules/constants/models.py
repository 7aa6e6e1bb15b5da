"""Closed-form exponents and constants for L_q and interpolation spaces.

Every min/max formula is paired with its piecewise expansion, and the two
are compared on each call; a disagreement raises
``InternalConsistencyError``.
"""
import math
from dataclasses import dataclass

import numpy as np

from modules.exceptions import DomainError, InternalConsistencyError

AGREEMENT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class PQ:
    p: float
    q: float

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if not p >= 1 or math.isinf(p):
            raise DomainError(f'p must be a finite real >= 1, got {p}')
        if not q >= 1 or math.isinf(q):
            raise DomainError(f'q must be a finite real >= 1, got {q}')
        object.__setattr__(self, 'p', p)
        object.__setattr__(self, 'q', q)


@dataclass(frozen=True)
class ThetaP:
    theta: float
    p: float

    def __post_init__(self):
        theta, p = float(self.theta), float(self.p)
        if not 0 <= theta <= 1:
            raise DomainError(f'theta must lie in [0, 1], got {theta}')
        upper = math.inf if theta == 0 else 2 / theta
        if not 2 / (2 - theta) - AGREEMENT_TOLERANCE <= p <= upper + AGREEMENT_TOLERANCE:
            raise DomainError(f'p={p} outside [2/(2-theta), 2/theta] for theta={theta}')
        object.__setattr__(self, 'theta', theta)
        object.__setattr__(self, 'p', p)


def conjugate(x):
    """Hoelder conjugate x/(x-1), infinite at x = 1."""
    return math.inf if x == 1 else x / (x - 1)


def _close(a, b):
    if not (math.isfinite(a) and math.isfinite(b)):
        return a == b
    return abs(a - b) <= AGREEMENT_TOLERANCE * max(1.0, abs(a), abs(b))


def _agree(name, pq, formula, pieces):
    """Check a closed form against the values of all matching ranges."""
    if not pieces:
        raise InternalConsistencyError(f'{name}{(pq.p, pq.q)} matches no range')
    for value in pieces:
        if not _close(formula, value):
            raise InternalConsistencyError(
                f'{name}{(pq.p, pq.q)}: formula gives {formula!r}, range gives {value!r}'
            )
    return formula


def _le(a, b):
    return a <= b or _close(a, b)


def c_exponent(pq):
    """min{1, p-1, p/q, p(q-1)/q}: the Jensen exponent of L_q."""
    p, q = pq.p, pq.q
    formula = min(1.0, p - 1, p / q, p * (q - 1) / q)
    qc = conjugate(q)
    pieces = []
    if (_le(p, q) and _le(q, 2)) or (_le(p, qc) and _le(qc, 2)):
        pieces.append(p - 1)
    if _le(q, p) and _le(p, qc):
        pieces.append(p * (q - 1) / q)
    if _le(qc, p) and _le(p, q):
        pieces.append(p / q)
    if (_le(qc, p) and _le(2, qc)) or (_le(q, p) and _le(2, q)):
        pieces.append(1.0)
    return _agree('c', pq, formula, pieces)


def _C_pieces(p, q):
    """``{range: value}`` for every range of the piecewise definition containing (p, q)."""
    pc, qc = conjugate(p), conjugate(q)
    pieces = {}
    if _le(pc, q) and _le(q, p):
        pieces[1] = p - 1
    if _le(qc, p) and _le(p, q):
        pieces[2] = p * (q - 2) / q + 1
    if _le(2, q) and _le(1, p) and _le(p, qc):
        pieces[3] = 2 - p / q
    if _le(q, 2) and _le(q, p) and _le(p, qc):
        pieces[4] = p / q
    if _le(1, p) and _le(p, q) and _le(q, 2):
        pieces[5] = 1.0
    # ranges 3 and 5 share the segment q = 2, p <= 2 with different values; 5 is the sharp one
    if 3 in pieces and 5 in pieces:
        del pieces[3]
    return pieces


def C_exponent(pq):
    """Exponent of the proven roundness bound for L_q; piecewise over five ranges."""
    values = list(_C_pieces(pq.p, pq.q).values())
    if not values:
        raise InternalConsistencyError(f'C{(pq.p, pq.q)} matches no range')
    return _agree('C', pq, values[0], values)


def C_range(pq):
    """Indices (1-5) of the ranges that contain (p, q)."""
    p, q = pq.p, pq.q
    pc, qc = conjugate(p), conjugate(q)
    tests = [
        _le(pc, q) and _le(q, p),
        _le(qc, p) and _le(p, q),
        _le(2, q) and _le(p, qc),
        _le(q, 2) and _le(q, p) and _le(p, qc),
        _le(p, q) and _le(q, 2),
    ]
    return [k + 1 for k, hit in enumerate(tests) if hit]


def C_opt_exponent(pq):
    """max{1, p-1, p(q-2)/q + 1}: the conjectured sharp roundness exponent."""
    p, q = pq.p, pq.q
    formula = max(1.0, p - 1, p * (q - 2) / q + 1)
    pieces = []
    if _le(2, p) and _le(q, p):
        pieces.append(p - 1)
    if _le(2, q) and _le(p, q):
        pieces.append(p * (q - 2) / q + 1)
    if _le(p, 2) and _le(q, 2):
        pieces.append(1.0)
    return _agree('C_opt', pq, formula, pieces)


def theta_max(pq):
    """Largest interpolation parameter available to L_q; p * theta_max / 2 equals c(p, q)."""
    p, q = pq.p, pq.q
    value = 2 * min(1 / p, 1 - 1 / p, 1 / q, 1 - 1 / q)
    if not _close(p * value / 2, c_exponent(pq)):
        raise InternalConsistencyError(f'theta_max{(p, q)} = {value!r} disagrees with c(p, q)')
    return value


def _snowflake_lines(p, q):
    # the four linear pieces in Q: value = slope * Q + intercept
    s = p / q
    return [(s, -1.0), (-s, 3.0), (s, 1 - 2 * s), (-s, 1 + 2 * s)]


def snowflake_envelope(pq, Q):
    return max(a * Q + b for a, b in _snowflake_lines(pq.p, pq.q))


def snowflake_exponent(pq):
    """Minimise the roundness exponent obtained through L_q -> L_Q snowflakes.

    Returns ``(value, Q_star)``. The objective is the upper envelope of four
    linear functions of Q, so its minimum over Q >= q sits at Q = q or at a
    crossing of two pieces; all candidates are evaluated exactly.
    """
    lines = _snowflake_lines(pq.p, pq.q)
    candidates = {pq.q}
    for i, (a1, b1) in enumerate(lines):
        for a2, b2 in lines[i + 1:]:
            if a1 != a2:
                Q = (b2 - b1) / (a1 - a2)
                if Q >= pq.q:
                    candidates.add(Q)
    best_value, best_Q = math.inf, None
    for Q in sorted(candidates):
        value = snowflake_envelope(pq, Q)
        if value < best_value - AGREEMENT_TOLERANCE:
            best_value, best_Q = value, Q
    return best_value, best_Q


def general_bound(p):
    p = float(p)
    if not p >= 1:
        raise DomainError(f'p must be >= 1, got {p}')
    return 3 ** p / 2 ** (p - 1)


def metric_bound(p):
    p = float(p)
    if not p >= 1:
        raise DomainError(f'p must be >= 1, got {p}')
    return 2 ** p + 1


def bm_bound(pq):
    """Bound on the barycentric and mixture moduli of L_q."""
    c = c_exponent(pq)
    C = C_exponent(pq)
    return min(general_bound(pq.p) * (math.sqrt(2) / 3) ** (2 * c), (2 ** C + 2) / 2 ** (c + 1))


def interpolation_bounds(tp):
    """Roundness, Jensen and mixture bounds for a theta-interpolation space.

    Returns ``(r_bound, j_bound, mb_bound)``.
    """
    theta, p = tp.theta, tp.p
    r = 2 ** (1 + (1 - theta) * p)
    j = 2 ** (theta * p / 2)
    first = general_bound(p) * (math.sqrt(2) / 3) ** (p * theta)
    second = (1 + 2 ** ((1 - theta) * p)) / 2 ** (theta * p / 2)
    mb = min(first, second)
    crossing = math.inf if theta == 1 else 1 / (1 - theta)
    piecewise = first if crossing <= p else second
    if not _close(mb, piecewise):
        raise InternalConsistencyError(
            f'interpolation bound at theta={theta}, p={p}: min gives {mb!r}, range gives {piecewise!r}'
        )
    return r, j, mb


def alpha_beta_constant(alpha, beta, p, theta):
    """Constant of the shifted two-measure inequality on a theta-interpolation space.

    ``alpha`` and ``beta`` may be complex; at alpha = beta = 1/2 this is
    the first term of the interpolation mixture bound.
    """
    ThetaP(theta, p)
    a, b = 1 + abs(alpha), 1 + abs(beta)
    hilbert = max((abs(1 - alpha) ** 2 + abs(1 - beta) ** 2) ** (p * theta), 1.0)
    gap = 2 - theta * p
    if gap <= AGREEMENT_TOLERANCE:
        banach = max(a, b) ** (p * (1 - theta))
    else:
        k = 2 * p * (1 - theta) / gap
        banach = (a ** k + b ** k) ** (gap / 2)
    return hilbert * banach


def moduli_relation_bound(r, j):
    """Mixture bound implied by a roundness constant r and a Jensen constant j."""
    if not j > 0:
        raise DomainError(f'Jensen constant must be positive, got {j}')
    return (2 + r) / (2 * j)


def nonconvex_bary_bound(p):
    """Barycentric bound for subsets of L_p with 0 < p <= 2."""
    p = float(p)
    if not 0 < p <= 2:
        raise DomainError(f'p must lie in (0, 2], got {p}')
    return min(2.0, 2 ** (2 - p))


CSV_HEADER = ['p', 'q', 'c', 'C', 'C_opt', 'theta_max', 'snowflake', 'Q_star', 'bm_bound',
              'general_bound']


def grid_rows(pmin, pmax, qmin, qmax, step):
    """One row per (p, q) on an inclusive grid."""
    if step <= 0:
        raise DomainError('grid step must be positive')
    ps = _axis(pmin, pmax, step)
    qs = _axis(qmin, qmax, step)
    rows = []
    for p in ps:
        for q in qs:
            pq = PQ(p, q)
            value, Q_star = snowflake_exponent(pq)
            rows.append([p, q, c_exponent(pq), C_exponent(pq), C_opt_exponent(pq),
                         theta_max(pq), value, Q_star, bm_bound(pq), general_bound(p)])
    return rows


def _axis(lo, hi, step):
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError(f'grid bounds must be finite, got [{lo}, {hi}]')
    if hi < lo:
        raise DomainError(f'empty range [{lo}, {hi}]')
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [float(v) for v in np.round(lo + step * np.arange(count), 12)]
