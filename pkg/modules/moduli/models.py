"""Per-configuration ratios for the barycentric, mixture, roundness and Jensen moduli.

Each operation returns a ``RatioReport``. When the space kind maps to a
known theorem the report also carries that bound and its side: roundness,
mixture and barycentric bounds are upper bounds, Jensen-type bounds are
lower bounds.
"""
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from modules.constants.models import (
    PQ, C_exponent, bm_bound, c_exponent, general_bound, metric_bound,
)
from modules.distributions.models import (
    Config, centered_moment, cross_moment, log_cross_moment, mean, moments_about,
    self_moment,
)
from modules.exceptions import DegenerateRatioError, DomainError, SpaceMismatchError
from modules.spaces.models import BipartiteGraph, RealLine, Snowflake, WeightedLq
from .solver import minimize_barycenter

logger = logging.getLogger(__name__)

BOUND_TOLERANCE = 1e-7


class RatioName(str, Enum):
    BARYCENTER = 'Barycenter'
    MIXTURE = 'Mixture'
    ROUNDNESS = 'Roundness'
    JENSEN = 'Jensen'
    METRIC_BARYCENTER = 'MetricBarycenter'
    LOG_ROUNDNESS = 'LogRoundness'
    RANDOM_Z = 'RandomZ'
    JENSEN_INF = 'JensenInf'


CSV_HEADER = ['name', 'target', 'p', 'q', 'space', 'value', 'bound', 'bound_side', 'slack']


@dataclass(frozen=True, eq=False)
class RatioReport:
    name: RatioName
    value: float
    bound: float = None
    slack: float = None
    bound_side: str = 'upper'
    solver_info: object = None
    p: float = None
    q: float = None
    space: str = None
    target: str = None

    def __post_init__(self):
        if self.bound is not None and self.slack is None:
            object.__setattr__(self, 'slack', self.bound - self.value)

    @property
    def within_bound(self):
        """True when no bound is attached or the value respects it."""
        if self.bound is None or math.isnan(self.value):
            return True
        if self.bound_side == 'lower':
            return self.value >= self.bound - BOUND_TOLERANCE * max(1.0, abs(self.bound))
        return self.value <= self.bound + BOUND_TOLERANCE * max(1.0, abs(self.bound))

    def csv_row(self):
        return [self.name.value, self.target or '', self.p, self.q if self.q is not None else '',
                self.space or '', self.value, '' if self.bound is None else self.bound,
                self.bound_side if self.bound is not None else '',
                '' if self.slack is None else self.slack]

    def to_dict(self):
        data = {
            'name': self.name.value,
            'target': self.target,
            'p': self.p,
            'q': self.q,
            'space': self.space,
            'value': self.value,
            'bound': self.bound,
            'bound_side': self.bound_side if self.bound is not None else None,
            'slack': self.slack,
        }
        if self.solver_info is not None:
            data['solver'] = self.solver_info.to_dict()
        return data


# ---------------------------------------------------------------------------
# Known bounds per space kind
# ---------------------------------------------------------------------------

def lq_exponent(space):
    """q for which the space sits isometrically in L_q, when one is known."""
    if isinstance(space, WeightedLq) and math.isfinite(space.q):
        return space.q
    if isinstance(space, RealLine):
        return 2.0
    return None


def _space_tag(space):
    if isinstance(space, Snowflake):
        return f'Snowflake({_space_tag(space.base)},{space.alpha:g})'
    if isinstance(space, WeightedLq):
        return f'WeightedLq({space.q:g})'
    return space.kind


def roundness_bound(space, p):
    if isinstance(space, Snowflake):
        return roundness_bound(space.base, space.alpha * p)
    q = lq_exponent(space)
    if q is not None and p >= 1:
        return 2.0 ** C_exponent(PQ(p, q))
    if isinstance(space, RealLine):
        return 2.0
    return 2.0 ** (max(p, 1.0) + 1)


def embeds_in_lp(space, p):
    """Known isometric embeddings into L_p with p <= 2."""
    if not 0 < p <= 2:
        return False
    if isinstance(space, RealLine):
        return True
    if isinstance(space, WeightedLq):
        return space.q == 2 or p <= space.q <= 2
    return False


def _report(name, value, config_space, p, bound=None, bound_side='upper', **extra):
    q = config_space.q if isinstance(config_space, WeightedLq) else None
    return RatioReport(name, float(value), bound, None, bound_side, p=p, q=q,
                       space=_space_tag(config_space), **extra)


def _ratio(name, numerator, denominator):
    if denominator == 0:
        raise DegenerateRatioError(name.value, numerator, denominator)
    return numerator / denominator


def _require_linear(space):
    if not space.linear:
        raise SpaceMismatchError(f'{space.kind} has no linear structure')


# ---------------------------------------------------------------------------
# Ratios
# ---------------------------------------------------------------------------

def roundness_ratio(c):
    """(E d(X,X')^p + E d(Y,Y')^p) / E d(X,Y)^p."""
    numerator = self_moment(c.X, c.p) + self_moment(c.Y, c.p)
    value = _ratio(RatioName.ROUNDNESS, numerator, cross_moment(c.X, c.Y, c.p))
    return _report(RatioName.ROUNDNESS, value, c.space, c.p, roundness_bound(c.space, c.p))


def jensen_ratio(X, p):
    """E d(X,X')^p / E d(X, E[X])^p."""
    _require_linear(X.space)
    if p < 1:
        raise DomainError(f'the Jensen ratio needs p >= 1, got {p}')
    value = _ratio(RatioName.JENSEN, self_moment(X, p), centered_moment(X, p))
    q = lq_exponent(X.space)
    bound = 2.0 ** c_exponent(PQ(p, q)) if q is not None else None
    return _report(RatioName.JENSEN, value, X.space, p, bound, 'lower')


def mixture_point(c):
    _require_linear(c.space)
    return 0.5 * mean(c.X) + 0.5 * mean(c.Y)


def mixture_ratio(c):
    """Barycentric objective at the midpoint of the two means over E d(X,Y)^p."""
    z = mixture_point(c)[None]
    numerator = float(moments_about(c.X, z, c.p)[0] + moments_about(c.Y, z, c.p)[0])
    value = _ratio(RatioName.MIXTURE, numerator, cross_moment(c.X, c.Y, c.p))
    bound = None
    if c.p >= 1:
        q = lq_exponent(c.space)
        bound = bm_bound(PQ(c.p, q)) if q is not None else general_bound(c.p)
    return _report(RatioName.MIXTURE, value, c.space, c.p, bound)


def barycenter_ratio(c, **solver_options):
    """inf_z (E d(X,z)^p + E d(Y,z)^p) / E d(X,Y)^p through the convex solver."""
    cross = cross_moment(c.X, c.Y, c.p)
    if cross == 0:
        raise DegenerateRatioError(RatioName.BARYCENTER.value, math.nan, cross)
    cert = minimize_barycenter(c, **solver_options)
    return _report(RatioName.BARYCENTER, cert.value / cross, c.space, c.p,
                   general_bound(c.p), solver_info=cert)


def default_candidates(c):
    base = c.space
    while isinstance(base, Snowflake):
        base = base.base
    if isinstance(base, BipartiteGraph):
        return base.vertices()
    return np.concatenate([c.X.atoms, c.Y.atoms])


def metric_barycenter_ratio(c, candidates=None):
    """Exact minimum of the barycentric objective over a finite candidate set."""
    if candidates is None:
        candidates = default_candidates(c)
    else:
        candidates = c.space.coerce_many(list(candidates))
    if len(candidates) == 0:
        raise DomainError('metric barycenter needs at least one candidate point')
    objective = moments_about(c.X, candidates, c.p) + moments_about(c.Y, candidates, c.p)
    numerator = float(objective.min())
    value = _ratio(RatioName.METRIC_BARYCENTER, numerator, cross_moment(c.X, c.Y, c.p))
    bound = metric_bound(c.p) if c.p >= 1 else None
    return _report(RatioName.METRIC_BARYCENTER, value, c.space, c.p, bound)


def log_roundness_report(c):
    """Gap E log d(X,X') + E log d(Y,Y') - 2 E log d(X,Y); at most 0 on L_0-embeddable spaces.

    A -inf self term makes the gap -inf, which counts as satisfied.
    """
    own = log_cross_moment(c.X, c.X) + log_cross_moment(c.Y, c.Y)
    if own == -math.inf:
        gap = -math.inf
    else:
        gap = own - 2 * log_cross_moment(c.X, c.Y)
    bound = None
    q = lq_exponent(c.space)
    if isinstance(c.space, RealLine) or (q is not None and q <= 2):
        bound = 0.0
    return _report(RatioName.LOG_ROUNDNESS, gap, c.space, c.p, bound)


def random_z_ratio(c):
    """Barycentric objective averaged over z drawn from the mixture of X and Y.

    Defined for every p > 0 and every space kind; it bounds the barycentric
    ratio from above without any optimisation.
    """
    sx, sy = self_moment(c.X, c.p), self_moment(c.Y, c.p)
    cross = cross_moment(c.X, c.Y, c.p)
    value = _ratio(RatioName.RANDOM_Z, 0.5 * (sx + sy) + cross, cross)
    bound = 2.0 if embeds_in_lp(c.space, c.p) else None
    return _report(RatioName.RANDOM_Z, value, c.space, c.p, bound)


def jensen_inf_ratio(X, p, **solver_options):
    """E d(X,X')^p / inf_z E d(X,z)^p, the infimum taken by the convex solver."""
    _require_linear(X.space)
    cert = minimize_barycenter(Config(X.space, X, X, p), **solver_options)
    value = _ratio(RatioName.JENSEN_INF, self_moment(X, p), cert.value / 2)
    q = lq_exponent(X.space)
    bound = 2.0 ** c_exponent(PQ(p, q)) if q is not None else None
    return _report(RatioName.JENSEN_INF, value, X.space, p, bound, 'lower', solver_info=cert)


def applicable_reports(c, **solver_options):
    """Every report defined for the configuration's space kind."""
    if cross_moment(c.X, c.Y, c.p) == 0:
        raise DegenerateRatioError('configuration', math.nan, 0.0)
    reports = [roundness_ratio(c), random_z_ratio(c), metric_barycenter_ratio(c),
               log_roundness_report(c)]
    if c.space.linear:
        reports.append(mixture_ratio(c))
        if c.p >= 1:
            reports.append(barycenter_ratio(c, **solver_options))
            for target, dist in (('X', c.X), ('Y', c.Y)):
                try:
                    report = jensen_ratio(dist, c.p)
                except DegenerateRatioError:
                    logger.warning('%s is a point mass; Jensen ratio skipped', target)
                    continue
                reports.append(replace(report, target=target))
    return reports
