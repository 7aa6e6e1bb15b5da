"""Composite Gauss-Legendre rules for integrands with logarithmic endpoint singularities."""
import math
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

GL_ORDER = 20
DYADIC_LEVELS = 40
SMOOTH_PANELS = 16


@lru_cache(maxsize=None)
def gauss_legendre_rule(order):
    """Nodes and weights on [-1, 1]."""
    return leggauss(order)


def quad_panel(f, a, b, order=GL_ORDER):
    """Integrate a vectorised f on [a, b] with one Gauss-Legendre panel."""
    x, w = gauss_legendre_rule(order)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * float(np.sum(w * f(mid + half * x)))


def quad_smooth(f, a, b, panels=SMOOTH_PANELS, order=GL_ORDER):
    edges = np.linspace(a, b, panels + 1)
    return sum(quad_panel(f, lo, hi, order) for lo, hi in zip(edges[:-1], edges[1:]))


def log_leading_term(f, x0, h, direction):
    """Integral over the innermost panel of length h next to a root x0 of exp(f).

    Near the root f(x0 + direction*u) ~ log c + m log u; the order m and the
    coefficient c are read off f at u = h and u = h/2, and the leading term
    is integrated exactly.
    """
    at_h = float(f(np.array([x0 + direction * h]))[0])
    at_half = float(f(np.array([x0 + direction * 0.5 * h]))[0])
    order = max(1, round((at_h - at_half) / math.log(2)))
    log_c = at_h - order * math.log(h)
    return h * log_c + order * h * (math.log(h) - 1)


def quad_log_singular(f, a, b, singular, levels=DYADIC_LEVELS, order=GL_ORDER):
    """Integrate f on [a, b] with a logarithmic singularity at one endpoint.

    ``singular`` is ``'left'``, ``'right'`` or ``None``. Panels halve in
    length towards the singular endpoint; the last one is handled by
    ``log_leading_term``.
    """
    if b <= a:
        return 0.0
    if singular is None:
        return quad_smooth(f, a, b, order=order)
    length = b - a
    total = 0.0
    for k in range(levels):
        near, far = length * 2.0 ** -(k + 1), length * 2.0 ** -k
        if singular == 'left':
            total += quad_panel(f, a + near, a + far, order)
        else:
            total += quad_panel(f, b - far, b - near, order)
    h = length * 2.0 ** -levels
    if singular == 'left':
        return total + log_leading_term(f, a, h, 1.0)
    return total + log_leading_term(f, b, h, -1.0)
