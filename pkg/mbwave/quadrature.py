"""
Adaptive quadrature over integrands with known break points.

>>> integrate(abs, -1.0, 2.0, breakpoints=[0.0])
2.5
"""

import logging

import numpy as np
from more_itertools import pairwise
from scipy import integrate as _integrate

from .errors import QuadratureError


log = logging.getLogger(__name__)


def split(lo, hi, breakpoints=()):
    """
    The edges of ``[lo, hi]`` cut at the interior break points.

    >>> split(0.0, 3.0, [2.0, 5.0, 1.0, 2.0, 0.0])
    [0.0, 1.0, 2.0, 3.0]
    """
    inner = sorted({float(p) for p in breakpoints if lo < p < hi})
    return [float(lo), *inner, float(hi)]


def integrate(func, lo, hi, breakpoints=(), tol=1e-10, limit=200):
    """
    Integrate ``func`` over ``[lo, hi]`` piece by piece, one adaptive
    Gauss-Kronrod run per smooth piece.
    """
    if hi < lo:
        return -integrate(func, hi, lo, breakpoints, tol, limit)
    total = 0.0
    for a, b in pairwise(split(lo, hi, breakpoints)):
        if b <= a:
            continue
        result = _integrate.quad(
            func, a, b, epsabs=tol, epsrel=tol, limit=limit, full_output=1
        )
        value, error = result[0], result[1]
        if len(result) > 3 and error > 10 * max(tol, tol * abs(value)):
            raise QuadratureError(
                f"quadrature did not converge on [{a!r}, {b!r}]: "
                f"estimate {value!r}, error {error!r}; {result[3]}"
            )
        total += value
    return float(total)


def trapezoid(values, spacing):
    return float(_integrate.trapezoid(np.asarray(values), dx=spacing))
