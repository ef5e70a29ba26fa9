"""
The characteristic profile of the Neumann problem with boundary
feedback ``u_x + a u_t = 0`` at ``x = 1 + kt``.

Solutions take the form ``u = f(t+x) + f(t-x)``. The initial data fix
``f`` on ``I_0 = [-1, 1)`` and the feedback law propagates it along the
interval chain ``I_n = F^n(I_0)``:
``f'(y) = mu_a**n * f'(F^-n(y))`` on ``I_n``.

>>> from mbwave.data import make_initial
>>> from mbwave.geometry import DomainGeometry
>>> p = build_neumann_profile(DomainGeometry(0.5), 0.5, make_initial('quadratic'))
>>> float(p.fprime(0.5)), float(p.fprime(-0.5))
(0.5, -0.5)
>>> float(p.fprime(3.0)) == p.mu_a * float(p.fprime(p.geom.char_map(3.0, -1)))
True
"""

import logging
import math

import numpy as np

from .errors import DegenerateFeedback, OutOfDomain, ValidationError


log = logging.getLogger(__name__)


class NeumannProfile:
    def __init__(self, geom, a, data):
        a = float(a)
        if not math.isfinite(a):
            raise ValidationError(f"feedback gain must be finite, got {a!r}")
        if a == -1:
            raise DegenerateFeedback(
                "degenerate feedback: only the trivial solution exists"
            )
        self.geom = geom
        self.a = a
        self.mu_a = (1 - a) / (1 + a)
        self.data = data.validate()
        self.f_anchor = 0.5 * float(data.u0(0.0))
        # f(F^n(-1)) by n
        self._junctions = {0: self.base_f(-1.0)}
        self.frozen = False

    def __repr__(self):
        return (
            f'{type(self).__name__}(k={self.geom.k!r}, a={self.a!r}, '
            f'data={self.data.name!r})'
        )

    @property
    def growth(self):
        "Ratio of the integrals of f' over consecutive intervals."
        return self.mu_a * self.geom.theta

    def base_fprime(self, y):
        "f' on ``I_0``."
        data = self.data
        if y >= 0:
            return 0.5 * (data.u0_prime(y) + data.u1(y))
        return 0.5 * (data.u1(-y) - data.u0_prime(-y))

    def base_f(self, y):
        "f on the closure of ``I_0``."
        data = self.data
        if y >= 0:
            return 0.5 * (data.u1_integral(y) + data.u0(y))
        return 0.5 * (data.u0(-y) - data.u1_integral(-y))

    def _locate(self, y):
        if y < -1:
            raise OutOfDomain(
                f"coordinate {y!r} precedes the cone y >= -1 on which f is determined"
            )
        n = self.geom.interval_index(y)
        foot = min(max(self.geom.char_map(y, -n), -1.0), 1.0)
        return n, foot

    def fprime(self, y):
        n, foot = self._locate(y)
        if n == 0:
            return float(self.base_fprime(y))
        if self.a == 1:
            return 0.0
        return float(self.mu_a**n * self.base_fprime(foot))

    def junction(self, n):
        """
        ``f(F^n(-1))``, accumulated from the integral of f' over each
        earlier interval.
        """
        if n in self._junctions:
            return self._junctions[n]
        known = max(m for m in self._junctions if m <= n)
        value = self._junctions[known]
        step = self.base_f(1.0) - self.base_f(-1.0)
        for m in range(known + 1, n + 1):
            value += self.growth ** (m - 1) * step
            if not self.frozen:
                self._junctions[m] = value
        if not self.frozen:
            log.debug("%r: %d junction values cached", self, len(self._junctions))
        return value

    def f(self, y):
        n, foot = self._locate(y)
        if n == 0:
            return float(self.base_f(y))
        scale = self.growth**n
        return float(self.junction(n) + scale * (self.base_f(foot) - self.base_f(-1.0)))

    def state(self, x, t):
        """
        ``(u, u_t, u_x)`` at a point of the closed domain.
        """
        check_point(self.geom, x, t)
        right, left = t + x, t - x
        fp_right, fp_left = self.fprime(right), self.fprime(left)
        return (
            self.f(right) + self.f(left),
            fp_right + fp_left,
            fp_right - fp_left,
        )

    def boundary_trace(self, t):
        "``(u_t, u_x)`` at the moving end ``x = 1 + kt``."
        minus, plus = self.geom.characteristic_feet(t)
        fp_plus, fp_minus = self.fprime(plus), self.fprime(minus)
        return fp_plus + fp_minus, fp_plus - fp_minus

    def continuity_constant(self, n):
        "``C_n = f(F^n(0))``."
        return self.f(self.geom.char_map(0.0, n))

    def freeze(self, horizon):
        """
        Fill the junction cache through the interval holding ``horizon``;
        afterwards evaluation no longer writes to the profile.
        """
        self.junction(self.geom.interval_index(max(horizon, -1.0)) + 1)
        self.frozen = True
        return self

    def breakpoints(self, lo, hi):
        """
        Coordinates in ``[lo, hi]`` where f' may fail to be smooth: the
        interval ends, the images of 0 and of the data break points.
        """
        lo = max(lo, -1.0)
        if hi < lo:
            return np.empty(0)
        data_points = [float(b) for b in self.data.breakpoints]
        seeds = np.array([-1.0, 0.0, 1.0] + data_points + [-b for b in data_points])
        first = self.geom.interval_index(lo)
        last = self.geom.interval_index(hi)
        points = np.concatenate(
            [self.geom.char_map(seeds, n) for n in range(first, last + 1)]
        )
        return np.unique(points[(points >= lo) & (points <= hi)])


def check_point(geom, x, t):
    if t < 0:
        raise OutOfDomain(f"time must be non-negative, got {t!r}")
    length = geom.boundary_position(t)
    if not 0 <= x <= length * (1 + 1e-12):
        raise OutOfDomain(f"x={x!r} lies outside [0, {length!r}] at t={t!r}")


def build_neumann_profile(geom, a, data):
    return NeumannProfile(geom, a, data)


eval_fprime = NeumannProfile.fprime
eval_f = NeumannProfile.f
eval_state = NeumannProfile.state


def continuity_constants_explicit(data, geom, a, n):
    """
    ``C_0 .. C_n`` from the closed recursion on the data alone.

    >>> from mbwave.data import make_initial
    >>> from mbwave.geometry import DomainGeometry
    >>> continuity_constants_explicit(make_initial('zero'), DomainGeometry(0.5), 0.3, 2)
    [0.0, 0.0, 0.0]
    """
    ratio = (1 - a) / (1 + a) * geom.theta
    u0_0, u0_1 = float(data.u0(0.0)), float(data.u0(1.0))
    total_u1 = float(data.u1_integral(1.0))
    increment = 0.5 * (
        (1 - ratio) * u0_1 + (1 + ratio) * total_u1 + (ratio - 1) * u0_0
    )
    constants = [0.5 * u0_0]
    for m in range(1, n + 1):
        constants.append(constants[-1] + ratio ** (m - 1) * increment)
    return constants


def in_region_v(x, t):
    """
    Whether ``(x, t)`` lies in the sub-cone where the solution for
    ``a = 1`` is constant.

    >>> in_region_v(0.5, 2.0), in_region_v(0.5, 1.0)
    (True, False)
    """
    return t + x >= 1 and t - x >= 1
