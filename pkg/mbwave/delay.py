"""
The characteristic profile of the Dirichlet problem with delayed
boundary feedback

    u_x(l, t) = -mu1 u_t(l, t) - mu2 u_t(l(t - tau), t - tau),

where ``u_t`` on the boundary is prescribed as ``g0`` for ``t < 0``.

Solutions take the form ``u = f(t+x) - f(t-x)``. The initial data fix
f' on ``[-1, 1)``; the history ``g0`` extends it to the left, down to
``-(1-k) tau - 1``, and the feedback law extends it to the right. Values
right of 1 are computed on demand and memoized.

>>> from mbwave.data import make_initial, make_history
>>> from mbwave.geometry import DomainGeometry
>>> params = DelayParams(mu1=1, mu2=0, tau=1, xi=1, g0=make_history('zero', 1))
>>> p = build_delay_profile(DomainGeometry(0.5), params, make_initial('sine'))
>>> p.fprime(4.7)
0.0
>>> p.lower
-1.5
"""

import collections
import dataclasses
import heapq
import logging
import math
from typing import Callable

import numpy as np

from . import quadrature
from .errors import (
    CompatibilityError,
    DegenerateFeedback,
    OutOfDomain,
    RecursionBound,
    ValidationError,
)
from .profile import check_point


log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class DelayParams:
    mu1: float
    mu2: float
    tau: float
    xi: float
    g0: Callable

    def __post_init__(self):
        for name in ('mu1', 'mu2', 'tau', 'xi'):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.tau <= 0:
            raise ValidationError(f"delay tau must be positive, got {self.tau!r}")
        if self.xi <= 0:
            raise ValidationError(f"weight xi must be positive, got {self.xi!r}")

    @property
    def history_breakpoints(self):
        return tuple(getattr(self.g0, 'breakpoints', ()))


def cascade_steps(k, tau):
    """
    The intervals filled, in order, by the leftward construction of f'
    on ``[-(1-k) tau - 1, -1)``.

    >>> cascade_steps(0.5, 1.0)
    [(-1.5, -1.0)]
    >>> [tuple(round(v, 12) for v in step) for step in cascade_steps(0.5, 1.5)]
    [(-1.666666666667, -1.0), (-1.75, -1.666666666667)]
    """
    target = -(1 - k) * tau - 1
    if tau <= 2 / (1 + k):
        return [(target, -1.0)]
    if tau >= 1 / k:
        raise ValidationError(
            f"delay tau={tau!r} must be below 1/k={1 / k!r}; "
            "the leftward construction cannot reach its target"
        )
    steps = []
    right = -1.0
    i = 1
    while right > target:
        left = max(right - 2 * ((1 - k) / (1 + k)) ** i, target)
        steps.append((left, right))
        right = left
        i += 1
    return steps


def rightward_case(k, tau):
    """
    Which forward-marching schedule the rightward extension would follow:
    ``(1, None)`` when ``tau <= 2/(1-k)``, else ``(2, N)`` with
    ``2(1+k)^(N-1)/(1-k)^N < tau <= 2(1+k)^N/(1-k)^(N+1)``.

    >>> rightward_case(0.5, 1.0)
    (1, None)
    >>> rightward_case(0.2, 3.0)
    (2, 1)
    """
    if tau <= 2 / (1 - k):
        return 1, None
    n = 1
    while tau > 2 * (1 + k) ** n / (1 - k) ** (n + 1):
        n += 1
    return 2, n


def dirichlet_fprime(geom, mu1, base, y):
    """
    f' of the undelayed Dirichlet problem, where each reflection scales
    the slope by ``(mu1 - 1)/(mu1 + 1)``.
    """
    if mu1 == -1:
        raise DegenerateFeedback("mu1 = -1 leaves the reflection undefined")
    n = geom.interval_index(y)
    foot = min(max(geom.char_map(y, -n), -1.0), 1.0)
    return ((mu1 - 1) / (mu1 + 1)) ** n * base(foot)


class DelayProfile:
    def __init__(
        self,
        geom,
        params,
        data,
        max_depth=1_000_000,
        compatibility_tol=1e-8,
        compatibility_samples=256,
        breakpoint_cap=20000,
        quad_tol=1e-10,
    ):
        k = geom.k
        self.geom = geom
        self.params = params
        self.data = data.validate()
        self.max_depth = int(max_depth)
        self.breakpoint_cap = int(breakpoint_cap)
        self.quad_tol = quad_tol
        if abs(float(data.u0(0.0))) > 1e-12:
            raise ValidationError(
                f"trace violation: the Dirichlet problem needs u0(0) = 0, "
                f"got {float(data.u0(0.0))!r}"
            )
        if params.tau >= 1 / k:
            raise ValidationError(
                f"delay tau={params.tau!r} must be below 1/k={1 / k!r}"
            )
        self.lower = -(1 - k) * params.tau - 1
        self.cascade = cascade_steps(k, params.tau)
        log.info(
            "Leftward construction on [%.6g, -1) in %d step(s); rightward case %s",
            self.lower,
            len(self.cascade),
            rightward_case(k, params.tau),
        )
        if params.mu1 == -1:
            self._check_reversed(compatibility_tol, compatibility_samples)
        self._memo = {}
        self._kinks = np.empty(0), -math.inf
        self.frozen = False

    def __repr__(self):
        p = self.params
        return (
            f'{type(self).__name__}(k={self.geom.k!r}, mu1={p.mu1!r}, '
            f'mu2={p.mu2!r}, tau={p.tau!r})'
        )

    def _check_reversed(self, tol, samples):
        p = self.params
        k = self.geom.k
        if p.mu2 == 0:
            raise DegenerateFeedback(
                "mu1 = -1 with mu2 = 0 leaves the outgoing wave undetermined"
            )
        if (1 - k) * p.tau >= 2:
            raise ValidationError(
                "mu1 = -1 needs (1-k) tau < 2 so that each value depends "
                "only on smaller coordinates"
            )
        t = np.linspace(0, p.tau, samples + 2)[1:-1]
        residual = [
            p.mu2 * float(p.g0(s - p.tau)) + 2 * self.base_fprime((1 - k) * s - 1)
            for s in t
        ]
        worst = float(np.max(np.abs(residual)))
        if worst > tol:
            raise CompatibilityError(
                f"mu1 = -1 requires mu2 g0(t - tau) + 2 f'((1-k)t - 1) = 0 on "
                f"(0, tau); the largest residual is {worst:.3g}"
            )
        log.warning(
            "mu1 = -1: the reversed construction is supported experimentally"
        )

    def base_fprime(self, y):
        "f' on ``[-1, 1]``."
        data = self.data
        if y >= 0:
            return float(0.5 * (data.u0_prime(y) + data.u1(y)))
        return float(0.5 * (data.u0_prime(-y) - data.u1(-y)))

    def history_fprime(self, y):
        """
        f' on ``[lower, -1)``, following each point forward under ``F``
        until it enters the base segment and subtracting the boundary
        history met on the way.
        """
        g0 = self.params.g0
        k = self.geom.k
        value = 0.0
        while y < -1:
            value -= float(g0((y + 1) / (1 - k)))
            y = self.geom.char_map(y)
        return value + self.base_fprime(min(y, 1.0))

    def boundary_velocity(self, s, memo=None):
        "``u_t`` at the moving end at time ``s >= -tau``."
        if s < 0:
            if s < -self.params.tau * (1 + 1e-12):
                raise OutOfDomain(f"no boundary history before -tau, got s={s!r}")
            return float(self.params.g0(s))
        minus, plus = self.geom.characteristic_feet(s)
        return self.fprime(plus, memo) - self.fprime(minus, memo)

    def _dependencies(self, y):
        """
        The coordinates f'(y) is computed from, for ``y >= 1``, and the
        delayed time they refer to.
        """
        k = self.geom.k
        p = self.params
        s = (y - 1) / (1 + k)
        if p.mu1 == -1:
            return [(1 - k) * s - 1, (1 - k) * (s + p.tau) - 1]
        deps = [(1 - k) * s - 1]
        delayed = s - p.tau
        if p.mu2 != 0 and delayed >= 0:
            deps.extend(self.geom.characteristic_feet(delayed))
        return deps

    def _combine(self, y, lookup):
        k = self.geom.k
        p = self.params
        s = (y - 1) / (1 + k)
        if p.mu1 == -1:
            return lookup((1 - k) * s - 1) - 2 / p.mu2 * lookup(
                (1 - k) * (s + p.tau) - 1
            )
        outgoing = lookup((1 - k) * s - 1)
        delayed = 0.0
        if p.mu2 != 0:
            d = s - p.tau
            if d < 0:
                delayed = float(p.g0(d))
            else:
                minus, plus = self.geom.characteristic_feet(d)
                delayed = lookup(plus) - lookup(minus)
        return ((p.mu1 - 1) * outgoing - p.mu2 * delayed) / (1 + p.mu1)

    def _local(self, y):
        if y < -1:
            return self.history_fprime(y)
        return self.base_fprime(y)

    def fprime(self, y, memo=None):
        if y < self.lower - 1e-12 * abs(self.lower):
            raise OutOfDomain(
                f"coordinate {y!r} precedes the history segment starting at "
                f"{self.lower!r}"
            )
        if y < 1:
            return self._local(max(y, self.lower))
        if memo is None:
            memo = self.memo()
        if y in memo:
            return memo[y]

        def lookup(z):
            return memo[z] if z >= 1 else self._local(z)

        stack = [y]
        while stack:
            z = stack[-1]
            if z in memo:
                stack.pop()
                continue
            missing = [d for d in self._dependencies(z) if d >= 1 and d not in memo]
            if missing:
                stack.extend(missing)
                if len(stack) > self.max_depth:
                    raise RecursionBound(
                        f"evaluating f'({y!r}) exceeded depth {self.max_depth}"
                    )
                continue
            memo[z] = self._combine(z, lookup)
            stack.pop()
        return memo[y]

    def memo(self):
        """
        The cache evaluation writes to; once frozen, a private overlay
        over the shared values.
        """
        if self.frozen:
            return collections.ChainMap({}, self._memo)
        return self._memo

    def freeze(self, horizon):
        """
        Evaluate f' at every break point up to ``horizon`` and stop writing
        to the shared cache.
        """
        for y in self.breakpoints(1.0, horizon):
            self.fprime(y)
        self.fprime(horizon)
        self.frozen = True
        log.debug("%r frozen with %d cached values", self, len(self._memo))
        return self

    def state(self, x, t):
        """
        ``(u, u_t, u_x)`` at a point of the closed domain; ``u`` is the
        integral of f' between the two characteristic coordinates.
        """
        check_point(self.geom, x, t)
        memo = self.memo()
        right, left = t + x, t - x
        fp_right, fp_left = self.fprime(right, memo), self.fprime(left, memo)
        u = self.integral(left, right, memo)
        return u, fp_right - fp_left, fp_right + fp_left

    def integral(self, lo, hi, memo=None):
        if memo is None:
            memo = self.memo()
        return quadrature.integrate(
            lambda y: self.fprime(y, memo),
            lo,
            hi,
            breakpoints=self.breakpoints(lo, hi),
            tol=self.quad_tol,
        )

    def _seeds(self):
        k = self.geom.k
        data_points = [float(b) for b in self.data.breakpoints]
        base = {-1.0, 0.0, 1.0, *data_points, *(-b for b in data_points)}
        history = {(1 - k) * s - 1 for s in self.params.history_breakpoints}
        seeds = base | history | {self.lower}
        for b in base | history:
            y = self.geom.char_map(b, -1)
            while y >= self.lower:
                seeds.add(y)
                y = self.geom.char_map(y, -1)
        return seeds

    def _forward(self, y):
        k = self.geom.k
        p = self.params
        images = [self.geom.char_map(y)]
        if p.mu1 == -1:
            images.append(self.geom.char_map(y - (1 - k) * p.tau))
        elif p.mu2 != 0:
            images.append(y + (1 + k) * p.tau)
            images.append(self.geom.char_map(y + (1 - k) * p.tau))
        return images

    def breakpoints(self, lo, hi):
        """
        Coordinates in ``[lo, hi]`` where f' may be non-smooth: the
        discontinuities of the data, the history and the segment ends,
        carried forward by every reflection and delay.
        """
        cached, horizon = self._kinks
        if hi <= horizon:
            return cached[(cached >= lo) & (cached <= hi)]
        found = {}
        pending = [y for y in self._seeds() if y <= hi]
        heapq.heapify(pending)
        truncated = False
        while pending:
            y = heapq.heappop(pending)
            key = round(y, 12)
            if key in found:
                continue
            if len(found) >= self.breakpoint_cap:
                truncated = True
                break
            found[key] = y
            for z in self._forward(y):
                if self.lower <= z <= hi:
                    heapq.heappush(pending, z)
        if truncated:
            log.warning(
                "Break points of %r truncated at %d below %.6g",
                self,
                self.breakpoint_cap,
                hi,
            )
        points = np.array(sorted(found.values()))
        if not self.frozen and not truncated:
            self._kinks = points, hi
            log.debug("%r: %d break points up to %.6g", self, len(points), hi)
        return points[(points >= lo) & (points <= hi)]


def build_delay_profile(geom, params, data, **options):
    return DelayProfile(geom, params, data, **options)


eval_fprime_delay = DelayProfile.fprime
eval_state_delay = DelayProfile.state
boundary_velocity = DelayProfile.boundary_velocity
