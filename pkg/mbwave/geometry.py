"""
The expanding interval 0 < x < 1 + kt and its reflection map.

A right-going characteristic leaving the coordinate ``y = t - l(t)``
returns as ``F(y) = t + l(t)``. ``F`` is affine and conjugate to a
scaling by ``theta = (1+k)/(1-k)`` about its fixed point ``-1/k``, so
its powers have a closed form.

>>> geom = DomainGeometry(0.5)
>>> geom.theta
3.0
>>> geom.char_map(-1.0)
1.0
>>> geom.char_map(1.0)
7.0
>>> geom.char_map(7.0, -1)
1.0
>>> geom.interval_index(7.0)
2
"""

import dataclasses
import math

import numpy as np

from .errors import OutOfDomain, ValidationError


@dataclasses.dataclass(frozen=True)
class DomainGeometry:
    k: float

    def __post_init__(self):
        k = float(self.k)
        if not 0 < k < 1:
            raise ValidationError(f"k must satisfy 0 < k < 1, got {self.k!r}")
        object.__setattr__(self, 'k', k)

    @property
    def theta(self):
        return (1 + self.k) / (1 - self.k)

    @property
    def fixed_point(self):
        return -1 / self.k

    def boundary_position(self, t):
        """
        Length of the domain at time ``t``.

        >>> DomainGeometry(0.25).boundary_position(4)
        2.0
        """
        if t < 0:
            raise OutOfDomain(f"time must be non-negative, got {t!r}")
        return 1 + self.k * t

    def characteristic_feet(self, t):
        """
        The coordinates ``t - l(t)`` and ``t + l(t)`` met by the
        characteristics through the moving boundary at time ``t``.

        >>> DomainGeometry(0.5).characteristic_feet(2.0)
        (0.0, 4.0)
        """
        return (1 - self.k) * t - 1, (1 + self.k) * t + 1

    def char_map(self, y, n=1):
        """
        ``F`` applied ``n`` times; negative ``n`` applies the inverse.

        >>> DomainGeometry(0.5).char_map(-2.0, 5)
        -2.0
        """
        shift = 1 / self.k
        return self.theta**n * (y + shift) - shift

    def interval_endpoints(self, n):
        """
        The interval ``I_n = [F^n(-1), F^n(1))``.

        >>> DomainGeometry(0.5).interval_endpoints(1)
        (1.0, 7.0)
        """
        return self.char_map(-1.0, n), self.char_map(1.0, n)

    def interval_index(self, y):
        """
        The ``n >= 0`` for which ``y`` lies in ``I_n``.

        >>> geom = DomainGeometry(0.5)
        >>> geom.interval_index(0.0), geom.interval_index(5.0)
        (0, 1)
        """
        if y < -1:
            raise OutOfDomain(f"coordinate {y!r} lies left of I_0")
        scaled = (y + 1 / self.k) * self.k / (1 - self.k)
        n = max(math.floor(math.log(scaled) / math.log(self.theta)), 0)
        left, right = self.interval_endpoints(n)
        if y < left:
            n -= 1
        elif y >= right:
            n += 1
        return n

    def breakpoint_times(self, coordinates, t_max, offsets=(-1, 1)):
        """
        Times in ``[0, t_max]`` at which the boundary characteristics
        ``t - l(t)`` (offset -1) or ``t + l(t)`` (offset +1) cross one of
        ``coordinates``.

        >>> DomainGeometry(0.5).breakpoint_times([1.0, 7.0], 10)
        array([0., 4.])
        """
        coords = np.asarray(list(coordinates), dtype=float)
        times = []
        if -1 in offsets:
            times.append((coords + 1) / (1 - self.k))
        if 1 in offsets:
            times.append((coords - 1) / (1 + self.k))
        times = np.concatenate(times) if times else np.empty(0)
        times = times[(times >= 0) & (times <= t_max)]
        return np.unique(times)
