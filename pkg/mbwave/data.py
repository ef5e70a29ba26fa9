"""
Initial data, delay histories and the named presets scenarios refer to.

Presets are factories registered by name. A factory may ask for the
expansion rate ``k`` or the delay ``tau`` simply by naming them as
parameters; anything else comes from the scenario.

>>> data = make_initial('quadratic', k=0.5)
>>> float(data.u0(0.5)), float(data.u0_prime(0.5))
(0.25, 1.0)
>>> make_initial('example1', k=0.5).name
'example1'
"""

import dataclasses
import inspect
import logging
import math
from typing import Callable, Dict, Tuple

import numpy as np
from jaraco.collections import Projection

from .errors import ValidationError


log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class InitialData:
    """
    Displacement ``u0``, its derivative, the velocity ``u1`` and the
    antiderivative ``u1_integral(x) = int_0^x u1`` on ``[0, 1]``.
    ``breakpoints`` lists interior points where the data are not smooth.
    """

    u0: Callable
    u0_prime: Callable
    u1: Callable
    u1_integral: Callable
    breakpoints: Tuple[float, ...] = ()
    name: str = 'custom'

    def validate(self, samples=257):
        grid = np.linspace(0.0, 1.0, samples)
        for label in ('u0', 'u0_prime', 'u1', 'u1_integral'):
            func = getattr(self, label)
            values = np.array([func(x) for x in grid], dtype=float)
            if not np.all(np.isfinite(values)):
                raise ValidationError(f"initial data {label} is not finite on [0, 1]")
        return self


@dataclasses.dataclass(frozen=True)
class History:
    """
    Boundary velocity ``g0`` on the pre-initial delay span ``(-tau, 0)``.
    """

    g0: Callable
    tau: float
    breakpoints: Tuple[float, ...] = ()
    name: str = 'custom'

    def __call__(self, s):
        return self.g0(s)

    def validate(self, samples=257):
        grid = np.linspace(-self.tau, 0.0, samples)
        values = np.array([self.g0(s) for s in grid], dtype=float)
        if not np.all(np.isfinite(values)):
            raise ValidationError("history g0 is not finite on (-tau, 0)")
        return self


class PiecewiseLinear:
    """
    Linear interpolant of samples, with its exact derivative and
    antiderivative.

    >>> pl = PiecewiseLinear([0, 0.5, 1], [0, 1, 0])
    >>> float(pl(0.25)), float(pl.derivative(0.75)), float(pl.integral(1.0))
    (0.5, -2.0, 0.5)
    """

    def __init__(self, nodes, values):
        self.nodes = np.asarray(nodes, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.nodes.ndim != 1 or self.nodes.shape != self.values.shape:
            raise ValidationError("sample nodes and values must be equal-length lists")
        if len(self.nodes) < 2:
            raise ValidationError("at least two samples are required")
        if not np.all(np.diff(self.nodes) > 0):
            raise ValidationError("sample nodes must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("sample values must be finite")
        widths = np.diff(self.nodes)
        self.slopes = np.diff(self.values) / widths
        trapezoids = 0.5 * (self.values[1:] + self.values[:-1]) * widths
        self.cumulative = np.concatenate([[0.0], np.cumsum(trapezoids)])

    def _segment(self, x):
        index = np.searchsorted(self.nodes, x, side='right') - 1
        return np.clip(index, 0, len(self.nodes) - 2)

    def __call__(self, x):
        return np.interp(x, self.nodes, self.values)

    def derivative(self, x):
        return self.slopes[self._segment(x)]

    def integral(self, x):
        "Integral from the first node to ``x``."
        i = self._segment(x)
        dx = x - self.nodes[i]
        return self.cumulative[i] + self.values[i] * dx + 0.5 * self.slopes[i] * dx**2

    @property
    def interior(self):
        return tuple(float(x) for x in self.nodes[1:-1])


_initial: Dict[str, Callable] = {}
_history: Dict[str, Callable] = {}

# offered to every preset, used by those that name them
_CONTEXT = {'k', 'a', 'tau'}


def initial_preset(name):
    def register(factory):
        _initial[name] = factory
        return factory

    return register


def history_preset(name):
    def register(factory):
        _history[name] = factory
        return factory

    return register


def _build(registry, kind, name, available):
    try:
        factory = registry[name]
    except KeyError:
        choices = ', '.join(sorted(registry))
        raise ValidationError(f"unknown {kind} preset {name!r} (one of {choices})")
    params = inspect.signature(factory).parameters
    accepts_any = any(p.kind is p.VAR_KEYWORD for p in params.values())
    unknown = set(available) - set(params) - _CONTEXT
    if unknown and not accepts_any:
        names = ', '.join(sorted(unknown))
        raise ValidationError(f"{kind} preset {name!r} takes no parameter {names}")
    bound = dict(available) if accepts_any else Projection(params.keys(), available)
    try:
        return factory(**bound)
    except TypeError as exc:
        raise ValidationError(f"bad parameters for {kind} preset {name!r}: {exc}")


def make_initial(name, k=None, a=None, **params):
    """
    Construct initial data from a registered preset. ``k`` and ``a`` are
    offered to presets that need them.
    """
    data = _build(_initial, 'initial', name, dict(params, k=k, a=a))
    return data.validate()


def make_history(name, tau, **params):
    "Construct a delay history from a registered preset."
    history = _build(_history, 'history', name, dict(params, tau=tau))
    return history.validate()


def initial_presets():
    return sorted(_initial)


def history_presets():
    return sorted(_history)


def sampled(x, u0, u1, name='samples'):
    """
    Initial data interpolated linearly from samples on ``[0, 1]``.

    >>> data = sampled([0, 0.5, 1], [0, 0.5, 0], [1, 1, 1])
    >>> float(data.u0_prime(0.25)), float(data.u1_integral(0.75))
    (1.0, 0.75)
    """
    nodes = np.asarray(x, dtype=float)
    if nodes[0] != 0 or nodes[-1] != 1:
        raise ValidationError("initial samples must span exactly [0, 1]")
    displacement = PiecewiseLinear(nodes, u0)
    velocity = PiecewiseLinear(nodes, u1)
    return InitialData(
        u0=displacement,
        u0_prime=displacement.derivative,
        u1=velocity,
        u1_integral=velocity.integral,
        breakpoints=displacement.interior,
        name=name,
    )


def random_piecewise_linear(rng, nodes=8, scale=1.0, dirichlet=False):
    """
    Random continuous piecewise-linear data on a jittered grid, for
    exercising the solvers on non-smooth input.
    """
    interior = np.sort(rng.uniform(0, 1, nodes - 2))
    x = np.concatenate([[0.0], interior, [1.0]])
    u0 = scale * rng.standard_normal(nodes)
    if dirichlet:
        u0[0] = 0.0
    u1 = scale * rng.standard_normal(nodes)
    return sampled(x, u0, u1, name='random')


def self_similar(k, exponent, name):
    """
    Data of the solution ``u = f(t+1/k+x) + f(t+1/k-x)`` with
    ``f'(z) = z**exponent``, which satisfies the feedback law whenever
    ``(1-a)/(1+a) = theta**exponent``.
    """
    shift = 1 / k

    if exponent == -1:

        def potential(z):
            return np.log(z)

    else:

        def potential(z):
            return z ** (exponent + 1) / (exponent + 1)

    return InitialData(
        u0=lambda x: potential(shift + x) + potential(shift - x),
        u0_prime=lambda x: (shift + x) ** exponent - (shift - x) ** exponent,
        u1=lambda x: (shift + x) ** exponent + (shift - x) ** exponent,
        u1_integral=lambda x: potential(shift + x) - potential(shift - x),
        name=name,
    )


def exponent_for(k, a):
    """
    ``ln mu_a / ln theta_k``, defined for ``-1 < a < 1``.

    >>> round(exponent_for(0.5, 0.5), 12)
    -1.0
    """
    if not -1 < a < 1:
        raise ValidationError(f"self-similar data need -1 < a < 1, got {a!r}")
    return math.log((1 - a) / (1 + a)) / math.log((1 + k) / (1 - k))


def _require_k(k):
    if k is None:
        raise ValidationError("this preset depends on the expansion rate k")
    return k


@initial_preset('zero')
def zero_data():
    def zero(x):
        return np.zeros_like(np.asarray(x, dtype=float))

    return InitialData(zero, zero, zero, zero, name='zero')


@initial_preset('quadratic')
def quadratic(c=1.0):
    def zero(x):
        return np.zeros_like(np.asarray(x, dtype=float))

    return InitialData(
        u0=lambda x: c * np.square(x),
        u0_prime=lambda x: 2 * c * np.asarray(x, dtype=float),
        u1=zero,
        u1_integral=zero,
        name='quadratic',
    )


@initial_preset('trig')
def trig(amplitude=1.0, mode=1, velocity=0.5):
    w = mode * math.pi
    return InitialData(
        u0=lambda x: amplitude * np.cos(w * x),
        u0_prime=lambda x: -amplitude * w * np.sin(w * x),
        u1=lambda x: velocity * np.sin(w * x),
        u1_integral=lambda x: velocity * (1 - np.cos(w * x)) / w,
        name='trig',
    )


def _bump_shape(center, width):
    "A C^3 bump supported on ``|x - center| < width`` and its derivative."

    def shape(x):
        r = (np.asarray(x, dtype=float) - center) / width
        return np.where(np.abs(r) < 1, (1 - r**2) ** 4, 0.0)

    def slope(x):
        r = (np.asarray(x, dtype=float) - center) / width
        return np.where(np.abs(r) < 1, -8 * r * (1 - r**2) ** 3 / width, 0.0)

    return shape, slope


@initial_preset('bump')
def bump(amplitude=1.0, center=0.5, width=0.25, drift=0.0):
    """
    A smooth pulse away from both ends, so that f' is smooth across every
    interval junction. ``drift`` mixes in a velocity ``drift * u0'``.
    """
    if not 0 < width <= min(center, 1 - center):
        raise ValidationError("bump must be supported inside (0, 1)")
    shape, slope = _bump_shape(center, width)
    return InitialData(
        u0=lambda x: amplitude * shape(x),
        u0_prime=lambda x: amplitude * slope(x),
        u1=lambda x: drift * amplitude * slope(x),
        u1_integral=lambda x: drift * amplitude * (shape(x) - shape(0.0)),
        name='bump',
    )


@initial_preset('sine')
def sine(amplitude=1.0, velocity=0.0):
    "Dirichlet-compatible data, ``u0(0) = 0``."
    w = math.pi / 2
    return InitialData(
        u0=lambda x: amplitude * np.sin(w * x),
        u0_prime=lambda x: amplitude * w * np.cos(w * x),
        u1=lambda x: velocity * np.sin(w * x),
        u1_integral=lambda x: velocity * (1 - np.cos(w * x)) / w,
        name='sine',
    )


@initial_preset('example1')
def example1(k=None):
    "Self-similar solution for ``a = k``: energy decays like ``1/(1+kt)``."
    return self_similar(_require_k(k), -1, 'example1')


@initial_preset('example2')
def example2(k=None):
    "Self-similar solution for ``a = a1``: energy is conserved."
    return self_similar(_require_k(k), -0.5, 'example2')


@initial_preset('example3')
def example3(k=None, a=None):
    "Self-similar solution for ``-1 < a < 1``."
    k = _require_k(k)
    if a is None:
        raise ValidationError("example3 needs the feedback gain a")
    return self_similar(k, exponent_for(k, a), 'example3')


@initial_preset('samples')
def samples_preset(x, u0, u1):
    return sampled(x, u0, u1)


@history_preset('zero')
def zero_history(tau):
    return History(lambda s: 0.0 * np.asarray(s, dtype=float), tau, name='zero')


@history_preset('constant')
def constant_history(tau, value=1.0):
    return History(
        lambda s: value + 0.0 * np.asarray(s, dtype=float), tau, name='constant'
    )


@history_preset('bump')
def bump_history(tau, amplitude=1.0):
    """
    ``amplitude * sin(pi s / tau)**4``, vanishing with three derivatives
    at both ends of the delay span.
    """
    return History(
        lambda s: amplitude * np.sin(math.pi * np.asarray(s) / tau) ** 4,
        tau,
        name='bump',
    )


@history_preset('samples')
def samples_history(tau, s, g0):
    nodes = np.asarray(s, dtype=float)
    if not (math.isclose(nodes[0], -tau) and nodes[-1] == 0):
        raise ValidationError("history samples must span exactly [-tau, 0]")
    interpolant = PiecewiseLinear(nodes, g0)
    return History(interpolant, tau, breakpoints=interpolant.interior, name='samples')
