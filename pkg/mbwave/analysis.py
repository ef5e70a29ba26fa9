"""
Energies, their exact rates, and the regimes the feedback gains select.

>>> th = thresholds(0.5)
>>> round(th.a1, 6), th.b1, th.b2, round(th.a2, 6)
(0.267949, 0.5, 2.0, 3.732051)
>>> classify_neumann_regime(0.5, 1.0).kind.value
'DecayAtLeastFirstOrder'
>>> decay_bounds_r7(0.5, 2, 1.0)
(0.16666666666666666, 1.5)
"""

import dataclasses
import enum
import logging
import math
from typing import NamedTuple, Optional, Union

import numpy as np

from . import quadrature
from .data import InitialData, exponent_for, self_similar
from .delay import DelayProfile
from .errors import ValidationError
from .geometry import DomainGeometry


log = logging.getLogger(__name__)


class Thresholds(NamedTuple):
    a1: float
    a2: float
    b1: float
    b2: float


def thresholds(k):
    """
    The roots ``a1 < a2`` of ``k a^2 - 2a + k`` and ``b1 = k``, ``b2 = 1/k``.
    """
    k = DomainGeometry(k).k
    root = math.sqrt(1 - k * k)
    return Thresholds(a1=(1 - root) / k, a2=(1 + root) / k, b1=k, b2=1 / k)


def rate_coefficient(k, a):
    "``f(a) = k a^2 - 2a + k``; the Neumann energy changes at ``f(a)/2 u_t^2``."
    return k * a * a - 2 * a + k


def virial_coefficient(k, a):
    "``g(a) = a^2 - 2ka + 1``"
    return a * a - 2 * k * a + 1


def sandwich_coefficient(k, a):
    """
    ``h(a) = k g(a) + f(a)``, which vanishes exactly at ``a = k`` and
    ``a = 1/k``.

    >>> sandwich_coefficient(0.5, 0.5), sandwich_coefficient(0.5, 2.0)
    (0.0, 0.0)
    """
    return k * virial_coefficient(k, a) + rate_coefficient(k, a)


class NeumannKind(enum.Enum):
    IncreasingPolynomialOnly = 'IncreasingPolynomialOnly'
    Conserved = 'Conserved'
    DecayExactlyFirstOrder = 'DecayExactlyFirstOrder'
    DecayAtLeastFirstOrder = 'DecayAtLeastFirstOrder'
    DecayAtMostFirstOrder = 'DecayAtMostFirstOrder'
    # Named for completeness; no gain produces it.
    ExponentiallyStable = 'ExponentiallyStable'


class DelayKind(enum.Enum):
    DecreasingWithWindow = 'DecreasingWithWindow'
    IncreasingWithWindow = 'IncreasingWithWindow'
    Indeterminate = 'Indeterminate'


@dataclasses.dataclass(frozen=True)
class NeumannRegime:
    kind: NeumannKind
    thresholds: Thresholds

    @property
    def monotonicity(self):
        """
        +1 if the energy cannot decrease, -1 if it cannot increase, 0 if
        it is constant.
        """
        if self.kind is NeumannKind.IncreasingPolynomialOnly:
            return 1
        if self.kind is NeumannKind.Conserved:
            return 0
        return -1

    def to_record(self):
        return dict(kind=self.kind.value, **self.thresholds._asdict())

    @classmethod
    def from_record(cls, record):
        return cls(
            NeumannKind(record['kind']),
            Thresholds(*(record[name] for name in Thresholds._fields)),
        )


@dataclasses.dataclass(frozen=True)
class TauWindow:
    """
    An interval of admissible delays.

    >>> TauWindow(1.0, 2.0, False, True).contains(2.0)
    True
    >>> TauWindow(1.0, 2.0, False, True).contains(1.0)
    False
    """

    lower: float
    upper: float
    lower_closed: bool
    upper_closed: bool

    @property
    def empty(self):
        if self.lower < self.upper:
            return False
        return not (self.lower == self.upper and self.lower_closed and self.upper_closed)

    def contains(self, tau):
        above = tau >= self.lower if self.lower_closed else tau > self.lower
        below = tau <= self.upper if self.upper_closed else tau < self.upper
        return above and below

    def __str__(self):
        left = '[' if self.lower_closed else '('
        right = ']' if self.upper_closed else ')'
        return f'{left}{self.lower:.6g}, {self.upper:.6g}{right}'


@dataclasses.dataclass(frozen=True)
class DelayRegime:
    kind: DelayKind
    tau_window: Optional[TauWindow] = None
    rate_constant: Optional[float] = None
    tau_ok: Optional[bool] = None

    def to_record(self):
        window = self.tau_window
        return dict(
            kind=self.kind.value,
            tau_window=None if window is None else [window.lower, window.upper],
            tau_window_closed=(
                None if window is None else [window.lower_closed, window.upper_closed]
            ),
            rate_constant=self.rate_constant,
            tau_ok=self.tau_ok,
        )

    @classmethod
    def from_record(cls, record):
        window = None
        if record.get('tau_window') is not None:
            window = TauWindow(*record['tau_window'], *record['tau_window_closed'])
        return cls(
            DelayKind(record['kind']),
            window,
            record.get('rate_constant'),
            record.get('tau_ok'),
        )


Regime = Union[NeumannRegime, DelayRegime]


@dataclasses.dataclass(frozen=True)
class EnergyTrace:
    times: np.ndarray
    E: np.ndarray
    dE: np.ndarray
    boundary_ut: np.ndarray
    delayed_ut: Optional[np.ndarray] = None
    regime: Optional[Regime] = None

    def __post_init__(self):
        for name in ('times', 'E', 'dE', 'boundary_ut', 'delayed_ut'):
            if getattr(self, name) is None:
                continue
            values = np.asarray(getattr(self, name), dtype=float)
            if not np.all(np.isfinite(values)):
                raise ValidationError(f"energy trace {name} has non-finite entries")
            object.__setattr__(self, name, values)
        if np.any(np.diff(self.times) <= 0):
            raise ValidationError("energy trace times must be strictly increasing")

    @property
    def columns(self):
        names = ['t', 'E', 'dE_analytic', 'ut_boundary']
        return names + (['ut_delayed'] if self.delayed_ut is not None else [])

    def rows(self):
        columns = [self.times, self.E, self.dE, self.boundary_ut]
        if self.delayed_ut is not None:
            columns.append(self.delayed_ut)
        return zip(*columns)


def classify_neumann_regime(k, a):
    th = thresholds(k)
    if a < th.a1 or a > th.a2:
        kind = NeumannKind.IncreasingPolynomialOnly
    elif a in (th.a1, th.a2):
        kind = NeumannKind.Conserved
    elif a in (th.b1, th.b2):
        kind = NeumannKind.DecayExactlyFirstOrder
    elif th.b1 < a < th.b2:
        kind = NeumannKind.DecayAtLeastFirstOrder
    else:
        kind = NeumannKind.DecayAtMostFirstOrder
    return NeumannRegime(kind, th)


def _x_breakpoints(profile, t, length):
    "Points of ``(0, length)`` where ``f'(t + x)`` or ``f'(t - x)`` may kink."
    right = profile.breakpoints(t, t + length) - t
    left = t - profile.breakpoints(t - length, t)
    return np.concatenate([right, left])


def _field_energy(p, t, tol, memo):
    "``int f'^2`` over ``[t - l, t + l]`` for the delay profile."
    lo, hi = p.geom.characteristic_feet(t)
    return quadrature.integrate(
        lambda y: p.fprime(y, memo) ** 2,
        lo,
        hi,
        breakpoints=p.breakpoints(lo, hi),
        tol=tol,
    )


def _reduced_energy_E1(p, t, tol):
    """
    Each piece of ``[t - l, t + l]`` inside ``I_n`` maps back to ``I_0``,
    where the square of f' is integrated against the factor
    ``mu^2n theta^n``.
    """
    geom = p.geom
    lo, hi = geom.characteristic_feet(t)
    base_points = [0.0, *p.data.breakpoints, *(-b for b in p.data.breakpoints)]
    total = 0.0
    for n in range(geom.interval_index(lo), geom.interval_index(hi) + 1):
        if n and p.a == 1:
            break
        left, right = geom.interval_endpoints(n)
        a, b = max(lo, left), min(hi, right)
        if b <= a:
            continue
        foot_a = max(geom.char_map(a, -n), -1.0)
        foot_b = min(geom.char_map(b, -n), 1.0)
        piece = quadrature.integrate(
            lambda z: p.base_fprime(z) ** 2, foot_a, foot_b, base_points, tol
        )
        total += p.mu_a ** (2 * n) * geom.theta**n * piece
    return total


def _direct_energy(p, t, tol):
    "Half the integral of ``u_t^2 + u_x^2`` over the domain."
    length = p.geom.boundary_position(t)

    def density(x):
        _, ut, ux = p.state(x, t)
        return 0.5 * (ut * ut + ux * ux)

    return quadrature.integrate(density, 0.0, length, _x_breakpoints(p, t, length), tol)


def energy_E1(p, t, method='reduced', tol=1e-10):
    """
    ``E1(t) = 1/2 int_0^l (u_t^2 + u_x^2) dx``.

    ``method='reduced'`` integrates the square of f' over
    ``[t - l, t + l]`` interval by interval; ``'direct'`` integrates the
    two gradient components across the domain.
    """
    if t < 0:
        raise ValidationError(f"time must be non-negative, got {t!r}")
    if method == 'direct':
        return _direct_energy(p, t, tol)
    if method != 'reduced':
        raise ValidationError(f"unknown energy method {method!r}")
    return _reduced_energy_E1(p, t, tol)


def energy_rate_E1(p, t):
    ut, _ = p.boundary_trace(t)
    return 0.5 * rate_coefficient(p.geom.k, p.a) * ut * ut


def moment(profile, t, tol=1e-10):
    "``int_0^l x u_t u_x dx``"
    length = profile.geom.boundary_position(t)

    def density(x):
        fp_right, fp_left = profile.fprime(t + x), profile.fprime(t - x)
        return x * (fp_right**2 - fp_left**2)

    return quadrature.integrate(
        density, 0.0, length, _x_breakpoints(profile, t, length), tol
    )


def virial_identity_residual(p, T, tol=1e-10):
    """
    ``(1+kT) E1(T) + k M(T) - E1(0) - k M(0)`` with ``M`` the moment;
    zero whenever ``a`` is ``k`` or ``1/k``.
    """
    k = p.geom.k
    start = energy_E1(p, 0.0, tol=tol) + k * moment(p, 0.0, tol)
    end = (1 + k * T) * energy_E1(p, T, tol=tol) + k * moment(p, T, tol)
    return end - start


def decay_bounds_r7(k, T, E0):
    """
    Two-sided bound on ``E1(T)`` for ``a`` in ``{k, 1/k}``.

    >>> decay_bounds_r7(0.5, 0, 1.0)
    (0.3333333333333333, 3.0)
    """
    lower = (1 - k) / ((1 + k) * (1 + k * T)) * E0
    upper = (1 + k) / ((1 - k) * (1 + k * T)) * E0
    return lower, upper


def decay_bounds(k, a, T, E0):
    """
    Bounds on ``E1(T)`` valid throughout the decaying regimes, from the
    moment identity; ``None`` where no bound of this kind holds.
    """
    th = thresholds(k)
    if a in (th.b1, th.b2):
        return decay_bounds_r7(k, T, E0)
    if not th.a1 < a < th.a2:
        return None, None
    G = virial_coefficient(k, a) / -rate_coefficient(k, a)
    if th.b1 < a < th.b2:
        denominator = G - 1 + (1 - k) * T
        upper = (G + 1) / denominator * E0 if denominator > 0 else None
        return None, upper
    return (G - 1) / (G + 1 + (1 + k) * T) * E0, None


def example_exponent(k, a):
    "``ln mu_a / ln theta``, the exponent of the self-similar solutions."
    return exponent_for(k, a)


def g_k(k, a):
    """
    Power of ``t + 1/k`` the self-similar energies follow.

    >>> round(g_k(0.5, 0.5), 12)
    -1.0
    """
    return 2 * example_exponent(k, a) + 1


class ExampleSolution(NamedTuple):
    data: InitialData
    a: float
    energy: object


def example_solution(kind, k, a=None):
    """
    Self-similar data, the gain that sustains them and their energy in
    closed form.

    >>> ex = example_solution('Ex1', 0.5)
    >>> ex.a, round(ex.energy(0.0), 12), round(ex.energy(2.0), 12)
    (0.5, 0.666666666667, 0.333333333333)
    >>> round(example_solution('Ex2', 0.5).energy(7.0), 7)
    1.0986123
    """
    k = DomainGeometry(k).k
    if kind == 'Ex1':

        def energy(t):
            return k / (1 + k * t) * (1 / (1 - k) - 1 / (1 + k))

        return ExampleSolution(self_similar(k, -1, 'example1'), k, energy)
    if kind == 'Ex2':
        log_theta = math.log((1 + k) / (1 - k))
        return ExampleSolution(
            self_similar(k, -0.5, 'example2'), thresholds(k).a1, lambda t: log_theta
        )
    if kind != 'Ex3':
        raise ValidationError(f"unknown example {kind!r}; expected Ex1, Ex2 or Ex3")
    if a is None or not -1 < a < 1:
        raise ValidationError(f"Ex3 needs -1 < a < 1, got {a!r}")
    if a in (k, thresholds(k).a1):
        raise ValidationError("Ex3 excludes a = k and a = a1; use Ex1 or Ex2")
    exponent = example_exponent(k, a)
    g = 2 * exponent + 1
    factor = ((1 + k) ** g - (1 - k) ** g) / g

    def energy(t):
        return factor * (t + 1 / k) ** g

    return ExampleSolution(self_similar(k, exponent, 'example3'), a, energy)


def energy_slope(times, energies, k):
    """
    Least-squares slope of ``ln E`` against ``ln(t + 1/k)``.

    >>> t = np.linspace(1, 10, 5)
    >>> round(energy_slope(t, 3 * (t + 2) ** -1.5, 0.5), 9)
    -1.5
    """
    times = np.asarray(times, dtype=float)
    energies = np.asarray(energies, dtype=float)
    if np.any(energies <= 0):
        raise ValidationError("energy slope needs strictly positive energies")
    slope, _ = np.polyfit(np.log(times + 1 / k), np.log(energies), 1)
    return float(slope)


def _history_breakpoints(p, lo, hi):
    "Times in ``[lo, hi]`` where the boundary velocity may kink."
    k = p.geom.k
    ys = p.breakpoints(p.lower, (1 + k) * max(hi, 0) + 1)
    times = np.concatenate(
        [
            [0.0],
            p.params.history_breakpoints,
            (ys - 1) / (1 + k),
            (ys + 1) / (1 - k),
        ]
    )
    return times[(times > lo) & (times < hi)]


def energy_E2(p, t, tol=1e-10):
    """
    Field energy plus ``xi/2`` times the mean square of the boundary
    velocity over the last delay span.
    """
    if t < 0:
        raise ValidationError(f"time must be non-negative, got {t!r}")
    memo = p.memo()
    field = _field_energy(p, t, tol, memo)
    tau = p.params.tau
    history = quadrature.integrate(
        lambda s: p.boundary_velocity(s, memo) ** 2,
        t - tau,
        t,
        _history_breakpoints(p, t - tau, t),
        tol,
    )
    return field + p.params.xi / (2 * tau) * history


def delay_coefficients(k, mu1, mu2, xi, tau):
    """
    Coefficients ``(A, B, C)`` of
    ``E2' = A u_t(l,t)^2 + B u_t(delayed)^2 + C u_t(l,t) u_t(delayed)``.

    >>> delay_coefficients(0.5, 2.0, 0.0, 1.0, 1.0)
    (-0.25, -0.5, 0.0)
    """
    history = xi / (2 * tau)
    return (
        k * (1 + mu1 * mu1) / 2 - mu1 + history,
        k * mu2 * mu2 / 2 - history,
        k * mu1 * mu2 - mu2,
    )


def energy_rate_E2(p, t):
    par = p.params
    memo = p.memo()
    u = p.boundary_velocity(t, memo)
    v = p.boundary_velocity(t - par.tau, memo)
    A, B, C = delay_coefficients(p.geom.k, par.mu1, par.mu2, par.xi, par.tau)
    return A * u * u + B * v * v + C * u * v


def _window(k, lower, upper, closed):
    """
    Intersect a window with ``(0, 1/k)``; ``None`` when nothing remains.
    """
    cap = 1 / k
    window = TauWindow(
        lower=max(lower, 0.0),
        upper=min(upper, cap),
        lower_closed=closed and lower > 0,
        upper_closed=closed and upper < cap,
    )
    return None if window.empty else window


def classify_delay_regime(k, mu1, mu2, xi, tau=None):
    """
    Sufficient conditions on ``(mu1, mu2, xi)`` and ``tau`` for the
    delayed energy to decrease or to increase.

    >>> r = classify_delay_regime(0.5, 2.0, 1.0, 1.0)
    >>> r.kind.value, round(r.tau_window.lower, 12), r.tau_window.upper
    ('DecreasingWithWindow', 0.666666666667, 2.0)
    >>> r = classify_delay_regime(0.5, 1.0, 3.0, 1.0)
    >>> r.kind.value, str(r.tau_window)
    ('IncreasingWithWindow', '[0.333333, 0.4]')
    """
    th = thresholds(k)
    if xi <= 0:
        raise ValidationError(f"weight xi must be positive, got {xi!r}")
    d = abs(k * mu1 - 1)
    m = abs(mu2)
    root = math.sqrt(1 - k * k)
    spread = 2 * mu1 - k * (1 + mu1 * mu1)

    if th.a1 < mu1 < th.a2 and m < (-d + root) / k:
        kind = DelayKind.DecreasingWithWindow
        lower_den = spread - d * m
        upper_den = k * m * m + d * m
        if lower_den <= 0:
            return DelayRegime(DelayKind.Indeterminate)
        upper = xi / upper_den if upper_den > 0 else math.inf
        window = _window(k, xi / lower_den, upper, closed=False)
    elif m >= (d + root) / k:
        kind = DelayKind.IncreasingWithWindow
        upper_den = spread + d * m
        upper = xi / upper_den if upper_den > 0 else math.inf
        window = _window(k, xi / (k * m * m - d * m), upper, closed=True)
    else:
        return DelayRegime(DelayKind.Indeterminate)
    if window is None:
        return DelayRegime(DelayKind.Indeterminate)
    if tau is None:
        return DelayRegime(kind, window)

    A, B, _ = delay_coefficients(k, mu1, mu2, xi, tau)
    cross = d * m / 2
    if kind is DelayKind.DecreasingWithWindow:
        rate = -max(A + cross, B + cross)
    else:
        rate = min(A - cross, B - cross)
    return DelayRegime(kind, window, rate, window.contains(tau))


def energy_trace(profile, times, regime=None, tol=1e-10):
    """
    Energy, its exact rate and the boundary velocity at each time.
    """
    times = list(times)
    if isinstance(profile, DelayProfile):
        energy, rate = energy_E2, energy_rate_E2
        ut = profile.boundary_velocity
        tau = profile.params.tau
        delayed = [profile.boundary_velocity(t - tau) for t in times]
    else:
        energy, rate = energy_E1, energy_rate_E1
        delayed = None

        def ut(t):
            return profile.boundary_trace(t)[0]

    log.debug("Energy trace of %r at %d times", profile, len(times))
    return EnergyTrace(
        times=times,
        E=[energy(profile, t, tol=tol) for t in times],
        dE=[rate(profile, t) for t in times],
        boundary_ut=[ut(t) for t in times],
        delayed_ut=delayed,
        regime=regime,
    )
