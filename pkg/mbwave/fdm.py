"""
Finite-difference reference solver on the fixed interval ``0 <= y <= 1``,
``y = x / (1 + kt)``.

In the mapped variables the Riemann invariants ``R = u_t + u_x`` and
``L = u_t - u_x`` are transported,

    R_s = (1 + ky)/l R_y,    L_s = -(1 - ky)/l L_y,

so ``R`` enters through the moving end and ``L`` through ``y = 0``.
The displacement ``v(y, s) = u(yl, s)`` follows ``v_s = u_t + ky u_x``.
Space is discretized by second-order upwind differences, time by the
classical fourth-order Runge-Kutta method; boundary conditions fix the
incoming invariant at every stage. Delayed boundary velocities come from
a ring buffer of past traces.
"""

import collections
import dataclasses
import logging
import math

import numpy as np
from scipy import integrate as _integrate

from .delay import DelayProfile
from .errors import Divergence, ValidationError


log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class FdmGrid:
    ny: int
    dt: float
    cfl: float
    t_max: float

    @classmethod
    def build(cls, ny, t_max, k, tau=None, cfl=0.5):
        """
        Choose the time step for a Courant ratio of at most ``cfl``,
        shrinking it so that ``tau`` is a whole number of steps.

        >>> grid = FdmGrid.build(101, 1.0, 0.5, tau=0.1)
        >>> steps = 0.1 / grid.dt
        >>> abs(steps - round(steps)) < 1e-9, grid.cfl <= 0.5
        (True, True)
        """
        ny = int(ny)
        if ny < 16:
            raise ValidationError(f"the grid needs at least 16 nodes, got {ny}")
        if not 0 < cfl <= 0.9:
            raise ValidationError(f"Courant ratio must lie in (0, 0.9], got {cfl!r}")
        h = 1 / (ny - 1)
        dt = cfl * h / (1 + k)
        if tau is not None:
            dt = tau / math.ceil(tau / dt)
        return cls(ny=ny, dt=dt, cfl=dt * (1 + k) / h, t_max=float(t_max))

    @property
    def spacing(self):
        return 1 / (self.ny - 1)

    @property
    def y(self):
        return np.linspace(0.0, 1.0, self.ny)


@dataclasses.dataclass
class FdmResult:
    grid: FdmGrid
    k: float
    t: float
    v: np.ndarray
    ut: np.ndarray
    ux: np.ndarray
    times: np.ndarray
    energy: np.ndarray

    @property
    def x(self):
        return self.grid.y * (1 + self.k * self.t)


def _sample(func, points):
    return np.array([float(func(p)) for p in points])


def _upwind_right(w, h):
    "Derivative using the node and the two to its right."
    d = np.zeros_like(w)
    d[:-2] = (-3 * w[:-2] + 4 * w[1:-1] - w[2:]) / (2 * h)
    d[-2] = (w[-1] - w[-3]) / (2 * h)
    return d


def _upwind_left(w, h):
    "Derivative using the node and the two to its left."
    d = np.zeros_like(w)
    d[2:] = (3 * w[2:] - 4 * w[1:-1] + w[:-2]) / (2 * h)
    d[1] = (w[2] - w[0]) / (2 * h)
    return d


class _Boundary:
    """
    Incoming invariants at both ends and, for delayed feedback, the ring
    buffer of boundary velocities.
    """

    def __init__(self, scenario, grid):
        self.delay = scenario.is_delay
        if self.delay:
            self.mu1, self.mu2, self.tau = scenario.mu1, scenario.mu2, scenario.tau
            self.xi = scenario.xi
            if self.mu1 == -1:
                raise ValidationError("the reference solver needs mu1 != -1")
            g0 = scenario.history_data()
            steps = round(self.tau / grid.dt)
            past = -self.tau + grid.dt * np.arange(steps)
            self.trace = collections.deque(
                zip(past, _sample(g0, past)), maxlen=steps + 1
            )
        else:
            a = scenario.a
            self.mu = (1 - a) / (1 + a)

    def delayed(self, s):
        times, values = zip(*self.trace)
        return float(np.interp(s - self.tau, times, values))

    def impose(self, R, L, s):
        # Neumann at x = 0 reflects, Dirichlet inverts
        L[0] = -R[0] if self.delay else R[0]
        if self.delay:
            R[-1] = ((1 - self.mu1) * L[-1] - 2 * self.mu2 * self.delayed(s)) / (
                1 + self.mu1
            )
        else:
            R[-1] = self.mu * L[-1]

    def record(self, R, L, s):
        if self.delay:
            self.trace.append((s, 0.5 * (R[-1] + L[-1])))

    def history_energy(self):
        if not self.delay:
            return 0.0
        times, values = (np.array(col) for col in zip(*self.trace))
        return self.xi / (2 * self.tau) * _integrate.trapezoid(values**2, times)


def solve_fdm(scenario, grid, limit=1e12):
    """
    March the scenario from ``t = 0`` to ``grid.t_max``.

    ``scenario`` provides ``k``, ``is_delay``, ``initial_data()`` and the
    gains of its problem.
    """
    k = scenario.k
    y = grid.y
    h = grid.spacing
    data = scenario.initial_data()
    velocity, slope = _sample(data.u1, y), _sample(data.u0_prime, y)
    R, L = velocity + slope, velocity - slope
    v = _sample(data.u0, y)
    boundary = _Boundary(scenario, grid)
    boundary.impose(R, L, 0.0)
    boundary.record(R, L, 0.0)

    def rhs(state, s):
        R, L, v = state.copy()
        boundary.impose(R, L, s)
        length = 1 + k * s
        dR = (1 + k * y) / length * _upwind_right(R, h)
        dL = -(1 - k * y) / length * _upwind_left(L, h)
        dv = 0.5 * (R + L) + 0.5 * k * y * (R - L)
        dR[-1] = dL[0] = 0.0
        return np.array([dR, dL, dv])

    def energy(state, s):
        R, L, _ = state
        field = (1 + k * s) / 4 * _integrate.trapezoid(R**2 + L**2, dx=h)
        return field + boundary.history_energy()

    state = np.array([R, L, v])
    s = 0.0
    steps = max(int(math.ceil(grid.t_max / grid.dt - 1e-9)), 1)
    times, energies = [0.0], [energy(state, 0.0)]
    for n in range(steps):
        dt = min(grid.dt, grid.t_max - s)
        k1 = rhs(state, s)
        k2 = rhs(state + 0.5 * dt * k1, s + 0.5 * dt)
        k3 = rhs(state + 0.5 * dt * k2, s + 0.5 * dt)
        k4 = rhs(state + dt * k3, s + dt)
        state = state + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        s = (n + 1) * grid.dt if n + 1 < steps else grid.t_max
        boundary.impose(state[0], state[1], s)
        boundary.record(state[0], state[1], s)
        peak = np.max(np.abs(state))
        if not np.isfinite(peak) or peak > limit:
            raise Divergence(f"field norm exceeded {limit:g} at t={s:.6g}")
        times.append(s)
        energies.append(energy(state, s))
    log.debug("FDM: %d steps of %.3g on %d nodes", steps, grid.dt, grid.ny)

    R, L, v = state
    return FdmResult(
        grid=grid,
        k=k,
        t=s,
        v=v,
        ut=0.5 * (R + L),
        ux=0.5 * (R - L),
        times=np.array(times),
        energy=np.array(energies),
    )


def mapped_residual(v, y, s, k, h):
    """
    Centered-difference value of the mapped wave operator

        v_ss - (2ky/l) v_sy - ((1 - k^2 y^2)/l^2) v_yy + (2k^2 y/l^2) v_y

    applied to the callable ``v(y, s)``; it vanishes, up to ``O(h^2)``,
    exactly when ``u(x, t) = v(x/l, t)`` solves the wave equation.
    """
    length = 1 + k * s
    centre = v(y, s)
    v_ss = (v(y, s + h) - 2 * centre + v(y, s - h)) / h**2
    v_yy = (v(y + h, s) - 2 * centre + v(y - h, s)) / h**2
    v_y = (v(y + h, s) - v(y - h, s)) / (2 * h)
    v_sy = (
        v(y + h, s + h) - v(y + h, s - h) - v(y - h, s + h) + v(y - h, s - h)
    ) / (4 * h**2)
    return (
        v_ss
        - 2 * k * y / length * v_sy
        - (1 - (k * y) ** 2) / length**2 * v_yy
        + 2 * k**2 * y / length**2 * v_y
    )


def reference_gradient(profile, result):
    "``(u_t, u_x)`` of the characteristic solution on the result's nodes."
    pairs = [_gradient(profile, x, result.t) for x in result.x]
    ut, ux = (np.array(col) for col in zip(*pairs))
    return ut, ux


def _gradient(profile, x, t):
    fp_right, fp_left = profile.fprime(t + x), profile.fprime(t - x)
    if isinstance(profile, DelayProfile):
        return fp_right - fp_left, fp_right + fp_left
    return fp_right + fp_left, fp_right - fp_left


def l2_error(result, reference):
    """
    Relative ``L^2(0, l)`` distance between the FDM gradient and that
    of ``reference``, a characteristic profile.
    """
    x = result.x
    ut, ux = reference_gradient(reference, result)
    diff = _integrate.trapezoid((result.ut - ut) ** 2 + (result.ux - ux) ** 2, x)
    norm = _integrate.trapezoid(ut**2 + ux**2, x)
    return float(math.sqrt(diff / norm)) if norm > 0 else float(math.sqrt(diff))


def observed_order(errors, spacings):
    """
    Convergence order between successive refinements.

    >>> [round(p, 9) for p in observed_order([4e-4, 1e-4], [0.02, 0.01])]
    [2.0]
    """
    return [
        math.log(e0 / e1) / math.log(h0 / h1)
        for (e0, e1), (h0, h1) in zip(
            zip(errors, errors[1:]), zip(spacings, spacings[1:])
        )
    ]

