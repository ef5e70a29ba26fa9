import collections
import itertools
import logging

import numpy as np
import pytest

from mbwave.data import make_history, make_initial
from mbwave.delay import (
    DelayParams,
    DelayProfile,
    build_delay_profile,
    cascade_steps,
    dirichlet_fprime,
)
from mbwave.errors import (
    CompatibilityError,
    DegenerateFeedback,
    OutOfDomain,
    RecursionBound,
    ValidationError,
)
from mbwave.geometry import DomainGeometry


def profile(k=0.5, mu1=2.0, mu2=1.0, tau=1.0, xi=1.0, initial=None, history=None, **options):
    params = DelayParams(
        mu1=mu1,
        mu2=mu2,
        tau=tau,
        xi=xi,
        g0=history or make_history('bump', tau, amplitude=0.5),
    )
    initial = initial or make_initial('sine', velocity=0.5)
    return build_delay_profile(DomainGeometry(k), params, initial, **options)


@pytest.mark.parametrize(
    'tau, mu1, mu2', itertools.product([0.5, 1.5, 1.9], [0.5, 1.0, 2.0], [0.0, 0.5])
)
def test_feedback_law_residual(rng, tau, mu1, mu2):
    """
    At the moving end u_x = -mu1 u_t - mu2 u_t(delayed), with the history
    standing in for negative delayed times.
    """
    p = profile(tau=tau, mu1=mu1, mu2=mu2)
    memo = p.memo()
    for s in rng.uniform(0, 6, 1000):
        minus, plus = p.geom.characteristic_feet(s)
        ut = p.boundary_velocity(s, memo)
        ux = p.fprime(plus, memo) + p.fprime(minus, memo)
        delayed = p.boundary_velocity(s - tau, memo)
        residual = ux + mu1 * ut + mu2 * delayed
        scale = max(abs(ux), abs(mu1 * ut), abs(mu2 * delayed), 1.0)
        assert abs(residual) <= 1e-10 * scale


@pytest.mark.parametrize('tau', [0.5, 1.5, 1.9])
def test_history_relation_residual(rng, tau):
    """
    For negative times the boundary velocity equals the history:
    f'(F(y)) - f'(y) = g0((y + 1)/(1 - k)) on the history segment.
    """
    p = profile(tau=tau)
    k = p.geom.k
    for y in rng.uniform(p.lower, -1, 1000):
        residual = p.fprime(p.geom.char_map(y)) - p.fprime(y)
        expected = float(p.params.g0((y + 1) / (1 - k)))
        assert abs(residual - expected) <= 1e-10 * max(abs(expected), 1.0)


def test_cascade_reaches_target():
    for tau in (0.3, 1.0, 1.5, 1.99):
        steps = cascade_steps(0.5, tau)
        assert steps[0][1] == -1.0
        assert steps[-1][0] == pytest.approx(-(1 - 0.5) * tau - 1)
        for (left, _), (_, right) in zip(steps, steps[1:]):
            assert left == right


def test_undelayed_limit(rng):
    "With mu2 = 0 and no history the delay plays no part."
    p = profile(mu1=2.0, mu2=0.0, history=make_history('zero', 1.0))
    for y in rng.uniform(-1, 40, 100):
        expected = dirichlet_fprime(p.geom, 2.0, p.base_fprime, y)
        assert abs(p.fprime(y) - expected) <= 1e-12 * max(abs(expected), 1.0)


def test_dirichlet_end():
    p = profile()
    for t in (0.0, 0.8, 3.3):
        u, ut, _ = p.state(0.0, t)
        assert u == 0.0
        assert ut == 0.0


def test_reproduces_initial_data():
    initial = make_initial('sine', velocity=0.5)
    p = profile(initial=initial)
    for x in (0.2, 0.5, 0.9):
        u, ut, ux = p.state(x, 0.0)
        assert u == pytest.approx(float(initial.u0(x)), abs=1e-9)
        assert ut == pytest.approx(float(initial.u1(x)), abs=1e-14)
        assert ux == pytest.approx(float(initial.u0_prime(x)), abs=1e-14)


def test_delay_beyond_reach():
    with pytest.raises(ValidationError, match='below 1/k'):
        profile(tau=2.0)


def test_dirichlet_trace():
    with pytest.raises(ValidationError, match='trace violation'):
        profile(initial=make_initial('trig'))


@pytest.mark.parametrize('name, value', [('tau', 0.0), ('xi', -1.0), ('mu1', float('nan'))])
def test_invalid_params(name, value):
    values = dict(mu1=1.0, mu2=1.0, tau=1.0, xi=1.0, g0=make_history('zero', 1.0))
    values[name] = value
    with pytest.raises(ValidationError):
        DelayParams(**values)


class TestReversed:
    "mu1 = -1, where the outgoing wave is read from the delayed one."

    def test_needs_delayed_term(self):
        with pytest.raises(DegenerateFeedback):
            profile(mu1=-1.0, mu2=0.0)

    def test_delay_too_long(self):
        with pytest.raises(ValidationError, match='smaller coordinates'):
            profile(k=0.2, mu1=-1.0, mu2=1.0, tau=3.0)

    def test_incompatible_data(self):
        with pytest.raises(CompatibilityError):
            profile(mu1=-1.0, mu2=1.0, history=make_history('zero', 1.0))

    def test_trivial_data(self, caplog):
        with caplog.at_level(logging.WARNING):
            p = profile(
                mu1=-1.0,
                mu2=1.0,
                initial=make_initial('zero'),
                history=make_history('zero', 1.0),
            )
        assert 'experimentally' in caplog.text
        assert p.fprime(5.0) == 0.0

    def test_feedback_law_residual(self, rng):
        p = profile(
            mu1=-1.0,
            mu2=1.0,
            initial=make_initial('bump', center=0.25, width=0.2, drift=0.3),
            history=make_history('zero', 1.0),
        )
        memo = p.memo()
        velocities = []
        for s in rng.uniform(0, 6, 1000):
            minus, plus = p.geom.characteristic_feet(s)
            ut = p.boundary_velocity(s, memo)
            ux = p.fprime(plus, memo) + p.fprime(minus, memo)
            delayed = p.boundary_velocity(s - 1.0, memo)
            assert abs(ux - ut + delayed) <= 1e-10 * max(abs(ux), abs(ut), 1.0)
            velocities.append(abs(ut))
        assert max(velocities) > 1.0


def test_depth_bound():
    p = profile(mu2=0.5, max_depth=2)
    with pytest.raises(RecursionBound):
        p.fprime(1000.0)


def test_outside_history():
    p = profile(tau=1.0)
    assert p.lower == -1.5
    with pytest.raises(OutOfDomain):
        p.fprime(-1.6)
    with pytest.raises(OutOfDomain):
        p.boundary_velocity(-2.0)
    assert p.boundary_velocity(-0.5) == float(p.params.g0(-0.5))


def test_breakpoints():
    p = profile()
    points = p.breakpoints(p.lower, 30.0)
    assert np.all(np.diff(points) > 0)
    for expected in (-1.5, -1.0, 0.0, 1.0, p.geom.char_map(1.0)):
        assert np.min(np.abs(points - expected)) < 1e-12
    assert list(p.breakpoints(2.0, 3.0)) == [y for y in points if 2.0 <= y <= 3.0]


def test_breakpoint_cap(caplog):
    p = profile(breakpoint_cap=5)
    with caplog.at_level(logging.WARNING):
        points = p.breakpoints(p.lower, 30.0)
    assert len(points) == 5
    assert 'truncated' in caplog.text


def test_freeze():
    p = profile().freeze(12.0)
    assert p.frozen
    assert isinstance(p.memo(), collections.ChainMap)
    cached = len(p._memo)
    value = p.fprime(40.0)
    assert len(p._memo) == cached
    assert value == pytest.approx(profile().fprime(40.0), rel=1e-12)


def test_integral_matches_state():
    p = profile()
    u, _, _ = p.state(0.7, 2.0)
    assert u == pytest.approx(p.integral(2.0 - 0.7, 2.0 + 0.7))


def test_repr():
    assert repr(profile()) == 'DelayProfile(k=0.5, mu1=2.0, mu2=1.0, tau=1.0)'


def test_instance():
    assert isinstance(profile(), DelayProfile)
