import math

import pytest
from hypothesis import given, strategies as st

from mbwave.errors import OutOfDomain, ValidationError
from mbwave.geometry import DomainGeometry


rates = st.floats(min_value=0.05, max_value=0.95)


def reflect(k, y):
    return ((1 + k) * y + 2) / (1 - k)


@given(rates, st.floats(min_value=-1, max_value=1), st.integers(0, 6))
def test_closed_form_matches_composition(k, y, n):
    geom = DomainGeometry(k)
    expected = y
    for _ in range(n):
        expected = reflect(k, expected)
    scale = geom.theta**n * (1 + 1 / k)
    assert math.isclose(geom.char_map(y, n), expected, abs_tol=1e-9 * scale)


@given(rates, st.floats(min_value=-1, max_value=1), st.integers(0, 6))
def test_inverse(k, y, n):
    geom = DomainGeometry(k)
    assert math.isclose(geom.char_map(geom.char_map(y, n), -n), y, abs_tol=1e-6)


@given(rates, st.floats(min_value=-1, max_value=1e4))
def test_interval_index_brackets(k, y):
    geom = DomainGeometry(k)
    n = geom.interval_index(y)
    left, right = geom.interval_endpoints(n)
    assert n >= 0
    assert left <= y < right


@pytest.mark.parametrize('n', range(8))
def test_left_ends_belong_to_their_interval(n):
    geom = DomainGeometry(0.5)
    left, right = geom.interval_endpoints(n)
    assert geom.interval_index(left) == n
    assert geom.interval_index(right) == n + 1


@pytest.mark.parametrize('k', [0, 1, -0.2, 1.5])
def test_rate_out_of_range(k):
    with pytest.raises(ValidationError):
        DomainGeometry(k)


def test_negative_time():
    with pytest.raises(OutOfDomain):
        DomainGeometry(0.5).boundary_position(-1)


def test_left_of_base_interval():
    with pytest.raises(OutOfDomain):
        DomainGeometry(0.5).interval_index(-1.5)


def test_feet_are_reflections():
    geom = DomainGeometry(0.3)
    for t in (0.0, 0.7, 4.0):
        minus, plus = geom.characteristic_feet(t)
        assert math.isclose(geom.char_map(minus), plus)
        assert math.isclose(plus - minus, 2 * geom.boundary_position(t))


def test_breakpoint_times_on_both_feet():
    geom = DomainGeometry(0.5)
    times = geom.breakpoint_times([0.0], 10)
    # t - l(t) = 0 at t = 2
    assert list(times) == [2.0]
    assert list(geom.breakpoint_times([4.0], 10, offsets=(1,))) == [2.0]
