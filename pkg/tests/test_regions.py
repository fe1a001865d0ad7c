import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cclab.constellations import standard_by_name
from cclab.errors import InvalidArgumentError
from cclab.experiments import polar
from cclab.models import ChannelInstance, NoiseRule, RateRegion, RateUnits, Regime, RegionKind
from cclab.regions import (
    cc_region, classify_regime, gaussian_region, region_boundary_points, region_vertices, regime_from_ratios,
)

BITS = RateUnits.BITS_PER_CHANNEL_USE


def region(r1, r2, s):
    return RateRegion.from_bounds(r1, r2, s, BITS, RegionKind.CC_CAPACITY)


@pytest.mark.parametrize("instance,expected", [
    (ChannelInstance(p1=10.0, p2=10.0, h12=1 + 0j, h21=1 + 0j), Regime.STRONG),
    (ChannelInstance(p1=7.0, p2=12.0, h12=polar(1, 10), h21=polar(0.9, 20), bandwidth_w=2.0), Regime.WEAK),
    (ChannelInstance(p1=7.0, p2=12.0, h12=polar(1, 10), h21=polar(1, 20), bandwidth_w=2.0), Regime.STRONG),
    (ChannelInstance(p1=1.0, p2=1.0, h12=10 + 0j, h21=10 + 0j), Regime.VERY_STRONG),
    (ChannelInstance(p1=5.0, p2=5.0), Regime.WEAK),
])
def test_classify_regime(instance, expected):
    report = classify_regime(instance)
    assert report.regime == expected
    assert report.snr1 == pytest.approx(instance.snr1)


def test_regime_boundaries_count_as_the_stronger_side():
    assert regime_from_ratios(10, 10, 10, 10) == Regime.STRONG
    assert regime_from_ratios(1, 1, 2, 2) == Regime.VERY_STRONG
    assert regime_from_ratios(1, 1, 2, 1.999) == Regime.STRONG


@given(st.floats(min_value=0.1, max_value=100), st.floats(min_value=0.1, max_value=100),
       st.floats(min_value=0, max_value=5), st.floats(min_value=0, max_value=5),
       st.floats(min_value=1e-3, max_value=1e3))
def test_regime_is_scale_invariant(p1, p2, g12, g21, factor):
    inst = ChannelInstance(p1=p1, p2=p2, h12=complex(g12, 0), h21=complex(0, g21))
    assert classify_regime(inst.scaled(factor)).regime == classify_regime(inst).regime


def test_gaussian_region_unit_everything():
    r = gaussian_region(ChannelInstance(p1=1.0, p2=1.0, h12=1 + 0j, h21=1j))
    assert r.r1_max == pytest.approx(1.0)
    assert r.r2_max == pytest.approx(1.0)
    assert r.sum_max == pytest.approx(math.log2(3))
    assert r.kind == RegionKind.GAUSSIAN_CAPACITY
    assert r.units == BITS


def test_gaussian_region_in_bandwidth_mode(strong_instance):
    r = gaussian_region(strong_instance)
    assert r.units == RateUnits.BITS_PER_SECOND
    assert r.r1_max == pytest.approx(2 * math.log2(4.5))
    assert r.r2_max == pytest.approx(2 * math.log2(7))
    assert r.sum_max == pytest.approx(2 * math.log2(10.5))


def test_gaussian_region_without_interference_is_an_inner_bound():
    r = gaussian_region(ChannelInstance(p1=3.0, p2=3.0))
    assert r.kind == RegionKind.GAUSSIAN_INNER
    assert r.r1_max == pytest.approx(2.0)
    assert r.sum_max == pytest.approx(2.0)


def test_single_point_region_is_degenerate(single_point, gh_rule):
    r = cc_region(single_point, single_point, ChannelInstance(p1=5.0, p2=5.0, h12=1 + 0j, h21=1 + 0j), 0.0, gh_rule)
    assert r.is_degenerate


def test_high_power_qpsk_region(qpsk, gh_rule):
    inst = ChannelInstance(p1=1000.0, p2=1000.0, h12=1 + 0j, h21=1 + 0j)
    r = cc_region(qpsk, qpsk, inst, math.pi / 4, gh_rule)
    assert r.r1_max == pytest.approx(2.0, abs=1e-6)
    assert r.sum_max == pytest.approx(4.0, abs=1e-2)
    assert r.kind == RegionKind.CC_CAPACITY
    assert "QPSK/QPSK at 45.00 deg" == r.label


def test_unrotated_qpsk_region(qpsk, gh_rule, rotation_row_one):
    r = cc_region(qpsk, qpsk, rotation_row_one, 0.0, gh_rule)
    assert r.sum_max == pytest.approx(3.006, abs=0.02)
    assert r.std_error == 0.0


def test_monte_carlo_region_carries_its_error(qpsk, rotation_row_one):
    r = cc_region(qpsk, qpsk, rotation_row_one, 0.0, NoiseRule.monte_carlo(samples=20_000, seed=3))
    assert r.std_error > 0


@given(p1=st.floats(min_value=0.1, max_value=30), p2=st.floats(min_value=0.1, max_value=30),
       m12=st.floats(min_value=0, max_value=2), m21=st.floats(min_value=0, max_value=2),
       theta=st.floats(min_value=0, max_value=2 * math.pi))
@settings(deadline=None, max_examples=25)
def test_constellation_region_inside_gaussian_region(p1, p2, m12, m21, theta):
    qpsk = standard_by_name("psk4")
    inst = ChannelInstance(p1=p1, p2=p2, h12=polar(m12, 30), h21=polar(m21, -50))
    cc = cc_region(qpsk, qpsk, inst, theta, NoiseRule())
    gauss = gaussian_region(inst)
    assert cc.r1_max <= gauss.r1_max + 1e-6
    assert cc.r2_max <= gauss.r2_max + 1e-6
    assert cc.sum_max <= gauss.sum_max + 1e-6


@pytest.mark.parametrize("bounds,expected", [
    ((1.0, 1.0, 1.5), [(0.0, 1.0), (0.5, 1.0), (1.0, 0.5), (1.0, 0.0)]),
    ((1.0, 1.0, 2.0), [(0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]),
    ((2.0, 2.0, 1.0), [(0.0, 1.0), (1.0, 0.0)]),
    ((0.0, 0.0, 0.0), [(0.0, 0.0)]),
])
def test_region_vertices(bounds, expected):
    vertices = region_vertices(region(*bounds))
    assert len(vertices) == len(expected)
    for vertex, corner in zip(vertices, expected):
        assert vertex == pytest.approx(corner)


def test_boundary_points_include_every_corner():
    r = region(1.0, 1.0, 1.5)
    points = region_boundary_points(r, 10)
    assert len(points) == 10
    assert points[0] == (0.0, 1.0)
    assert points[-1] == (1.0, 0.0)
    for corner in region_vertices(r):
        assert corner in points


def test_boundary_points_of_a_two_two_three_pentagon():
    points = region_boundary_points(region(2.0, 2.0, 3.0), 7)
    assert len(points) == 7
    assert (1.0, 2.0) in points
    assert (2.0, 1.0) in points


def test_boundary_points_edge_cases():
    assert region_boundary_points(region(0, 0, 0), 5) == [(0.0, 0.0)] * 5
    with pytest.raises(InvalidArgumentError):
        region_boundary_points(region(1.0, 1.0, 1.5), 3)
    assert region_boundary_points(region(1.0, 1.0, 1.5), 4) == region_vertices(region(1.0, 1.0, 1.5))
    with pytest.raises(InvalidArgumentError):
        region_boundary_points(region(1, 1, 1), 1)


@given(st.floats(min_value=0, max_value=5), st.floats(min_value=0, max_value=5),
       st.floats(min_value=0, max_value=10), st.integers(min_value=4, max_value=40))
def test_boundary_points_satisfy_the_bounds(r1, r2, s, n):
    r = region(r1, r2, s)
    points = region_boundary_points(r, n)
    assert len(points) == n
    for x, y in points:
        assert -1e-9 <= x <= r.r1_max + 1e-9
        assert -1e-9 <= y <= r.r2_max + 1e-9
        assert x + y <= r.sum_max + 1e-9
