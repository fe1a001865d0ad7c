import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cclab.constellations import rotate, standard_by_name
from cclab.errors import InternalError, InvalidArgumentError
from cclab.experiments import polar
from cclab.mi_engine import (
    _finish, canonical_orientation, cc_sum_bound, composite_points, conditional_mi, jensen_lower_bound,
    joint_mi, pairwise_log_sums, resolve_rule,
)
from cclab.models import ChannelInstance, NoiseRule, QuadratureMethod, Receiver

MC_RULE = NoiseRule.monte_carlo(samples=1_000_000, seed=7)


def test_conditional_mi_saturates_at_high_power(qpsk, qam16, gh_rule):
    assert conditional_mi(qpsk, 1000.0, 1.0, gh_rule).value == pytest.approx(2.0, abs=1e-6)
    assert conditional_mi(qam16, 1e4, 1.0, gh_rule).value == pytest.approx(4.0, abs=1e-6)


def test_conditional_mi_vanishes_at_low_power(qpsk, gh_rule):
    estimate = conditional_mi(qpsk, 1e-3, 1.0, gh_rule)
    assert 0 <= estimate.value < 0.01
    assert estimate.method == QuadratureMethod.GAUSS_HERMITE
    assert estimate.std_error == 0.0


def test_single_point_carries_nothing(single_point, qpsk, gh_rule):
    assert conditional_mi(single_point, 10.0, 1.0, gh_rule).value == 0.0
    assert joint_mi(single_point, single_point, 1 + 0j, 0.3, 5.0, 5.0, 1.0, Receiver.R1, gh_rule).value == 0.0


def test_conditional_mi_increases_with_power(qpsk, gh_rule):
    values = [conditional_mi(qpsk, p, 1.0, gh_rule).value for p in (0.5, 1, 2, 4, 8, 16)]
    assert all(b > a for a, b in zip(values, values[1:]))


@given(theta=st.floats(min_value=-2 * math.pi, max_value=2 * math.pi),
       power=st.floats(min_value=0.1, max_value=10))
@settings(deadline=None, max_examples=30)
def test_conditional_mi_is_rotation_invariant(theta, power):
    rule = NoiseRule()
    for name in ("psk4", "qam16"):
        c = standard_by_name(name)
        base = conditional_mi(c, power, 1.0, rule).value
        assert conditional_mi(rotate(c, theta), power, 1.0, rule).value == pytest.approx(base, abs=1e-12)


def test_joint_mi_without_interference_equals_conditional(qpsk, psk8, gh_rule):
    joint = joint_mi(qpsk, psk8, 0j, 1.1, 4.0, 9.0, 1.0, Receiver.R1, gh_rule).value
    assert joint == pytest.approx(conditional_mi(qpsk, 4.0, 1.0, gh_rule).value, abs=1e-9)


def test_joint_mi_bounds(qpsk, gh_rule):
    cond = conditional_mi(qpsk, 3.5, 1.0, gh_rule).value
    joint = joint_mi(qpsk, qpsk, polar(1, 20), 0.5, 3.5, 6.0, 1.0, Receiver.R1, gh_rule).value
    assert cond - 1e-4 <= joint <= 4.0


def test_joint_mi_is_periodic_in_theta(qpsk, gh_rule):
    args = (qpsk, qpsk, polar(1.1, 20))
    a = joint_mi(*args, 1.0, 3.5, 6.0, 1.0, Receiver.R2, gh_rule).value
    b = joint_mi(*args, 1.0 + 2 * math.pi, 3.5, 6.0, 1.0, Receiver.R2, gh_rule).value
    assert a == pytest.approx(b, rel=1e-12)


def test_joint_mi_high_power_saturation(qpsk, gh_rule):
    value = joint_mi(qpsk, qpsk, 1 + 0j, math.pi / 4, 1000.0, 1000.0, 1.0, Receiver.R1, gh_rule).value
    assert value == pytest.approx(4.0, abs=1e-2)


@pytest.mark.parametrize("kwargs", [
    {"power": 0.0, "noise_var": 1.0},
    {"power": 1.0, "noise_var": -1.0},
    {"power": math.inf, "noise_var": 1.0},
])
def test_conditional_mi_rejects_bad_arguments(qpsk, gh_rule, kwargs):
    with pytest.raises(InvalidArgumentError):
        conditional_mi(qpsk, rule=gh_rule, **kwargs)


def test_joint_mi_rejects_non_finite_theta(qpsk, gh_rule):
    with pytest.raises(InvalidArgumentError):
        joint_mi(qpsk, qpsk, 1 + 0j, math.nan, 1.0, 1.0, 1.0, Receiver.R1, gh_rule)


def test_extreme_exponents_stay_finite(qpsk, gh_rule):
    assert conditional_mi(qpsk, 1e8, 1.0, gh_rule).value == pytest.approx(2.0)
    assert conditional_mi(qpsk, 1.0, 1e-8, gh_rule).value == pytest.approx(2.0)
    assert np.isfinite(jensen_lower_bound(qpsk, qpsk, 1 + 0j, 0.2, 1e8, 1e8, 1.0, Receiver.R2))


@pytest.mark.slow
def test_monte_carlo_agrees_with_quadrature(qpsk, gh_rule):
    exact = conditional_mi(qpsk, 1.0, 1.0, gh_rule).value
    estimate = conditional_mi(qpsk, 1.0, 1.0, MC_RULE)
    assert estimate.method == QuadratureMethod.MONTE_CARLO
    assert estimate.node_or_sample_count == 1_000_000
    assert estimate.std_error > 0
    assert abs(estimate.value - exact) <= 3 * estimate.std_error


@pytest.mark.slow
def test_monte_carlo_joint_agrees_with_quadrature(qpsk, gh_rule):
    args = (qpsk, qpsk, polar(1, 20), 0.0, 3.5, 6.0, 1.0, Receiver.R1)
    exact = joint_mi(*args, gh_rule).value
    estimate = joint_mi(*args, MC_RULE)
    assert abs(estimate.value - exact) <= 3 * estimate.std_error


def test_monte_carlo_is_reproducible(qpsk):
    a = conditional_mi(qpsk, 2.0, 1.0, NoiseRule.monte_carlo(samples=5000, seed=11))
    b = conditional_mi(qpsk, 2.0, 1.0, NoiseRule.monte_carlo(samples=5000, seed=11))
    c = conditional_mi(qpsk, 2.0, 1.0, NoiseRule.monte_carlo(samples=5000, seed=12))
    assert a == b
    assert a.value != c.value


def test_resolve_rule_switches_above_threshold(gh_rule):
    assert resolve_rule(gh_rule, 256) is gh_rule
    switched = resolve_rule(gh_rule, 257)
    assert switched.method == QuadratureMethod.MONTE_CARLO
    assert switched.seed == gh_rule.seed
    mc = NoiseRule.monte_carlo(samples=5000)
    assert resolve_rule(mc, 4096) is mc


def test_composite_points_ordering(qpsk, psk8):
    points = composite_points(qpsk, psk8, 0.5 + 0j, 0.0, 4.0, 9.0, Receiver.R1)
    assert points.size == 32
    assert points[1 * 8 + 3] == pytest.approx(2 * qpsk.points[1] + 0.5 * 3 * psk8.points[3])
    at_r2 = composite_points(qpsk, psk8, 0.5 + 0j, 0.0, 4.0, 9.0, Receiver.R2)
    assert at_r2[2 * 8 + 5] == pytest.approx(0.5 * 2 * qpsk.points[2] + 3 * psk8.points[5])


def test_canonical_orientation(qam16):
    points = qam16.as_array() * np.exp(0.4j)
    canonical = canonical_orientation(points)
    assert canonical[0].imag == pytest.approx(0.0, abs=1e-15)
    assert canonical[0].real > 0
    assert np.allclose(np.abs(canonical), np.abs(points))
    assert np.allclose(canonical_orientation(qam16.as_array()), canonical)


def test_pairwise_log_sums_single_point():
    assert pairwise_log_sums(np.array([1 + 1j]), 2.0) == pytest.approx([0.0])


@given(p1=st.floats(min_value=0.2, max_value=20), p2=st.floats(min_value=0.2, max_value=20),
       gain=st.floats(min_value=0, max_value=2), phase=st.floats(min_value=-180, max_value=180),
       theta=st.floats(min_value=0, max_value=2 * math.pi), receiver=st.sampled_from(list(Receiver)))
@settings(deadline=None, max_examples=50)
def test_jensen_bound_never_exceeds_joint_mi(p1, p2, gain, phase, theta, receiver):
    qpsk = standard_by_name("psk4")
    g = polar(gain, phase)
    bound = jensen_lower_bound(qpsk, qpsk, g, theta, p1, p2, 1.0, receiver)
    joint = joint_mi(qpsk, qpsk, g, theta, p1, p2, 1.0, receiver, NoiseRule())
    assert bound <= joint.value + 1e-6


def test_jensen_bound_of_single_points(single_point):
    bound = jensen_lower_bound(single_point, single_point, 1 + 0j, 0.0, 5.0, 5.0, 1.0, Receiver.R1)
    assert bound == pytest.approx(1 - math.log2(math.e), abs=1e-12)


def test_jensen_bound_matches_direct_double_sum(qpsk, rotation_row_one):
    inst = rotation_row_one
    points = [math.sqrt(inst.p1) * x1 + inst.h21 * math.sqrt(inst.p2) * x2 for x1 in qpsk.points for x2 in qpsk.points]
    inner = [math.log2(0.5 * sum(math.exp(-abs(sk - si) ** 2 / 2.0) for si in points)) for sk in points]
    expected = math.log2(len(points)) - math.log2(math.e) - sum(inner) / len(points)
    bound = jensen_lower_bound(qpsk, qpsk, inst.h21, 0.0, inst.p1, inst.p2, 1.0, Receiver.R1)
    assert bound == pytest.approx(expected, rel=1e-10)


def test_cc_sum_bound_is_min_over_receivers(qpsk, gh_rule, rotation_row_one):
    inst = rotation_row_one
    at_r1 = joint_mi(qpsk, qpsk, inst.h21, 0.3, inst.p1, inst.p2, 1.0, Receiver.R1, gh_rule).value
    at_r2 = joint_mi(qpsk, qpsk, inst.h12, 0.3, inst.p1, inst.p2, 1.0, Receiver.R2, gh_rule).value
    assert cc_sum_bound(qpsk, qpsk, inst, 0.3, gh_rule) == min(at_r1, at_r2)


def test_unrotated_sum_capacity_of_first_rotation_row(qpsk, gh_rule, rotation_row_one):
    assert cc_sum_bound(qpsk, qpsk, rotation_row_one, 0.0, gh_rule) == pytest.approx(3.006, abs=0.02)


def test_bandwidth_mode_uses_bandwidth_as_noise(qpsk, gh_rule):
    inst = ChannelInstance(p1=7.0, p2=12.0, h12=1 + 0j, h21=1 + 0j, bandwidth_w=2.0, sigma1_sq=50.0)
    expected = joint_mi(qpsk, qpsk, 1 + 0j, 0.0, 7.0, 12.0, 2.0, Receiver.R1, gh_rule).value
    at_r2 = joint_mi(qpsk, qpsk, 1 + 0j, 0.0, 7.0, 12.0, 2.0, Receiver.R2, gh_rule).value
    assert cc_sum_bound(qpsk, qpsk, inst, 0.0, gh_rule) == min(expected, at_r2)


def test_range_check_clamps_within_tolerance_and_raises_beyond(gh_rule):
    assert _finish(2.0, 2.0 + 1e-10, 0.0, gh_rule, 24, "test").value == 0.0
    assert _finish(2.0, -1e-10, 0.0, gh_rule, 24, "test").value == 2.0
    with pytest.raises(InternalError):
        _finish(2.0, 2.1, 0.0, gh_rule, 24, "test")
    mc = NoiseRule.monte_carlo(samples=5000)
    assert _finish(2.0, 2.05, 0.02, mc, 5000, "test").value == 0.0
