import json
import math

import pytest
from pydantic import ValidationError

from cclab.errors import InvalidArgumentError
from cclab.models import (
    AlphaGrid, AngleGrid, ChannelInstance, Command, JobSpec, NoiseRule, QuadratureMethod,
    RateRegion, RateUnits, Receiver, RegionKind, RotationMethod, RotationResult, ThetaKind,
    ThetaPolicy, validated,
)


@pytest.mark.parametrize("fields", [
    {"p1": 0.0, "p2": 1.0},
    {"p1": 1.0, "p2": -2.0},
    {"p1": 1.0, "p2": 1.0, "sigma1_sq": 0.0},
    {"p1": 1.0, "p2": 1.0, "bandwidth_w": 0.0},
    {"p1": math.inf, "p2": 1.0},
    {"p1": 1.0, "p2": 1.0, "h12": complex(math.nan, 0)},
])
def test_channel_instance_rejects_bad_values(fields):
    with pytest.raises(InvalidArgumentError):
        validated(ChannelInstance, **fields)


def test_channel_instance_is_frozen():
    inst = ChannelInstance(p1=1.0, p2=1.0)
    with pytest.raises(ValidationError):
        inst.p1 = 2.0


def test_noise_variance_and_ratios():
    inst = ChannelInstance(p1=4.0, p2=9.0, h12=0.5 + 0j, h21=2j, sigma1_sq=2.0, sigma2_sq=3.0)
    assert inst.noise_var(Receiver.R1) == 2.0
    assert inst.noise_var(Receiver.R2) == 3.0
    assert inst.cross_gain(Receiver.R1) == 2j
    assert inst.cross_gain(Receiver.R2) == 0.5
    assert inst.snr1 == pytest.approx(2.0)
    assert inst.snr2 == pytest.approx(3.0)
    assert inst.inr1 == pytest.approx(4 * 9 / 2)
    assert inst.inr2 == pytest.approx(0.25 * 4 / 3)


def test_bandwidth_mode_overrides_noise_variances():
    inst = ChannelInstance(p1=7.0, p2=12.0, sigma1_sq=5.0, bandwidth_w=2.0)
    assert inst.bandwidth_mode
    assert inst.noise_var(Receiver.R1) == inst.noise_var(Receiver.R2) == 2.0
    assert not inst.with_bandwidth(None).bandwidth_mode


def test_scaled_keeps_ratios():
    inst = ChannelInstance(p1=7.0, p2=12.0, h12=1 + 0j, h21=1 + 0j, bandwidth_w=2.0)
    bigger = inst.scaled(3.0)
    assert bigger.p1 == 21.0
    assert bigger.bandwidth_w == 6.0
    assert bigger.snr1 == pytest.approx(inst.snr1)
    assert bigger.inr2 == pytest.approx(inst.inr2)


def test_noise_rule_limits():
    assert NoiseRule().method == QuadratureMethod.GAUSS_HERMITE
    assert NoiseRule().deterministic
    with pytest.raises(InvalidArgumentError):
        NoiseRule.gauss_hermite(nodes_per_dim=3)
    with pytest.raises(InvalidArgumentError):
        NoiseRule.monte_carlo(samples=999)
    assert not NoiseRule.monte_carlo(samples=1000).deterministic


@pytest.mark.parametrize("step,fold,count", [(0.25, 1, 1440), (0.25, 4, 360), (1.0, 1, 360), (0.5, 8, 90)])
def test_angle_grid_counts(step, fold, count):
    grid = AngleGrid(step_deg=step, fold_symmetry=fold)
    angles = grid.angles()
    assert angles.size == count
    assert angles[0] == 0.0
    assert angles[-1] < grid.period


def test_alpha_grid():
    alphas = AlphaGrid(step=0.01).alphas()
    assert alphas.size == 99
    assert alphas[0] == pytest.approx(0.01)
    assert alphas[-1] == pytest.approx(0.99)
    assert list(AlphaGrid(step=0.25).alphas()) == [0.25, 0.5, 0.75]


def test_fixed_theta_needs_an_angle():
    with pytest.raises(ValidationError):
        ThetaPolicy(kind=ThetaKind.FIXED)
    assert ThetaPolicy(kind=ThetaKind.FIXED, degrees=10.0).degrees == 10.0


def test_job_spec_references():
    with pytest.raises(ValidationError, match="experiment"):
        JobSpec(command=Command.REPRODUCE)
    with pytest.raises(ValidationError, match="channel instance"):
        JobSpec(command=Command.REGION)
    with pytest.raises(ValidationError, match="not found"):
        JobSpec(command=Command.REPRODUCE, experiment="table1", constellations=("file:/nonexistent.json", "psk4"))


def test_provenance_is_canonical():
    inst = ChannelInstance(p1=3.5, p2=6.0, h12=1 + 0j)
    a = JobSpec(command=Command.REGION, instance=inst)
    b = JobSpec(command=Command.REGION, instance=inst)
    assert a.provenance() == b.provenance()
    decoded = json.loads(a.provenance())
    assert decoded["command"] == "region"
    assert list(decoded) == sorted(decoded)


def test_rate_region_from_bounds_clamps_sum():
    region = RateRegion.from_bounds(1.0, 1.5, 4.0, RateUnits.BITS_PER_CHANNEL_USE, RegionKind.CC_CAPACITY)
    assert region.sum_max == 2.5
    assert not region.is_degenerate
    empty = RateRegion.from_bounds(0.0, 0.0, 0.0, RateUnits.BITS_PER_CHANNEL_USE, RegionKind.CC_CAPACITY)
    assert empty.is_degenerate
    assert RateRegion.from_bounds(1, 1, 1, RateUnits.BITS_PER_SECOND, RegionKind.GAUSSIAN_INNER).is_inner_bound


def test_rate_region_rejects_inconsistent_bounds():
    with pytest.raises(InvalidArgumentError):
        RateRegion(-1.0, 1.0, 0.0, RateUnits.BITS_PER_CHANNEL_USE, RegionKind.CC_CAPACITY)
    with pytest.raises(InvalidArgumentError):
        RateRegion(1.0, 1.0, 3.0, RateUnits.BITS_PER_CHANNEL_USE, RegionKind.CC_CAPACITY)


def test_rotation_result_improvement():
    result = RotationResult(angle=math.pi / 4, objective_trace=((0.0, 3.0),), method=RotationMethod.METRIC,
                            achieved_sum_bound=3.4, grid_step=0.01, unrotated_sum_bound=3.0)
    assert result.angle_deg == pytest.approx(45.0)
    assert result.improvement == pytest.approx(0.4)
