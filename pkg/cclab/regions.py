"""
Rate regions of the two-user interference channel.

Gaussian and constellation-constrained pentagons, the interference regime
that decides whether they are capacity regions or inner bounds, and the
boundary points used for tables and plots.
"""

import logging
import math
from typing import List, Tuple

import numpy as np

from .constellations import Constellation
from .errors import InvalidArgumentError
from .mi_engine import cc_sum_bound_estimate, conditional_mi
from .models import ChannelInstance, NoiseRule, RateRegion, RateUnits, Regime, RegimeReport, RegionKind, Receiver
from .settings import REGIME_RTOL

logger = logging.getLogger(__name__)

Point = Tuple[float, float]


def _exceeds(a: float, b: float) -> bool:
    """a > b, with values equal up to rounding treated as equal."""
    return a > b and not math.isclose(a, b, rel_tol=REGIME_RTOL)


def regime_from_ratios(snr1: float, snr2: float, inr1: float, inr2: float) -> Regime:
    if _exceeds(snr1, inr2) or _exceeds(snr2, inr1):
        return Regime.WEAK
    if _exceeds(snr1, inr2 / (1 + snr2)) or _exceeds(snr2, inr1 / (1 + snr1)):
        return Regime.STRONG
    return Regime.VERY_STRONG


def classify_regime(instance: ChannelInstance) -> RegimeReport:
    """Weak, strong or very strong interference from the four SNR/INR ratios."""
    snr1, snr2, inr1, inr2 = instance.snr1, instance.snr2, instance.inr1, instance.inr2
    regime = regime_from_ratios(snr1, snr2, inr1, inr2)
    logger.debug(f"SNR1={snr1:.6g} SNR2={snr2:.6g} INR1={inr1:.6g} INR2={inr2:.6g} -> {regime.value}")
    return RegimeReport(regime, snr1, snr2, inr1, inr2)


def _units_and_scale(instance: ChannelInstance) -> Tuple[RateUnits, float]:
    if instance.bandwidth_mode:
        return RateUnits.BITS_PER_SECOND, instance.bandwidth_w
    return RateUnits.BITS_PER_CHANNEL_USE, 1.0


def gaussian_region(instance: ChannelInstance) -> RateRegion:
    """Region achieved by Gaussian codebooks with simultaneous decoding."""
    units, scale = _units_and_scale(instance)
    n1, n2 = instance.noise_var(Receiver.R1), instance.noise_var(Receiver.R2)
    p1, p2 = instance.p1, instance.p2

    r1 = scale * math.log2(1 + p1 / n1)
    r2 = scale * math.log2(1 + p2 / n2)
    sum_bound = scale * min(
        math.log2(1 + (p1 + abs(instance.h21) ** 2 * p2) / n1),
        math.log2(1 + (abs(instance.h12) ** 2 * p1 + p2) / n2),
    )

    regime = classify_regime(instance).regime
    kind = RegionKind.GAUSSIAN_INNER if regime == Regime.WEAK else RegionKind.GAUSSIAN_CAPACITY
    return RateRegion.from_bounds(r1, r2, sum_bound, units, kind, label="Gaussian")


def cc_region(c1: Constellation, c2: Constellation, instance: ChannelInstance,
              theta: float, rule: NoiseRule) -> RateRegion:
    """Region for uniform inputs on c1 and c2, user 2 rotated by theta."""
    units, scale = _units_and_scale(instance)
    i1 = conditional_mi(c1, instance.p1, instance.noise_var(Receiver.R1), rule)
    i2 = conditional_mi(c2, instance.p2, instance.noise_var(Receiver.R2), rule)
    joint = cc_sum_bound_estimate(c1, c2, instance, theta, rule)

    regime = classify_regime(instance).regime
    kind = RegionKind.CC_INNER if regime == Regime.WEAK else RegionKind.CC_CAPACITY
    std_error = scale * max(i1.std_error, i2.std_error, joint.std_error)
    label = f"{c1.label}/{c2.label} at {math.degrees(theta):.2f} deg"
    return RateRegion.from_bounds(scale * i1.value, scale * i2.value, scale * joint.value,
                                  units, kind, std_error, label)


def region_vertices(region: RateRegion) -> List[Point]:
    """Pentagon corners from (0, r2_max) to (r1_max, 0), repeated corners dropped."""
    s = region.sum_max
    a, b = min(region.r1_max, s), min(region.r2_max, s)
    corners = [(0.0, b), (min(a, s - b), b), (a, min(b, s - a)), (a, 0.0)]

    vertices = [corners[0]]
    for corner in corners[1:]:
        if corner != vertices[-1]:
            vertices.append(corner)
    return vertices


def region_boundary_points(region: RateRegion, n: int) -> List[Point]:
    """Exactly n boundary points from (0, r2_max) to (r1_max, 0).

    Every corner is included exactly; the remaining points are spread over the
    edges in proportion to their length. n below the number of corners cannot
    hold them all and is rejected.
    """
    if n < 2:
        raise InvalidArgumentError(f"need at least 2 boundary points, got {n}")

    vertices = region_vertices(region)
    if len(vertices) == 1:
        return vertices * n
    if n < len(vertices):
        raise InvalidArgumentError(f"{len(vertices)} corners need at least {len(vertices)} boundary points, got {n}")

    corners = np.asarray(vertices)
    lengths = np.hypot(*np.diff(corners, axis=0).T)
    extra = n - len(vertices)
    share = extra * lengths / lengths.sum()
    counts = np.floor(share).astype(int)
    leftover = extra - int(counts.sum())
    counts[np.argsort(-(share - counts), kind="stable")[:leftover]] += 1

    points = [vertices[0]]
    for (start, end), count in zip(zip(vertices, vertices[1:]), counts):
        for j in range(1, count + 1):
            t = j / (count + 1)
            points.append((start[0] + t * (end[0] - start[0]), start[1] + t * (end[1] - start[1])))
        points.append(end)
    return points
