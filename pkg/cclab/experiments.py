"""
Catalogue of published experiments, each with its parameters baked in.

Every experiment returns a JobResult whose checks compare the reproduced
numbers with the published ones at the documented tolerance.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

from .constellations import Constellation, standard_by_name
from .errors import InvalidArgumentError
from .fdma import alpha_opt, fdma_curve, fdma_gaussian_point, fdma_vs_simdec_gap, normalized_gap, touch_check
from .mi_engine import cc_sum_bound
from .models import (
    Alphabet, AlphaGrid, AngleGrid, ChannelInstance, Check, JobResult, NoiseRule, Regime, RotationResult,
    SweepRow,
)
from .regions import cc_region, classify_regime, gaussian_region
from .rotation import metric_objective, metric_theta_opt, numerical_theta_opt, rotation_gain

logger = logging.getLogger(__name__)

ANGLE_TOL_METRIC = 0.5
ANGLE_TOL_NUMERICAL = 1.0
SUM_TOL = 0.02
METHOD_AGREEMENT_BITS = 0.005
# Two angles whose sum bounds differ by less than this are equally good optima
PEAK_TIE_BITS = 1e-4
METRIC_TIE_RTOL = 1e-9
IDENTITY_RTOL = 1e-12

METRIC_STEP_DEG = 0.25
NUMERICAL_STEP_DEG = 0.5

# (P1, P2, |h12|, arg h12, |h21|, arg h21, theta_opt, theta'_opt, sum unrotated, sum at theta_opt, sum at theta'_opt)
QPSK_ROTATION_TABLE = (
    (3.5, 6.0, 1.0, 10.0, 1.0, 20.0, 39.53, 41.25, 3.006, 3.107, 3.108),
    (3.5, 6.0, 1.2, 10.0, 1.1, 20.0, 46.41, 44.69, 2.994, 3.22, 3.221),
    (5.0, 5.0, 1.2, 15.0, 1.5, 5.0, 73.91, 72.19, 3.178, 3.319, 3.32),
    (8.0, 6.0, 1.8, 40.0, 1.3, 70.0, 49.85, 51.57, 3.459, 3.577, 3.58),
)

# Both powers near 10 W, unit noise. Published as 1.03∠-112 and 1.07∠-44 with the
# phase measured the other way round (h = |h| e^{-j phi}); these are the conjugates.
ARBITRARY_GAINS_PUBLISHED = ((1.03, -112.0), (1.07, -44.0))
ARBITRARY_GAINS = dict(
    p1=9.92, p2=10.3,
    h12=cmath.rect(1.03, math.radians(-112)).conjugate(),
    h21=cmath.rect(1.07, math.radians(-44)).conjugate(),
)
ARBITRARY_GAINS_ANGLES = (77.3493, 79.0682)

# Bandwidth experiments share the powers and the first cross gain
FDMA_POWERS = dict(p1=7.0, p2=12.0)


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    tolerance: str
    runner: Callable[[NoiseRule], JobResult]


def polar(magnitude: float, degrees: float) -> complex:
    return cmath.rect(magnitude, math.radians(degrees))


def _within(name: str, actual: float, target: float, tolerance: float) -> Check:
    return Check(name, actual, f"{target:g} ± {tolerance:g}", abs(actual - target) <= tolerance)


def _symmetric_grid(c: Constellation, step_deg: float) -> AngleGrid:
    """Fold the search for an M-PSK pair, whose point set is invariant under 2*pi/M."""
    return AngleGrid(step_deg=step_deg, fold_symmetry=c.size)


def _fdma_instance(h12: complex, h21: complex, bandwidth: float) -> ChannelInstance:
    return ChannelInstance(**FDMA_POWERS, h12=h12, h21=h21, bandwidth_w=bandwidth)


def _angle_checks(prefix: str, c: Constellation, instance: ChannelInstance, metric: RotationResult,
                  numerical: RotationResult, published: Tuple[float, float], rule: NoiseRule,
                  result: JobResult) -> List[Check]:
    """Angles against the published ones.

    An angle outside the tolerance still passes when its own objective is at
    least as good as at the published angle (a flat or double-peaked
    objective); the deviation is then recorded in the notes.
    """
    published_metric, published_numerical = published
    at_published_metric = metric_objective(c, c, instance, math.radians(published_metric))
    ours_metric = metric_objective(c, c, instance, metric.angle)
    at_published_numerical = cc_sum_bound(c, c, instance, math.radians(published_numerical), rule)

    candidates = (
        (f"{prefix}theta_opt (deg)", metric.angle_deg, published_metric, ANGLE_TOL_METRIC,
         ours_metric <= at_published_metric + METRIC_TIE_RTOL * max(1.0, abs(at_published_metric)),
         f"metric {ours_metric:.6f} vs {at_published_metric:.6f} at the published angle"),
        (f"{prefix}theta'_opt (deg)", numerical.angle_deg, published_numerical, ANGLE_TOL_NUMERICAL,
         numerical.achieved_sum_bound >= at_published_numerical - PEAK_TIE_BITS,
         f"sum bound {numerical.achieved_sum_bound:.6f} vs {at_published_numerical:.6f} at the published angle"),
    )
    checks = []
    for name, actual, target, tolerance, no_worse, comparison in candidates:
        deviation = actual - target
        within = abs(deviation) <= tolerance
        if not within:
            result.notes.append(f"{name}: {actual:.2f} deg is {deviation:+.2f} deg from the published {target:g}; {comparison}")
            logger.info(f"{name} off by {deviation:+.2f} deg; {comparison}")
        checks.append(Check(name, actual, f"{target:g} ± {tolerance:g}, or no worse than there", within or no_worse))
    return checks


def run_table1(rule: NoiseRule) -> JobResult:
    """Optimum rotation angles and sum capacities for four QPSK instances."""
    qpsk = standard_by_name("psk4")
    result = JobResult("Optimum rotation and sum capacities for QPSK (unit noise variances assumed)")
    result.notes.append("Noise variances are not published for these rows; sigma1^2 = sigma2^2 = 1 is used.")

    for index, row in enumerate(QPSK_ROTATION_TABLE, start=1):
        p1, p2, m12, a12, m21, a21, theta_metric, theta_numerical, s0, s_metric, s_numerical = row
        instance = ChannelInstance(p1=p1, p2=p2, h12=polar(m12, a12), h21=polar(m21, a21))
        logger.info(f"Row {index}: P1={p1} P2={p2} h12={m12}∠{a12} h21={m21}∠{a21}")

        metric = metric_theta_opt(qpsk, qpsk, instance, _symmetric_grid(qpsk, METRIC_STEP_DEG), rule)
        numerical = numerical_theta_opt(qpsk, qpsk, instance, _symmetric_grid(qpsk, NUMERICAL_STEP_DEG), rule)
        agreement = abs(metric.achieved_sum_bound - numerical.achieved_sum_bound)

        result.checks += _angle_checks(f"row {index} ", qpsk, instance, metric, numerical,
                                       (theta_metric, theta_numerical), rule, result)
        result.checks += [
            _within(f"row {index} sum unrotated", metric.unrotated_sum_bound, s0, SUM_TOL),
            _within(f"row {index} sum at theta_opt", metric.achieved_sum_bound, s_metric, SUM_TOL),
            _within(f"row {index} sum at theta'_opt", numerical.achieved_sum_bound, s_numerical, SUM_TOL),
            Check(f"row {index} metric and numerical sums agree", agreement,
                  f"<= {METHOD_AGREEMENT_BITS:g}", agreement <= METHOD_AGREEMENT_BITS),
        ]
        result.rows.append(SweepRow(index, metric.angle_deg, metric.achieved_sum_bound,
                                    numerical.achieved_sum_bound, "metric/numerical"))
        result.summary[f"row{index}_theta_opt_deg"] = metric.angle_deg
        result.summary[f"row{index}_theta_numerical_deg"] = numerical.angle_deg
    return result


def _rotated_regions(c: Constellation, rule: NoiseRule,
                     title: str) -> Tuple[JobResult, ChannelInstance, RotationResult, RotationResult]:
    instance = ChannelInstance(**ARBITRARY_GAINS)
    metric = metric_theta_opt(c, c, instance, _symmetric_grid(c, METRIC_STEP_DEG), rule)
    numerical = numerical_theta_opt(c, c, instance, _symmetric_grid(c, NUMERICAL_STEP_DEG), rule)

    result = JobResult(title)
    (m12, a12), (m21, a21) = ARBITRARY_GAINS_PUBLISHED
    result.notes.append(f"Published gains h12 = {m12}∠{a12:g}, h21 = {m21}∠{a21:g} are read with "
                        "the opposite phase sign (conjugated).")
    result.regions += [
        cc_region(c, c, instance, 0.0, rule),
        cc_region(c, c, instance, metric.angle, rule),
        cc_region(c, c, instance, numerical.angle, rule),
    ]
    result.rows += SweepRow.from_trace(metric) + SweepRow.from_trace(numerical)
    result.summary.update({
        "theta_opt_deg": metric.angle_deg,
        "theta_numerical_deg": numerical.angle_deg,
        "sum_unrotated": metric.unrotated_sum_bound,
        "sum_at_theta_opt": metric.achieved_sum_bound,
        "sum_at_theta_numerical": numerical.achieved_sum_bound,
        "gain_metric": rotation_gain(metric),
        "gain_numerical": rotation_gain(numerical),
    })
    return result, instance, metric, numerical


def run_fig2(rule: NoiseRule) -> JobResult:
    """QPSK pair with arbitrary complex gains: both optimum angles and the three regions."""
    qpsk = standard_by_name("psk4")
    result, instance, metric, numerical = _rotated_regions(qpsk, rule, "CC capacity regions for a QPSK pair, arbitrary gains")
    result.checks += _angle_checks("", qpsk, instance, metric, numerical, ARBITRARY_GAINS_ANGLES, rule, result)
    return result


def run_fig3(rule: NoiseRule) -> JobResult:
    """Same gains with an 8-PSK pair; the rotation gain is reported, not checked."""
    psk8 = standard_by_name("psk8")
    result, _, _, _ = _rotated_regions(psk8, rule, "CC capacity regions for an 8-PSK pair, arbitrary gains")
    gain = result.summary["gain_numerical"]
    result.checks.append(Check("rotation never lowers the sum bound", gain, ">= 0", gain >= -1e-12))
    result.notes.append(f"Rotation gain for 8-PSK: {gain:.6f} bits per channel use.")
    return result


def _fdma_comparison(instance: ChannelInstance, rule: NoiseRule, title: str) -> Tuple[JobResult, float]:
    """Gaussian and QPSK regions against both FDMA curves; returns the result and the gap."""
    qpsk = standard_by_name("psk4")
    rotation = metric_theta_opt(qpsk, qpsk, instance, _symmetric_grid(qpsk, METRIC_STEP_DEG), rule)
    gaussian_curve = fdma_curve(None, None, instance, Alphabet.GAUSSIAN, AlphaGrid())
    finite_curve = fdma_curve(qpsk, qpsk, instance, Alphabet.FINITE, AlphaGrid(), rule)
    gap = fdma_vs_simdec_gap(qpsk, qpsk, instance, rotation.angle, rule)
    regime = classify_regime(instance).regime

    result = JobResult(title)
    result.regions += [gaussian_region(instance), cc_region(qpsk, qpsk, instance, rotation.angle, rule)]
    result.curves += [gaussian_curve, finite_curve]
    result.rows += SweepRow.from_curve(gaussian_curve) + SweepRow.from_curve(finite_curve)
    result.summary.update({
        "regime": regime.value,
        "bandwidth": instance.bandwidth_w,
        "theta_opt_deg": rotation.angle_deg,
        "alpha_opt": finite_curve.alpha_opt,
        "fdma_gaussian_sum": gaussian_curve.sum_at_opt,
        "fdma_cc_sum": finite_curve.sum_at_opt,
        "simdec_minus_fdma": gap,
        "normalized_gap": normalized_gap(gap, instance),
    })
    return result, gap


def _gaussian_identity(instance: ChannelInstance) -> Check:
    w = instance.bandwidth_w
    actual = sum(fdma_gaussian_point(instance, alpha_opt(instance)))
    target = w * math.log2(1 + (instance.p1 + instance.p2) / w)
    return Check("Gaussian FDMA sum at alpha_opt = W log2(1 + (P1+P2)/W)", actual, f"{target:.12g}",
                 math.isclose(actual, target, rel_tol=IDENTITY_RTOL))


def _strong_fdma(bandwidth: float, rule: NoiseRule) -> JobResult:
    instance = _fdma_instance(polar(1, 10), polar(1, 20), bandwidth)
    result, gap = _fdma_comparison(instance, rule, f"FDMA vs capacity, QPSK pair, |h12| = |h21| = 1, W = {bandwidth:g}")
    touches = touch_check(instance)
    result.checks += [
        Check("Gaussian FDMA touches capacity", float(touches), "true", touches),
        _gaussian_identity(instance),
        Check("CC simultaneous decoding beats FDMA", gap, "> 0", gap > 0),
    ]
    return result


def run_fig7a(rule: NoiseRule) -> JobResult:
    return _strong_fdma(6.0, rule)


def run_fig7b(rule: NoiseRule) -> JobResult:
    """W = 2, plus the comparison with W = 6: the normalized gap grows as W shrinks."""
    result = _strong_fdma(2.0, rule)
    qpsk = standard_by_name("psk4")
    wide = _fdma_instance(polar(1, 10), polar(1, 20), 6.0)
    wide_theta = metric_theta_opt(qpsk, qpsk, wide, _symmetric_grid(qpsk, METRIC_STEP_DEG), rule).angle
    wide_gap = normalized_gap(fdma_vs_simdec_gap(qpsk, qpsk, wide, wide_theta, rule), wide)
    narrow_gap = result.summary["normalized_gap"]
    result.summary["normalized_gap_w6"] = wide_gap
    result.checks.append(Check("normalized gap larger at W = 2 than at W = 6", narrow_gap,
                               f"> {wide_gap:.6g}", narrow_gap > wide_gap))
    return result


def run_fig8(rule: NoiseRule) -> JobResult:
    instance = _fdma_instance(polar(1, 10), polar(0.9, 20), 2.0)
    result, gap = _fdma_comparison(instance, rule, "Inner bounds under weak interference, h21 = 0.9∠20, W = 2")
    result.checks += [
        Check("regime is weak", float(classify_regime(instance).regime == Regime.WEAK), "Weak",
              classify_regime(instance).regime == Regime.WEAK),
        Check("simultaneous decoding beats FDMA", gap, "> 0", gap > 0),
    ]
    return result


def run_fig9(rule: NoiseRule) -> JobResult:
    instance = _fdma_instance(polar(1, 10), polar(0.7, 20), 6.0)
    result, gap = _fdma_comparison(instance, rule, "Inner bounds under weak interference, h21 = 0.7∠20, W = 6")
    result.checks.append(Check("FDMA beats simultaneous decoding", gap, "< 0", gap < 0))
    return result


def run_fig10(rule: NoiseRule) -> JobResult:
    """|h21| = 1.1: the Gaussian FDMA curve still touches capacity at both bandwidths."""
    instance = _fdma_instance(polar(1, 10), polar(1.1, 20), 2.0)
    result, gap = _fdma_comparison(instance, rule, "FDMA vs capacity, QPSK pair, h21 = 1.1∠20, W = 2")
    for bandwidth in (6.0, 2.0):
        touches = touch_check(instance.with_bandwidth(bandwidth))
        result.checks.append(Check(f"Gaussian FDMA touches capacity at W = {bandwidth:g}", float(touches), "true", touches))
    result.checks.append(Check("CC simultaneous decoding beats FDMA", gap, "> 0", gap > 0))
    return result


def run_fig11(rule: NoiseRule) -> JobResult:
    """Both cross gains 1.2: the Gaussian FDMA curve no longer touches."""
    instance = _fdma_instance(polar(1.2, 10), polar(1.2, 20), 2.0)
    result, gap = _fdma_comparison(instance, rule, "FDMA vs capacity, QPSK pair, |h12| = |h21| = 1.2, W = 2")
    touches = touch_check(instance)
    result.checks += [
        Check("Gaussian FDMA does not touch capacity", float(touches), "false", not touches),
        Check("CC simultaneous decoding beats FDMA", gap, "> 0", gap > 0),
    ]
    return result


EXPERIMENTS: Dict[str, Experiment] = {
    e.name: e for e in (
        Experiment("table1", "optimum QPSK rotation for four random instances", "angles ±0.5/±1.0 deg or no worse objective, sums ±0.02 bits, methods within 0.005", run_table1),
        Experiment("fig2", "QPSK regions unrotated and at both optimum angles", "angles ±0.5/±1.0 deg or no worse objective, conjugated gains", run_fig2),
        Experiment("fig3", "8-PSK regions at the same gains", "gain reported only", run_fig3),
        Experiment("fig7a", "FDMA vs capacity at W = 6, unit cross gains", "touch exact to 1e-9, gap > 0", run_fig7a),
        Experiment("fig7b", "FDMA vs capacity at W = 2, unit cross gains", "touch exact to 1e-9, gap > 0", run_fig7b),
        Experiment("fig8", "weak interference, simultaneous decoding ahead", "gap > 0", run_fig8),
        Experiment("fig9", "weak interference, FDMA ahead", "gap < 0", run_fig9),
        Experiment("fig10", "|h21| = 1.1, Gaussian FDMA still touches", "touch exact to 1e-9", run_fig10),
        Experiment("fig11", "|h12| = |h21| = 1.2, Gaussian FDMA falls short", "no touch", run_fig11),
    )
}


def run_experiment(name: str, rule: NoiseRule) -> JobResult:
    """Run a catalogue experiment by name."""
    try:
        experiment = EXPERIMENTS[name.lower()]
    except KeyError:
        raise InvalidArgumentError(f"unknown experiment {name!r} (known: {', '.join(EXPERIMENTS)})") from None

    logger.info(f"Reproducing {experiment.name}: {experiment.description}")
    result = experiment.runner(rule)
    result.summary["experiment"] = experiment.name
    result.summary["tolerance"] = experiment.tolerance
    failed = [check.name for check in result.checks if not check.passed]
    if failed:
        logger.warning(f"{experiment.name}: {len(failed)} check(s) outside tolerance: {', '.join(failed)}")
    else:
        logger.info(f"{experiment.name}: all {len(result.checks)} checks passed")
    return result
