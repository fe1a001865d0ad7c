"""Relative rotation of the second user's constellation.

Two searches over the same grid-then-refine procedure: the closed-form
metric (minimized, natural log, no noise expectation) and direct
maximization of min{I1, I2}.
"""

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

from scipy.optimize import minimize_scalar

from .constellations import Constellation
from .errors import InvalidArgumentError
from .mi_engine import cc_sum_bound, cc_sum_bound_estimate, composite_points, pairwise_log_sums
from .models import AngleGrid, ChannelInstance, NoiseRule, Receiver, RotationMethod, RotationResult, ThetaKind, ThetaPolicy
from .scheduler import get_scheduler
from .settings import MAX_METRIC_STEP_DEG, MAX_NUMERICAL_STEP_DEG, REFINE_TOL

logger = logging.getLogger(__name__)

TIE_RTOL = 1e-9


def metric_objective(c1: Constellation, c2: Constellation, instance: ChannelInstance, theta: float) -> float:
    """Larger of the two receivers' sums of log sum_i exp(-|mu|^2 / (2 s2)).

    Minimizing it over theta approximates maximizing min{I1, I2}. The
    approximation assumes equal noise variances at the two receivers; distinct
    variances are accepted as given.
    """
    sums = []
    for rx in (Receiver.R1, Receiver.R2):
        points = composite_points(c1, c2, instance.cross_gain(rx), theta, instance.p1, instance.p2, rx)
        sums.append(float(pairwise_log_sums(points, 2 * instance.noise_var(rx)).sum()))
    return max(sums)


def _pick(values: Sequence[float]) -> int:
    """Index of the smallest value; near-ties go to the earliest (smallest angle)."""
    best = min(values)
    tolerance = TIE_RTOL * max(1.0, abs(best))
    return next(i for i, v in enumerate(values) if v <= best + tolerance)


def _refine(objective: Callable[[float], float], angles: Sequence[float], values: Sequence[float],
            index: int, grid: AngleGrid) -> Optional[Tuple[float, float]]:
    """Golden-section search inside the winning grid cell; None when it cannot improve."""
    n = len(angles)
    if n < 3:
        return None
    fa, fb, fc = values[(index - 1) % n], values[index], values[(index + 1) % n]
    tolerance = TIE_RTOL * max(1.0, abs(fb))
    if not (fb < fa - tolerance and fb < fc - tolerance):
        return None

    center, step = angles[index], grid.step_rad

    def in_cell(u: float) -> float:
        return objective(center + (u - 2.0) * step)

    try:
        # bracket (1, 2, 3) keeps |x| ~ 2 so the relative tolerance maps to REFINE_TOL radians
        result = minimize_scalar(in_cell, bracket=(1.0, 2.0, 3.0), method="golden", tol=REFINE_TOL / (4 * step))
    except (ValueError, RuntimeError) as e:
        logger.debug(f"Refinement skipped around {math.degrees(center):.4f} deg: {e}")
        return None

    if not result.fun < fb - tolerance:
        return None
    return (center + (float(result.x) - 2.0) * step) % grid.period, float(result.fun)


def _grid_search(objective: Callable[[float], float], grid: AngleGrid, sign: float) -> Tuple[float, List[Tuple[float, float]]]:
    """Optimize sign * objective over the grid; returns the angle and the trace in objective units."""
    angles = [float(a) for a in grid.angles()]
    raw = get_scheduler().map(objective, angles)
    oriented = [sign * v for v in raw]

    index = _pick(oriented)
    trace = list(zip(angles, raw))
    refined = _refine(lambda t: sign * objective(t), angles, oriented, index, grid)
    if refined is None:
        return angles[index], trace

    angle, oriented_value = refined
    trace.append((angle, sign * oriented_value))
    return angle, trace


def metric_theta_opt(c1: Constellation, c2: Constellation, instance: ChannelInstance,
                     grid: AngleGrid = AngleGrid(), rule: Optional[NoiseRule] = None) -> RotationResult:
    """Angle minimizing the closed-form metric."""
    if grid.step_deg > MAX_METRIC_STEP_DEG:
        raise InvalidArgumentError(f"metric search needs a grid step <= {MAX_METRIC_STEP_DEG} deg")
    rule = rule or NoiseRule()

    angle, trace = _grid_search(lambda t: metric_objective(c1, c2, instance, t), grid, sign=1.0)
    achieved = cc_sum_bound(c1, c2, instance, angle, rule)
    unrotated = cc_sum_bound(c1, c2, instance, 0.0, rule)
    logger.info(f"Metric optimum {math.degrees(angle):.4f} deg: sum bound {achieved:.6f} (unrotated {unrotated:.6f})")
    return RotationResult(angle, tuple(trace), RotationMethod.METRIC, achieved,
                          grid.step_rad, grid.fold_symmetry, unrotated)


def numerical_theta_opt(c1: Constellation, c2: Constellation, instance: ChannelInstance,
                        grid: AngleGrid = AngleGrid(), rule: Optional[NoiseRule] = None) -> RotationResult:
    """Angle maximizing min{I1, I2} directly."""
    if grid.step_deg > MAX_NUMERICAL_STEP_DEG:
        raise InvalidArgumentError(f"numerical search needs a grid step <= {MAX_NUMERICAL_STEP_DEG} deg")
    rule = rule or NoiseRule()
    if not rule.deterministic:
        raise InvalidArgumentError("numerical rotation search needs a Gauss-Hermite rule for a reproducible trace")

    def objective(theta: float) -> float:
        return cc_sum_bound_estimate(c1, c2, instance, theta, rule).value

    angle, trace = _grid_search(objective, grid, sign=-1.0)
    achieved = max(value for a, value in trace if a == angle)
    unrotated = trace[0][1]
    logger.info(f"Numerical optimum {math.degrees(angle):.4f} deg: sum bound {achieved:.6f} (unrotated {unrotated:.6f})")
    return RotationResult(angle, tuple(trace), RotationMethod.NUMERICAL, achieved,
                          grid.step_rad, grid.fold_symmetry, unrotated)


def rotation_gain(result: RotationResult) -> float:
    """Sum bound gained by rotating, in bits per channel use."""
    return result.improvement


def resolve_theta(policy: ThetaPolicy, c1: Constellation, c2: Constellation, instance: ChannelInstance,
                  grid: AngleGrid, rule: NoiseRule) -> Tuple[float, Optional[RotationResult]]:
    """Turn a theta policy into an angle in radians (and the search behind it, if any)."""
    if policy.kind == ThetaKind.ZERO:
        return 0.0, None
    if policy.kind == ThetaKind.FIXED:
        return math.radians(policy.degrees) % (2 * math.pi), None
    if policy.kind == ThetaKind.METRIC:
        result = metric_theta_opt(c1, c2, instance, grid, rule)
    else:
        result = numerical_theta_opt(c1, c2, instance, grid, rule)
    return result.angle, result
