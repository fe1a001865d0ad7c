"""
FDMA rates for the two-user channel.

User 1 gets alpha*W of the band and user 2 the remaining (1 - alpha)*W, so
each sees an interference-free AWGN link with noise variance equal to its
bandwidth share (N0 = 1).
"""

import logging
import math
from typing import Optional, Tuple

from .constellations import Constellation
from .errors import InvalidArgumentError
from .mi_engine import conditional_mi
from .models import Alphabet, AlphaGrid, ChannelInstance, FdmaCurve, NoiseRule, RateUnits
from .regions import cc_region, gaussian_region
from .scheduler import get_scheduler
from .settings import TOUCH_RTOL

logger = logging.getLogger(__name__)

VERIFY_STEP = 1e-3
VERIFY_TOL = 2e-3


def _require_bandwidth(instance: ChannelInstance) -> float:
    if not instance.bandwidth_mode:
        raise InvalidArgumentError("FDMA rates need a bandwidth (--bandwidth W)")
    return instance.bandwidth_w


def _check_alpha(alpha: float):
    if not (math.isfinite(alpha) and 0 < alpha < 1):
        raise InvalidArgumentError(f"alpha must lie strictly between 0 and 1, got {alpha!r}")


def fdma_gaussian_point(instance: ChannelInstance, alpha: float) -> Tuple[float, float]:
    """Rate pair in bits/s with Gaussian inputs."""
    w = _require_bandwidth(instance)
    _check_alpha(alpha)
    w1, w2 = alpha * w, (1 - alpha) * w
    return w1 * math.log2(1 + instance.p1 / w1), w2 * math.log2(1 + instance.p2 / w2)


def _fdma_cc_estimate(c1: Constellation, c2: Constellation, instance: ChannelInstance,
                      alpha: float, rule: NoiseRule) -> Tuple[float, float, float]:
    w = _require_bandwidth(instance)
    _check_alpha(alpha)
    w1, w2 = alpha * w, (1 - alpha) * w
    i1 = conditional_mi(c1, instance.p1, w1, rule)
    i2 = conditional_mi(c2, instance.p2, w2, rule)
    return w1 * i1.value, w2 * i2.value, max(w1 * i1.std_error, w2 * i2.std_error)


def fdma_cc_point(c1: Constellation, c2: Constellation, instance: ChannelInstance,
                  alpha: float, rule: NoiseRule) -> Tuple[float, float]:
    """Rate pair in bits/s with uniform inputs on c1 and c2."""
    r1, r2, _ = _fdma_cc_estimate(c1, c2, instance, alpha, rule)
    return r1, r2


def alpha_opt(instance: ChannelInstance) -> float:
    """Bandwidth split maximizing the FDMA sum rate: P1 / (P1 + P2)."""
    return instance.p1 / (instance.p1 + instance.p2)


def closed_form_applies(c1: Optional[Constellation], c2: Optional[Constellation]) -> bool:
    """The closed-form split holds for Gaussian inputs or two identical constellations."""
    if c1 is None and c2 is None:
        return True
    return c1 is not None and c2 is not None and c1.points == c2.points


def _sum_rate(instance: ChannelInstance, c1: Optional[Constellation], c2: Optional[Constellation],
              rule: Optional[NoiseRule], alpha: float) -> float:
    if c1 is None:
        return sum(fdma_gaussian_point(instance, alpha))
    return sum(fdma_cc_point(c1, c2, instance, alpha, rule or NoiseRule()))


def alpha_opt_numerical(instance: ChannelInstance, c1: Optional[Constellation] = None,
                        c2: Optional[Constellation] = None, rule: Optional[NoiseRule] = None,
                        step: float = VERIFY_STEP) -> float:
    """Grid argmax of the FDMA sum rate; Gaussian inputs when no constellations are given."""
    alphas = [float(a) for a in AlphaGrid(step=step).alphas()]
    sums = get_scheduler().map(lambda a: _sum_rate(instance, c1, c2, rule, a), alphas)
    best = max(sums)
    tolerance = 1e-12 * max(1.0, abs(best))
    return next(a for a, s in zip(alphas, sums) if s >= best - tolerance)


def fdma_curve(c1: Optional[Constellation], c2: Optional[Constellation], instance: ChannelInstance,
               alphabet: Alphabet, alpha_grid: AlphaGrid = AlphaGrid(),
               rule: Optional[NoiseRule] = None, verify: bool = False) -> FdmaCurve:
    """Sweep the bandwidth split and evaluate the sum rate at the optimal split."""
    _require_bandwidth(instance)
    if alphabet == Alphabet.FINITE:
        if c1 is None or c2 is None:
            raise InvalidArgumentError("a finite-alphabet FDMA curve needs both constellations")
        rule = rule or NoiseRule()
    else:
        c1 = c2 = None

    alphas = [float(a) for a in alpha_grid.alphas()]
    if not alphas:
        raise InvalidArgumentError(f"alpha grid with step {alpha_grid.step} has no interior points")

    if c1 is None:
        points = get_scheduler().map(lambda a: (*fdma_gaussian_point(instance, a), 0.0), alphas)
    else:
        points = get_scheduler().map(lambda a: _fdma_cc_estimate(c1, c2, instance, a, rule), alphas)

    applicable = closed_form_applies(c1, c2)
    if applicable:
        best_alpha = alpha_opt(instance)
        if verify:
            check = alpha_opt_numerical(instance, c1, c2, rule)
            if abs(check - best_alpha) > VERIFY_TOL:
                logger.warning(f"Numerical alpha {check:.4f} differs from closed form {best_alpha:.4f}")
            else:
                logger.info(f"Closed-form alpha {best_alpha:.4f} confirmed numerically ({check:.4f})")
    else:
        logger.warning("Closed-form alpha needs identical constellations; using a numerical argmax")
        best_alpha = alpha_opt_numerical(instance, c1, c2, rule)

    sum_at_opt = _sum_rate(instance, c1, c2, rule, best_alpha)
    label = "FDMA Gaussian" if c1 is None else f"FDMA {c1.label}/{c2.label}"
    return FdmaCurve(
        alphas=tuple(alphas),
        r1=tuple(p[0] for p in points),
        r2=tuple(p[1] for p in points),
        alphabet=Alphabet.GAUSSIAN if c1 is None else Alphabet.FINITE,
        alpha_opt=best_alpha,
        sum_at_opt=sum_at_opt,
        closed_form_applicable=applicable,
        std_error=max(p[2] for p in points),
        label=label,
        units=RateUnits.BITS_PER_SECOND,
    )


def touch_predicate(instance: ChannelInstance) -> bool:
    """One cross gain of modulus one and the other at least one."""
    low, high = sorted((abs(instance.h12), abs(instance.h21)))
    return math.isclose(low, 1.0, rel_tol=TOUCH_RTOL) and (high >= 1.0 or math.isclose(high, 1.0, rel_tol=TOUCH_RTOL))


def touch_check(instance: ChannelInstance) -> bool:
    """Whether the Gaussian FDMA sum at the optimal split reaches the Gaussian sum capacity."""
    _require_bandwidth(instance)
    fdma_sum = sum(fdma_gaussian_point(instance, alpha_opt(instance)))
    region_sum = gaussian_region(instance).sum_max
    touches = math.isclose(fdma_sum, region_sum, rel_tol=TOUCH_RTOL)

    predicate = touch_predicate(instance)
    if predicate != touches:
        logger.warning(f"Touch predicate says {predicate} but FDMA sum {fdma_sum:.12g} vs capacity {region_sum:.12g}")
    return touches


def fdma_vs_simdec_gap(c1: Constellation, c2: Constellation, instance: ChannelInstance,
                       theta: float, rule: NoiseRule) -> float:
    """Simultaneous-decoding sum bound minus the FDMA sum at the optimal split, in bits/s."""
    _require_bandwidth(instance)
    simdec = cc_region(c1, c2, instance, theta, rule).sum_max
    if closed_form_applies(c1, c2):
        split = alpha_opt(instance)
    else:
        split = alpha_opt_numerical(instance, c1, c2, rule)
    fdma = sum(fdma_cc_point(c1, c2, instance, split, rule))
    logger.debug(f"Simultaneous decoding {simdec:.6f} vs FDMA {fdma:.6f} at alpha {split:.4f}")
    return simdec - fdma


def normalized_gap(gap: float, instance: ChannelInstance) -> float:
    """A gap in bits/s per unit bandwidth, in bits per channel use."""
    return gap / _require_bandwidth(instance)
