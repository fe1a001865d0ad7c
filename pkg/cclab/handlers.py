"""Command handlers: one handle_* method per CLI command."""

import logging
import math
from typing import Optional, Tuple

from .constellations import Constellation
from .errors import InvalidArgumentError
from .experiments import run_experiment
from .fdma import (
    closed_form_applies, fdma_curve, fdma_vs_simdec_gap, normalized_gap, touch_check,
    touch_predicate,
)
from .models import (
    Alphabet, ChannelInstance, Command, JobResult, JobSpec, Regime, RegimeReport, RotationMethod,
    RotationResult, SweepRow, ThetaKind,
)
from .parsers import parser
from .regions import cc_region, classify_regime, gaussian_region, region_vertices
from .rotation import metric_theta_opt, numerical_theta_opt, resolve_theta, rotation_gain

logger = logging.getLogger(__name__)

VERY_STRONG_NOTE = ("Very strong interference: the regions use the strong-interference shapes, "
                    "which are not claimed as capacity results in this regime.")


class CommandHandler:
    """Runs one resolved JobSpec and collects its results."""

    def __init__(self, spec: JobSpec):
        self.spec = spec
        self.rule = spec.noise_rule
        self._constellations: Optional[Tuple[Constellation, Constellation]] = None

    def handle(self) -> JobResult:
        handlers = {
            Command.CLASSIFY: self.handle_classify,
            Command.REGION: self.handle_region,
            Command.ROTATE_OPT: self.handle_rotate_opt,
            Command.FDMA: self.handle_fdma,
            Command.COMPARE: self.handle_compare,
            Command.REPRODUCE: self.handle_reproduce,
        }
        logger.info(f"Running {self.spec.command.value}")
        return handlers[self.spec.command]()

    @property
    def instance(self) -> ChannelInstance:
        return self.spec.instance

    @property
    def constellations(self) -> Tuple[Constellation, Constellation]:
        if self._constellations is None:
            c1, c2 = (parser.parse_constellation(s, self.spec.normalize) for s in self.spec.constellations)
            self._constellations = (c1, c2)
        return self._constellations

    def _require_bandwidth(self):
        if not self.instance.bandwidth_mode:
            raise InvalidArgumentError(f"{self.spec.command.value} needs --bandwidth")

    def _regime(self, result: JobResult) -> RegimeReport:
        report = classify_regime(self.instance)
        result.summary.update({
            "regime": report.regime.value,
            "snr1": report.snr1,
            "snr2": report.snr2,
            "inr1": report.inr1,
            "inr2": report.inr2,
        })
        if report.regime == Regime.VERY_STRONG:
            logger.warning("Instance is in very strong interference")
            result.notes.append(VERY_STRONG_NOTE)
        return report

    def _theta(self, result: JobResult) -> float:
        c1, c2 = self.constellations
        theta, rotation = resolve_theta(self.spec.theta, c1, c2, self.instance, self.spec.grid, self.rule)
        result.summary["theta_deg"] = math.degrees(theta)
        if rotation is not None:
            result.summary["theta_method"] = rotation.method.value
            result.rows += SweepRow.from_trace(rotation)
        return theta

    def handle_classify(self) -> JobResult:
        result = JobResult("Interference regime")
        self._regime(result)
        return result

    def handle_region(self) -> JobResult:
        c1, c2 = self.constellations
        result = JobResult(f"Rate regions for {c1.label}/{c2.label}")
        self._regime(result)
        theta = self._theta(result)

        cc = cc_region(c1, c2, self.instance, theta, self.rule)
        gaussian = gaussian_region(self.instance)
        result.regions += [gaussian, cc]
        result.summary.update({
            "units": cc.units.value,
            "cc_kind": cc.kind.value,
            "cc_r1_max": cc.r1_max,
            "cc_r2_max": cc.r2_max,
            "cc_sum_max": cc.sum_max,
            "cc_std_error": cc.std_error,
            "gaussian_kind": gaussian.kind.value,
            "gaussian_r1_max": gaussian.r1_max,
            "gaussian_r2_max": gaussian.r2_max,
            "gaussian_sum_max": gaussian.sum_max,
        })
        if cc.is_degenerate:
            result.notes.append("The constellation-constrained region is degenerate (all bounds are 0).")
        if not result.rows:
            result.rows += [SweepRow(i, r1 + r2, r1, r2, cc.kind.value, cc.std_error)
                            for i, (r1, r2) in enumerate(region_vertices(cc))]
        return result

    def handle_rotate_opt(self) -> JobResult:
        c1, c2 = self.constellations
        result = JobResult(f"Optimum rotation of {c2.label} against {c1.label}")
        if self.spec.theta.kind == ThetaKind.NUMERICAL:
            rotation = numerical_theta_opt(c1, c2, self.instance, self.spec.grid, self.rule)
        else:
            rotation = metric_theta_opt(c1, c2, self.instance, self.spec.grid, self.rule)
        self._report_rotation(result, rotation)

        if self.spec.verify:
            other = (metric_theta_opt if rotation.method == RotationMethod.NUMERICAL else numerical_theta_opt)(
                c1, c2, self.instance, self.spec.grid, self.rule)
            result.summary[f"{other.method.value.lower()}_angle_deg"] = other.angle_deg
            result.summary[f"{other.method.value.lower()}_sum_bound"] = other.achieved_sum_bound
        return result

    def _report_rotation(self, result: JobResult, rotation: RotationResult):
        result.rows += SweepRow.from_trace(rotation)
        result.summary.update({
            "method": rotation.method.value,
            "angle_deg": rotation.angle_deg,
            "grid_step_deg": math.degrees(rotation.grid_step),
            "fold_symmetry": rotation.fold_symmetry,
            "sum_bound": rotation.achieved_sum_bound,
            "sum_bound_unrotated": rotation.unrotated_sum_bound,
            "rotation_gain": rotation_gain(rotation),
        })

    def handle_fdma(self) -> JobResult:
        self._require_bandwidth()
        c1, c2 = self.constellations
        result = JobResult(f"FDMA rates for {c1.label}/{c2.label}")
        gaussian = fdma_curve(None, None, self.instance, Alphabet.GAUSSIAN, self.spec.alpha_grid,
                              verify=self.spec.verify)
        finite = fdma_curve(c1, c2, self.instance, Alphabet.FINITE, self.spec.alpha_grid, self.rule,
                            verify=self.spec.verify)
        result.curves += [gaussian, finite]
        result.rows += SweepRow.from_curve(gaussian) + SweepRow.from_curve(finite)

        touches = touch_check(self.instance)
        result.summary.update({
            "alpha_opt_gaussian": gaussian.alpha_opt,
            "sum_at_opt_gaussian": gaussian.sum_at_opt,
            "alpha_opt_finite": finite.alpha_opt,
            "sum_at_opt_finite": finite.sum_at_opt,
            "closed_form_applicable": finite.closed_form_applicable,
            "gaussian_touches_capacity": touches,
            "touch_predicate": touch_predicate(self.instance),
        })
        if not closed_form_applies(c1, c2):
            result.notes.append("Constellations differ: alpha_opt is a numerical argmax, not P1/(P1+P2).")
        return result

    def handle_compare(self) -> JobResult:
        self._require_bandwidth()
        c1, c2 = self.constellations
        result = JobResult(f"Simultaneous decoding vs FDMA for {c1.label}/{c2.label}")
        self._regime(result)
        theta = self._theta(result)
        # rotation trace rows would mix with alpha rows in one table
        result.rows.clear()

        result.regions += [gaussian_region(self.instance), cc_region(c1, c2, self.instance, theta, self.rule)]
        gaussian = fdma_curve(None, None, self.instance, Alphabet.GAUSSIAN, self.spec.alpha_grid)
        finite = fdma_curve(c1, c2, self.instance, Alphabet.FINITE, self.spec.alpha_grid, self.rule)
        result.curves += [gaussian, finite]
        result.rows += SweepRow.from_curve(gaussian) + SweepRow.from_curve(finite)

        gap = fdma_vs_simdec_gap(c1, c2, self.instance, theta, self.rule)
        result.summary.update({
            "simdec_minus_fdma": gap,
            "normalized_gap": normalized_gap(gap, self.instance),
            "gaussian_touches_capacity": touch_check(self.instance),
        })
        return result

    def handle_reproduce(self) -> JobResult:
        return run_experiment(self.spec.experiment, self.rule)


def handle_job(spec: JobSpec) -> JobResult:
    """Dispatch a JobSpec to its command handler."""
    return CommandHandler(spec).handle()
