"""Domain models for cclab: validated inputs and computed results."""

import cmath
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import InvalidArgumentError
from .settings import (
    ALPHA_EPS, DEFAULT_ALPHA_STEP, DEFAULT_GRID_STEP_DEG, DEFAULT_NODES,
    DEFAULT_SAMPLES, DEFAULT_SEED, MIN_NODES, MIN_SAMPLES,
)


class Receiver(str, Enum):
    """Which receiver a joint mutual information is evaluated at."""
    R1 = "R1"
    R2 = "R2"


class QuadratureMethod(str, Enum):
    """How the expectation over the receiver noise is evaluated."""
    GAUSS_HERMITE = "GaussHermite"
    MONTE_CARLO = "MonteCarlo"


class Regime(str, Enum):
    """Interference regime of a channel instance."""
    WEAK = "Weak"
    STRONG = "Strong"
    VERY_STRONG = "VeryStrong"


class RegionKind(str, Enum):
    """Whether a region is a capacity region or only an inner bound."""
    GAUSSIAN_CAPACITY = "GaussianCapacity"
    CC_CAPACITY = "CCCapacity"
    GAUSSIAN_INNER = "GaussianInner"
    CC_INNER = "CCInner"


class RateUnits(str, Enum):
    BITS_PER_CHANNEL_USE = "BitsPerChannelUse"
    BITS_PER_SECOND = "BitsPerSecond"


class RotationMethod(str, Enum):
    METRIC = "Metric"
    NUMERICAL = "Numerical"


class Alphabet(str, Enum):
    GAUSSIAN = "Gaussian"
    FINITE = "Finite"


class ThetaKind(str, Enum):
    ZERO = "zero"
    METRIC = "metric"
    NUMERICAL = "numerical"
    FIXED = "fixed"


class OutputFormat(str, Enum):
    TABLE = "table"
    CSV = "csv"
    JSON = "json"
    SVG = "svg"


class Command(str, Enum):
    CLASSIFY = "classify"
    REGION = "region"
    ROTATE_OPT = "rotate-opt"
    FDMA = "fdma"
    COMPARE = "compare"
    REPRODUCE = "reproduce"


def validated(model_cls, **fields):
    """Build a pydantic model, reporting failures as InvalidArgumentError."""
    try:
        return model_cls(**fields)
    except ValidationError as e:
        raise InvalidArgumentError(f"Invalid {model_cls.__name__}: {e}") from e


class ChannelInstance(BaseModel):
    """Powers, cross gains, noise variances and (optionally) bandwidth.

    Direct gains are fixed to 1. When bandwidth_w is present the noise
    variance at both receivers is W (N0 = 1) and sigma*_sq are ignored.
    """

    model_config = ConfigDict(frozen=True)

    p1: float = Field(gt=0)
    p2: float = Field(gt=0)
    h12: complex = 0j
    h21: complex = 0j
    sigma1_sq: float = Field(1.0, gt=0)
    sigma2_sq: float = Field(1.0, gt=0)
    bandwidth_w: Optional[float] = Field(None, gt=0)

    @model_validator(mode="after")
    def _check_finite(self):
        reals = [self.p1, self.p2, self.sigma1_sq, self.sigma2_sq]
        if self.bandwidth_w is not None:
            reals.append(self.bandwidth_w)
        if not all(math.isfinite(v) for v in reals):
            raise ValueError("powers, noise variances and bandwidth must be finite")
        if not (cmath.isfinite(self.h12) and cmath.isfinite(self.h21)):
            raise ValueError("cross gains must be finite")
        return self

    @property
    def bandwidth_mode(self) -> bool:
        return self.bandwidth_w is not None

    def noise_var(self, receiver: Receiver) -> float:
        """Effective noise variance at a receiver."""
        if self.bandwidth_w is not None:
            return self.bandwidth_w
        return self.sigma1_sq if receiver == Receiver.R1 else self.sigma2_sq

    def cross_gain(self, receiver: Receiver) -> complex:
        """Gain of the interfering user at a receiver (h21 at R1, h12 at R2)."""
        return self.h21 if receiver == Receiver.R1 else self.h12

    @property
    def snr1(self) -> float:
        return self.p1 / self.noise_var(Receiver.R1)

    @property
    def snr2(self) -> float:
        return self.p2 / self.noise_var(Receiver.R2)

    @property
    def inr1(self) -> float:
        return abs(self.h21) ** 2 * self.p2 / self.noise_var(Receiver.R1)

    @property
    def inr2(self) -> float:
        return abs(self.h12) ** 2 * self.p1 / self.noise_var(Receiver.R2)

    def scaled(self, factor: float) -> "ChannelInstance":
        """Scale powers, noise variances and bandwidth by a common factor."""
        update = {
            "p1": self.p1 * factor,
            "p2": self.p2 * factor,
            "sigma1_sq": self.sigma1_sq * factor,
            "sigma2_sq": self.sigma2_sq * factor,
        }
        if self.bandwidth_w is not None:
            update["bandwidth_w"] = self.bandwidth_w * factor
        return self.model_copy(update=update)

    def with_bandwidth(self, bandwidth_w: Optional[float]) -> "ChannelInstance":
        return validated(ChannelInstance, **{**self.model_dump(), "bandwidth_w": bandwidth_w})


class NoiseRule(BaseModel):
    """Evaluator for the expectation over circularly symmetric Gaussian noise."""

    model_config = ConfigDict(frozen=True)

    method: QuadratureMethod = QuadratureMethod.GAUSS_HERMITE
    nodes_per_dim: int = Field(DEFAULT_NODES, ge=1)
    samples: int = Field(DEFAULT_SAMPLES, ge=1)
    seed: int = Field(DEFAULT_SEED, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _check_size(self):
        if self.method == QuadratureMethod.GAUSS_HERMITE and self.nodes_per_dim < MIN_NODES:
            raise ValueError(f"Gauss-Hermite needs at least {MIN_NODES} nodes per dimension")
        if self.method == QuadratureMethod.MONTE_CARLO and self.samples < MIN_SAMPLES:
            raise ValueError(f"Monte-Carlo needs at least {MIN_SAMPLES} samples")
        return self

    @classmethod
    def gauss_hermite(cls, nodes_per_dim: int = DEFAULT_NODES) -> "NoiseRule":
        return validated(cls, method=QuadratureMethod.GAUSS_HERMITE, nodes_per_dim=nodes_per_dim)

    @classmethod
    def monte_carlo(cls, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> "NoiseRule":
        return validated(cls, method=QuadratureMethod.MONTE_CARLO, samples=samples, seed=seed)

    @property
    def deterministic(self) -> bool:
        return self.method == QuadratureMethod.GAUSS_HERMITE


class AngleGrid(BaseModel):
    """Uniform grid over [0, 2*pi/fold_symmetry) in degrees."""

    model_config = ConfigDict(frozen=True)

    step_deg: float = Field(DEFAULT_GRID_STEP_DEG, gt=0, le=45)
    fold_symmetry: int = Field(1, ge=1)

    @property
    def period(self) -> float:
        return 2 * math.pi / self.fold_symmetry

    @property
    def step_rad(self) -> float:
        return math.radians(self.step_deg)

    def angles(self) -> np.ndarray:
        count = math.ceil(360.0 / self.fold_symmetry / self.step_deg - 1e-9)
        return np.arange(count) * self.step_rad


class AlphaGrid(BaseModel):
    """Bandwidth splits step, 2*step, ... kept inside [eps, 1 - eps]."""

    model_config = ConfigDict(frozen=True)

    step: float = Field(DEFAULT_ALPHA_STEP, gt=0, lt=0.5)

    def alphas(self) -> np.ndarray:
        count = math.ceil(1.0 / self.step - 1e-9)
        values = np.round(np.arange(1, count) * self.step, 12)
        return values[(values >= ALPHA_EPS) & (values <= 1 - ALPHA_EPS)]


class ThetaPolicy(BaseModel):
    """How the relative rotation of the second constellation is chosen."""

    model_config = ConfigDict(frozen=True)

    kind: ThetaKind = ThetaKind.ZERO
    degrees: Optional[float] = None

    @model_validator(mode="after")
    def _check_degrees(self):
        if self.kind == ThetaKind.FIXED and (self.degrees is None or not math.isfinite(self.degrees)):
            raise ValueError("a fixed theta policy needs a finite angle in degrees")
        return self


class JobSpec(BaseModel):
    """A fully resolved CLI job."""

    model_config = ConfigDict(frozen=True)

    command: Command
    instance: Optional[ChannelInstance] = None
    constellations: Tuple[str, str] = ("psk4", "psk4")
    normalize: bool = True
    theta: ThetaPolicy = ThetaPolicy()
    noise_rule: NoiseRule = NoiseRule()
    grid: AngleGrid = AngleGrid()
    alpha_grid: AlphaGrid = AlphaGrid()
    verify: bool = False
    experiment: Optional[str] = None
    output_format: OutputFormat = OutputFormat.TABLE
    out: Optional[str] = None

    @model_validator(mode="after")
    def _check_references(self):
        if self.command == Command.REPRODUCE:
            if not self.experiment:
                raise ValueError("reproduce needs an experiment name")
        elif self.instance is None:
            raise ValueError(f"{self.command.value} needs a channel instance (--p1, --p2, ...)")
        for spec in self.constellations:
            if spec.startswith("file:") and not Path(spec[len("file:"):]).is_file():
                raise ValueError(f"constellation file not found: {spec[len('file:'):]}")
        return self

    def provenance(self) -> str:
        """Canonical JSON of the resolved spec, embedded in every artifact."""
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class MIEstimate:
    """A mutual information value in bits with its evaluator tag."""
    value: float
    std_error: float
    method: QuadratureMethod
    node_or_sample_count: int

    @property
    def tolerance(self) -> float:
        return 3 * self.std_error + 1e-9


@dataclass(frozen=True)
class RateRegion:
    """Pentagon {R1 <= r1_max, R2 <= r2_max, R1 + R2 <= sum_max}."""
    r1_max: float
    r2_max: float
    sum_max: float
    units: RateUnits
    kind: RegionKind
    std_error: float = 0.0
    label: str = ""

    def __post_init__(self):
        if self.r1_max < 0 or self.r2_max < 0 or self.sum_max < 0:
            raise InvalidArgumentError("rate bounds must be nonnegative")
        if self.sum_max > self.r1_max + self.r2_max + 1e-12:
            raise InvalidArgumentError("sum bound exceeds r1_max + r2_max; use RateRegion.from_bounds")

    @classmethod
    def from_bounds(cls, r1_max: float, r2_max: float, sum_bound: float, units: RateUnits,
                    kind: RegionKind, std_error: float = 0.0, label: str = "") -> "RateRegion":
        """Build a region, cutting an inactive sum bound down to r1_max + r2_max."""
        r1_max, r2_max = max(r1_max, 0.0), max(r2_max, 0.0)
        sum_max = min(max(sum_bound, 0.0), r1_max + r2_max)
        return cls(r1_max, r2_max, sum_max, units, kind, std_error, label)

    @property
    def is_degenerate(self) -> bool:
        return self.r1_max == 0 and self.r2_max == 0 and self.sum_max == 0

    @property
    def is_inner_bound(self) -> bool:
        return self.kind in (RegionKind.GAUSSIAN_INNER, RegionKind.CC_INNER)


@dataclass(frozen=True)
class RegimeReport:
    regime: Regime
    snr1: float
    snr2: float
    inr1: float
    inr2: float


@dataclass(frozen=True)
class RotationResult:
    """Optimizer output; angle in [0, 2*pi) and the trace it was picked from."""
    angle: float
    objective_trace: Tuple[Tuple[float, float], ...]
    method: RotationMethod
    achieved_sum_bound: float
    grid_step: float
    fold_symmetry: int = 1
    unrotated_sum_bound: float = float("nan")

    @property
    def angle_deg(self) -> float:
        return math.degrees(self.angle)

    @property
    def improvement(self) -> float:
        """Sum bound gained over the unrotated constellation pair."""
        return self.achieved_sum_bound - self.unrotated_sum_bound


@dataclass(frozen=True)
class FdmaCurve:
    """FDMA rate pairs over a sweep of the bandwidth split."""
    alphas: Tuple[float, ...]
    r1: Tuple[float, ...]
    r2: Tuple[float, ...]
    alphabet: Alphabet
    alpha_opt: float
    sum_at_opt: float
    closed_form_applicable: bool = True
    std_error: float = 0.0
    label: str = ""
    units: RateUnits = field(default=RateUnits.BITS_PER_SECOND)

    @property
    def sums(self) -> Tuple[float, ...]:
        return tuple(a + b for a, b in zip(self.r1, self.r2))


@dataclass(frozen=True)
class SweepRow:
    """One grid point of a theta or alpha sweep (a CSV row)."""
    param: float
    objective: float
    r1: float
    r2: float
    method: str
    std_error: float = 0.0

    @classmethod
    def from_trace(cls, result: RotationResult) -> List["SweepRow"]:
        """Theta in degrees against the optimizer's objective."""
        return [cls(math.degrees(theta), value, math.nan, math.nan, result.method.value)
                for theta, value in result.objective_trace]

    @classmethod
    def from_curve(cls, curve: FdmaCurve) -> List["SweepRow"]:
        return [cls(alpha, r1 + r2, r1, r2, curve.label, curve.std_error)
                for alpha, r1, r2 in zip(curve.alphas, curve.r1, curve.r2)]


@dataclass(frozen=True)
class Check:
    """A reproduced quantity compared with its published value."""
    name: str
    actual: float
    expected: str
    passed: bool


@dataclass
class JobResult:
    """Everything a command produced, ready for the output writers."""
    title: str
    summary: Dict[str, Any] = field(default_factory=dict)
    rows: List[SweepRow] = field(default_factory=list)
    regions: List[RateRegion] = field(default_factory=list)
    curves: List[FdmaCurve] = field(default_factory=list)
    checks: List[Check] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)
