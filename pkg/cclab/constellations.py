"""Finite complex signal constellations: construction, normalization, rotation."""

import cmath
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Tuple, Union

import numpy as np

from .errors import ConfigError, InvalidArgumentError
from .settings import STANDARD_CONSTELLATIONS, UNIT_POWER_TOL

logger = logging.getLogger(__name__)

PSK_LABELS = {2: "BPSK", 4: "QPSK", 8: "8-PSK"}


@dataclass(frozen=True)
class Constellation:
    """Ordered, unit-average-power set of complex points.

    Transmit power enters at use sites as a sqrt(P) scale factor; index i
    always refers to the same point.
    """
    points: Tuple[complex, ...]
    label: str = ""

    def __post_init__(self):
        if len(self.points) < 1:
            raise InvalidArgumentError("a constellation needs at least one point")
        if not all(cmath.isfinite(p) for p in self.points):
            raise InvalidArgumentError("constellation points must be finite")
        power = average_power(self.points)
        if abs(power - 1.0) > UNIT_POWER_TOL:
            raise InvalidArgumentError(f"constellation {self.label!r} has average power {power!r}, expected 1")

    @property
    def size(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=complex)


def average_power(points: Iterable[complex]) -> float:
    values = np.asarray(list(points), dtype=complex)
    return float(np.mean(np.abs(values) ** 2))


def from_points(points: Iterable[complex], label: str = "custom", normalize: bool = True) -> Constellation:
    """Build a constellation, scaling to unit average power unless told not to."""
    values = [complex(p) for p in points]
    if not values:
        raise InvalidArgumentError("a constellation needs at least one point")
    if normalize:
        power = average_power(values)
        if power == 0:
            raise InvalidArgumentError("cannot normalize a constellation made only of zeros")
        scale = 1.0 / math.sqrt(power)
        values = [p * scale for p in values]
    return Constellation(tuple(values), label)


def make_standard(family: str, m: int) -> Constellation:
    """PSK points e^{j2*pi*k/M}, or a square QAM grid row-major from its most negative corner."""
    family = family.upper()
    if family == "PSK":
        if m < 2:
            raise InvalidArgumentError(f"PSK needs M >= 2, got {m}")
        points = [cmath.exp(2j * math.pi * k / m) for k in range(m)]
        return Constellation(tuple(points), PSK_LABELS.get(m, f"{m}-PSK"))

    if family == "QAM":
        side = math.isqrt(m) if m > 0 else 0
        if m < 4 or side * side != m or side % 2:
            raise InvalidArgumentError(f"QAM needs M a perfect square of an even side, got {m}")
        levels = [2 * i - (side - 1) for i in range(side)]
        raw = [complex(re, im) for im in levels for re in levels]
        return from_points(raw, f"{m}-QAM")

    raise InvalidArgumentError(f"unsupported constellation family {family!r}")


def standard_by_name(name: str) -> Constellation:
    """Look up a named constellation such as 'psk4' or 'qam16'."""
    try:
        family, m = STANDARD_CONSTELLATIONS[name.lower()]
    except KeyError:
        known = ", ".join(sorted(STANDARD_CONSTELLATIONS))
        raise InvalidArgumentError(f"unknown constellation {name!r} (known: {known})") from None
    return make_standard(family, m)


def rotate(c: Constellation, theta: float) -> Constellation:
    """Multiply every point by e^{j*theta}; order and power preserved."""
    if not math.isfinite(theta):
        raise InvalidArgumentError("rotation angle must be finite")
    phase = cmath.exp(1j * theta)
    return Constellation(tuple(p * phase for p in c.points), c.label)


def pairwise_differences(points: np.ndarray, rows: slice = slice(None)) -> np.ndarray:
    """Matrix d[k, i] = s_k - s_i, restricted to the k in rows."""
    points = np.asarray(points, dtype=complex)
    return points[rows, None] - points[None, :]


def difference_multiset(c: Constellation) -> List[complex]:
    """All M^2 ordered differences x^k - x^i, k outer, diagonal zeros included."""
    return [complex(d) for d in pairwise_differences(c.as_array()).ravel()]


def min_distance(c: Constellation) -> float:
    """Smallest distance between two distinct indices (0 for M = 1)."""
    if c.size < 2:
        return 0.0
    diffs = difference_multiset(c)
    return min(abs(diffs[k * c.size + i]) for k in range(c.size) for i in range(c.size) if i != k)


def load_constellation_file(path: Union[str, Path], normalize: bool = True) -> Constellation:
    """Load a JSON array of [re, im] pairs."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as e:
        raise ConfigError(f"cannot read constellation file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"constellation file {path} is not valid JSON: {e}") from e

    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"constellation file {path} must hold a non-empty array of [re, im] pairs")

    points = []
    for i, pair in enumerate(raw):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)):
            raise ConfigError(f"entry {i} of {path} is not an [re, im] pair")
        re, im = float(pair[0]), float(pair[1])
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ConfigError(f"entry {i} of {path} is not finite")
        points.append(complex(re, im))

    try:
        constellation = from_points(points, path.stem, normalize=normalize)
    except InvalidArgumentError as e:
        raise ConfigError(str(e)) from e
    d_min = min_distance(constellation)
    if constellation.size > 1 and d_min == 0.0:
        logger.warning(f"{path} repeats a point; mutual information stays below log2({constellation.size})")
    logger.info(f"Loaded {constellation.size}-point constellation from {path} (d_min {d_min:.6g})")
    return constellation
