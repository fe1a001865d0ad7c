"""Parsing of CLI values and JSON job configs into validated domain models."""

import cmath
import json
import logging
import math
import re
from pathlib import Path
from typing import Any, Dict, Optional, Union

from .constellations import Constellation, load_constellation_file, standard_by_name
from .errors import ConfigError, InvalidArgumentError
from .models import (
    AlphaGrid, AngleGrid, ChannelInstance, Command, JobSpec, NoiseRule, OutputFormat,
    QuadratureMethod, ThetaKind, ThetaPolicy,
)
from .settings import settings

logger = logging.getLogger(__name__)

NUMBER = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
POLAR_PATTERN = re.compile(rf"^\s*({NUMBER})\s*(?:∠|<|@)\s*({NUMBER})\s*(?:deg|°)?\s*$")

# Keys accepted in a JSON config; same names as the long flags.
CONFIG_KEYS = {
    "command", "experiment", "p1", "p2", "h12", "h21", "sigma1_sq", "sigma2_sq", "bandwidth",
    "constellation", "no_normalize", "theta", "grid_step", "fold_symmetry", "alpha_step",
    "nodes", "samples", "seed", "monte_carlo", "verify", "out", "format",
}


def _given(options: Dict[str, Any], name: str, default: Any) -> Any:
    """The option when it was given at all (zero included), else the default."""
    value = options.get(name)
    return default if value is None else value


class SpecParser:
    """Turns flag strings and config entries into channel instances and job specs."""

    def parse_gain(self, value: Union[str, float, int, list]) -> complex:
        """Parse 'mag∠deg' (also 'mag<deg' or 'mag@deg'), '[re,im]' or a real number."""
        if isinstance(value, (list, tuple)):
            return self._pair_to_complex(value, value)
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return self._finite(complex(value), value)
        if not isinstance(value, str):
            raise ConfigError(f"cannot read a channel gain from {value!r}")

        text = value.strip()
        match = POLAR_PATTERN.match(text)
        if match:
            magnitude, degrees = float(match.group(1)), float(match.group(2))
            if magnitude < 0:
                raise ConfigError(f"gain magnitude must be nonnegative in {value!r}")
            return self._finite(cmath.rect(magnitude, math.radians(degrees)), value)

        if text.startswith("["):
            try:
                pair = json.loads(text)
            except json.JSONDecodeError as e:
                raise ConfigError(f"cannot read a channel gain from {value!r}: {e}") from e
            return self._pair_to_complex(pair, value)

        try:
            return self._finite(complex(float(text)), value)
        except ValueError:
            raise ConfigError(f"cannot read a channel gain from {value!r} (use mag∠deg or [re,im])") from None

    def _pair_to_complex(self, pair, original) -> complex:
        if (not isinstance(pair, (list, tuple)) or len(pair) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)):
            raise ConfigError(f"expected [re, im] in {original!r}")
        return self._finite(complex(float(pair[0]), float(pair[1])), original)

    def _finite(self, gain: complex, original) -> complex:
        if not cmath.isfinite(gain):
            raise ConfigError(f"gain {original!r} is not finite")
        return gain

    def parse_theta(self, value: Union[str, float, int]) -> ThetaPolicy:
        """'zero', 'metric', 'numerical' or a fixed angle in degrees."""
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return self._fixed_theta(float(value))
        text = str(value).strip().lower()
        for kind in (ThetaKind.ZERO, ThetaKind.METRIC, ThetaKind.NUMERICAL):
            if text == kind.value:
                return ThetaPolicy(kind=kind)
        try:
            degrees = float(text.rstrip("°").removesuffix("deg"))
        except ValueError:
            raise ConfigError(f"theta must be zero, metric, numerical or degrees, got {value!r}") from None
        return self._fixed_theta(degrees)

    def _fixed_theta(self, degrees: float) -> ThetaPolicy:
        if not math.isfinite(degrees):
            raise ConfigError("a fixed theta must be a finite angle")
        return ThetaPolicy(kind=ThetaKind.FIXED, degrees=degrees)

    def parse_constellation(self, spec: str, normalize: bool = True) -> Constellation:
        """A named family member such as 'psk4' or 'qam16', or 'file:PATH'."""
        if spec.startswith("file:"):
            return load_constellation_file(spec[len("file:"):], normalize=normalize)
        return standard_by_name(spec)

    def load_config(self, path: Union[str, Path]) -> Dict[str, Any]:
        """Read a JSON job config; keys mirror the long flags (dashes or underscores)."""
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")

        options = {key.lstrip("-").replace("-", "_"): value for key, value in raw.items()}
        unknown = sorted(set(options) - CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown keys in {path}: {', '.join(unknown)}")

        # relative constellation paths resolve against the config's directory
        constellation = options.get("constellation")
        if constellation is not None:
            specs = [constellation] if isinstance(constellation, str) else list(constellation)
            options["constellation"] = [self._resolve_file_spec(spec, path.parent) for spec in specs]
        logger.info(f"Loaded job config from {path}")
        return options

    def _resolve_file_spec(self, spec: str, base: Path) -> str:
        if isinstance(spec, str) and spec.startswith("file:"):
            target = Path(spec[len("file:"):])
            if not target.is_absolute():
                return f"file:{base / target}"
        return spec

    def parse_instance(self, options: Dict[str, Any]) -> Optional[ChannelInstance]:
        """Build a ChannelInstance from p1/p2/h12/h21/sigma*/bandwidth options; None without powers."""
        if options.get("p1") is None and options.get("p2") is None:
            return None
        if options.get("p1") is None or options.get("p2") is None:
            raise InvalidArgumentError("both --p1 and --p2 are needed")

        fields = {"p1": options["p1"], "p2": options["p2"]}
        for name in ("h12", "h21"):
            if options.get(name) is not None:
                fields[name] = self.parse_gain(options[name])
        for name in ("sigma1_sq", "sigma2_sq"):
            if options.get(name) is not None:
                fields[name] = options[name]
        if options.get("bandwidth") is not None:
            fields["bandwidth_w"] = options["bandwidth"]
        return self._build(ChannelInstance, fields)

    def parse_job(self, options: Dict[str, Any]) -> JobSpec:
        """Resolve merged flag/config options into a JobSpec."""
        if not options.get("command"):
            raise ConfigError("no command given")

        constellation = options.get("constellation") or ["psk4"]
        if isinstance(constellation, str):
            constellation = [constellation]
        if len(constellation) == 1:
            constellation = [constellation[0], constellation[0]]
        if len(constellation) != 2:
            raise ConfigError(f"give one or two constellations, got {len(constellation)}")

        if options.get("monte_carlo"):
            rule_fields = {"method": QuadratureMethod.MONTE_CARLO}
        else:
            rule_fields = {"method": QuadratureMethod.GAUSS_HERMITE}
        rule_fields["nodes_per_dim"] = _given(options, "nodes", settings.nodes)
        rule_fields["samples"] = _given(options, "samples", settings.samples)
        rule_fields["seed"] = settings.seed if options.get("seed") is None else options["seed"]

        theta = options.get("theta")
        return self._build(JobSpec, {
            "command": self._enum(Command, options["command"]),
            "instance": self.parse_instance(options),
            "constellations": tuple(constellation),
            "normalize": not options.get("no_normalize", False),
            "theta": ThetaPolicy() if theta is None else self.parse_theta(theta),
            "noise_rule": self._build(NoiseRule, rule_fields),
            "grid": self._build(AngleGrid, {
                "step_deg": _given(options, "grid_step", settings.grid_step_deg),
                "fold_symmetry": _given(options, "fold_symmetry", 1),
            }),
            "alpha_grid": self._build(AlphaGrid, {"step": _given(options, "alpha_step", settings.alpha_step)}),
            "verify": bool(options.get("verify", False)),
            "experiment": options.get("experiment"),
            "output_format": self._enum(OutputFormat, options.get("format") or OutputFormat.TABLE.value),
            "out": options.get("out"),
        })

    def _enum(self, enum_cls, value):
        try:
            return enum_cls(value)
        except ValueError:
            choices = ", ".join(member.value for member in enum_cls)
            raise ConfigError(f"{value!r} is not one of: {choices}") from None

    def _build(self, model_cls, fields: Dict[str, Any]):
        try:
            return model_cls(**fields)
        except ValueError as e:
            # pydantic's ValidationError is a ValueError
            raise ConfigError(f"invalid {model_cls.__name__}: {e}") from e


# Global parser instance
parser = SpecParser()
