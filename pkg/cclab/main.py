"""
cclab - constellation-constrained capacity of the two-user Gaussian interference channel

Command-line front end: classify an instance, build rate regions, optimize the
relative rotation, compare with FDMA, or reproduce a published experiment.
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from .errors import CclabError, ConfigError, InternalError
from .experiments import EXPERIMENTS
from .handlers import handle_job
from .models import Command, JobSpec, OutputFormat
from .output import emit
from .parsers import parser as spec_parser
from .scheduler import stop_scheduler
from .settings import settings, validate_settings

logger = logging.getLogger(__name__)


class ArgumentParser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so bad flags get the usual error record."""

    def error(self, message):
        raise ConfigError(message)


def build_arg_parser() -> ArgumentParser:
    ap = ArgumentParser(
        prog="cclab",
        description="Constellation-constrained capacity regions of the two-user Gaussian interference channel.",
    )
    ap.add_argument("command", choices=[c.value for c in Command])
    ap.add_argument("experiment", nargs="?", help=f"for reproduce: one of {', '.join(EXPERIMENTS)}")

    inst = ap.add_argument_group("channel instance")
    inst.add_argument("--p1", type=float, help="transmit power of user 1")
    inst.add_argument("--p2", type=float, help="transmit power of user 2")
    inst.add_argument("--h12", help="cross gain user 1 -> receiver 2, as mag∠deg, mag@deg or [re,im]")
    inst.add_argument("--h21", help="cross gain user 2 -> receiver 1")
    inst.add_argument("--sigma1-sq", type=float, help="noise variance at receiver 1 (default 1)")
    inst.add_argument("--sigma2-sq", type=float, help="noise variance at receiver 2 (default 1)")
    inst.add_argument("--bandwidth", type=float, help="bandwidth W in Hz; rates become bits/s")

    comp = ap.add_argument_group("computation")
    comp.add_argument("--constellation", action="append",
                      help="psk4|psk8|qam16|file:PATH; give twice for different users")
    comp.add_argument("--no-normalize", action="store_true", default=None,
                      help="keep file constellations as given (they must already have unit power)")
    comp.add_argument("--theta", help="zero|metric|numerical|DEG")
    comp.add_argument("--grid-step", type=float, help="rotation grid step in degrees")
    comp.add_argument("--fold-symmetry", type=int, help="search only [0, 360/N) degrees")
    comp.add_argument("--alpha-step", type=float, help="bandwidth split grid step")
    comp.add_argument("--nodes", type=int, help="Gauss-Hermite nodes per dimension")
    comp.add_argument("--samples", type=int, help="Monte-Carlo samples")
    comp.add_argument("--seed", type=int, help="Monte-Carlo seed")
    comp.add_argument("--monte-carlo", action="store_true", default=None, help="use Monte-Carlo instead of quadrature")
    comp.add_argument("--verify", action="store_true", default=None,
                      help="cross-check closed forms and optima numerically")

    out = ap.add_argument_group("output")
    out.add_argument("--config", help="JSON file whose keys mirror these flags; flags win")
    out.add_argument("--out", help="output path (default stdout)")
    out.add_argument("--format", choices=[f.value for f in OutputFormat])
    return ap


def parse_options(argv: Optional[List[str]] = None) -> Dict[str, Any]:
    """Merge the JSON config (if any) with the flags given on the command line."""
    args = build_arg_parser().parse_args(argv)
    flags = {key: value for key, value in vars(args).items() if value is not None}
    config_path = flags.pop("config", None)
    options = spec_parser.load_config(config_path) if config_path else {}
    options.update(flags)
    return options


def error_record(error: CclabError) -> str:
    return json.dumps({"error": {"type": type(error).__name__, "message": str(error), "exit_code": error.exit_code}})


def run(spec: JobSpec) -> int:
    """Execute a job and write its artifacts; returns the process exit status."""
    try:
        result = handle_job(spec)
        emit(result, spec)
    except CclabError as e:
        logger.error(f"{spec.command.value} failed: {e}")
        print(error_record(e), file=sys.stderr)
        return e.exit_code
    except ArithmeticError as e:
        wrapped = InternalError(f"numeric failure: {e}")
        logger.exception(f"{spec.command.value} failed")
        print(error_record(wrapped), file=sys.stderr)
        return wrapped.exit_code
    finally:
        stop_scheduler()
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        validate_settings()
        spec = spec_parser.parse_job(parse_options(argv))
    except ValueError as e:
        error = e if isinstance(e, CclabError) else ConfigError(str(e))
        print(error_record(error), file=sys.stderr)
        return error.exit_code
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
