"""
Writers for job results: aligned text tables, CSV and JSON.

Numbers are printed with 9 significant digits and every artifact starts with
the resolved job spec and seed, so identical jobs give identical bytes.
"""

import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, List, Optional

from .errors import OutputError
from .models import JobResult, JobSpec, OutputFormat
from .svg import emit_region_svg, render_region_svg

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["param", "objective", "R1", "R2", "method", "std_error"]
CHECK_COLUMNS = ["check", "actual", "expected", "passed"]


def fmt(value: Any) -> str:
    """Fixed 9-significant-digit text for numbers; plain text otherwise."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return f"{float(value):.9g}" if isinstance(value, float) else str(value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def _json_value(value: Any) -> Any:
    """Round floats to 9 significant digits; non-finite floats become null."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return float(f"{value:.9g}") if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(k): _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    if hasattr(value, "value"):
        return value.value
    return str(value)


def render_table(result: JobResult, spec: JobSpec) -> str:
    lines = [result.title, "=" * len(result.title), f"seed: {spec.noise_rule.seed}"]
    width = max((len(k) for k in result.summary), default=0)
    lines += [f"{key.ljust(width)}  {fmt(value)}" for key, value in result.summary.items()]

    if result.checks:
        lines += ["", "checks:"]
        name_width = max(len(c.name) for c in result.checks)
        for check in result.checks:
            status = "PASS" if check.passed else "FAIL"
            lines.append(f"  [{status}] {check.name.ljust(name_width)}  {fmt(check.actual)}  (expected {check.expected})")

    for note in result.notes:
        lines.append(f"note: {note}")

    if result.rows:
        lines += ["", "  ".join(f"{c:>15}" for c in CSV_COLUMNS)]
        for row in result.rows:
            cells = [row.param, row.objective, row.r1, row.r2, row.method, row.std_error]
            lines.append("  ".join(f"{fmt(c):>15}" for c in cells))

    lines += ["", f"job: {spec.provenance()}"]
    return "\n".join(lines) + "\n"


def render_csv(result: JobResult, spec: JobSpec) -> str:
    buffer = io.StringIO()
    buffer.write(f"# job: {spec.provenance()}\n")
    buffer.write(f"# seed: {spec.noise_rule.seed}\n")
    for note in result.notes:
        buffer.write(f"# note: {note}\n")

    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in result.rows:
        writer.writerow([fmt(row.param), fmt(row.objective), fmt(row.r1), fmt(row.r2), row.method, fmt(row.std_error)])

    if result.checks:
        buffer.write("\n")
        writer.writerow(CHECK_COLUMNS)
        for check in result.checks:
            writer.writerow([check.name, fmt(check.actual), check.expected, fmt(check.passed)])
    return buffer.getvalue()


def render_json(result: JobResult, spec: JobSpec) -> str:
    document = {
        "job": spec.model_dump(mode="json"),
        "seed": spec.noise_rule.seed,
        "title": result.title,
        "summary": result.summary,
        "passed": result.passed,
        "checks": [asdict(c) for c in result.checks],
        "notes": result.notes,
        "regions": [asdict(r) for r in result.regions],
        "curves": [asdict(c) for c in result.curves],
        "rows": [asdict(r) for r in result.rows],
    }
    return json.dumps(_json_value(document), indent=2) + "\n"


def render(result: JobResult, spec: JobSpec) -> str:
    """Text of the artifact in the job's output format."""
    if spec.output_format == OutputFormat.CSV:
        return render_csv(result, spec)
    if spec.output_format == OutputFormat.JSON:
        return render_json(result, spec)
    if spec.output_format == OutputFormat.SVG:
        return render_region_svg(result.regions, result.curves, title=result.title, provenance=spec.provenance())
    return render_table(result, spec)


def write_artifact(text: str, out: Optional[str]):
    """Write to the given path, or stdout when there is none."""
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(out)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}") from e
    logger.info(f"Wrote {path}")


def emit(result: JobResult, spec: JobSpec) -> List[str]:
    """Render and write a result; returns the paths written."""
    if spec.output_format == OutputFormat.SVG and spec.out:
        return [str(emit_region_svg(result.regions, result.curves, spec.out, result.title, spec.provenance()))]
    write_artifact(render(result, spec), spec.out)
    return [spec.out] if spec.out else []
