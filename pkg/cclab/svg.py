"""SVG plots of rate regions and FDMA curves, drawn with matplotlib."""

import io
import logging
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from .errors import InvalidArgumentError, OutputError  # noqa: E402
from .models import FdmaCurve, RateRegion, RateUnits  # noqa: E402
from .regions import region_boundary_points  # noqa: E402

logger = logging.getLogger(__name__)

# Fixed hash salt and text-as-text keep the SVG byte-identical between runs
SVG_RC = {"svg.hashsalt": "cclab", "svg.fonttype": "none", "path.simplify": False}
FIGSIZE = (8.0, 6.0)
BOUNDARY_POINTS = 64
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def _common_units(regions: Sequence[RateRegion], curves: Sequence[FdmaCurve]) -> RateUnits:
    units = {r.units for r in regions} | {c.units for c in curves}
    if len(units) > 1:
        found = ", ".join(sorted(u.value for u in units))
        raise InvalidArgumentError(f"cannot plot mixed rate units in one figure: {found}")
    return units.pop() if units else RateUnits.BITS_PER_CHANNEL_USE


def region_outline(region: RateRegion) -> List[Tuple[float, float]]:
    """Closed outline: origin, the boundary from (0, r2_max) to (r1_max, 0), origin again."""
    if region.is_degenerate:
        return []
    return [(0.0, 0.0)] + region_boundary_points(region, BOUNDARY_POINTS) + [(0.0, 0.0)]


def region_figure(regions: Sequence[RateRegion], curves: Sequence[FdmaCurve],
                  title: str = "Rate regions") -> Figure:
    """One axes with every region outline and FDMA curve; empty regions only get a legend entry."""
    units = _common_units(regions, curves)
    fig, ax = plt.subplots(figsize=FIGSIZE)

    color = 0
    for region in regions:
        label = f"{region.label or region.kind.value} ({region.kind.value})"
        style = "--" if region.is_inner_bound else "-"
        outline = region_outline(region)
        if outline:
            xs, ys = zip(*outline)
            ax.plot(xs, ys, style, color=COLORS[color % len(COLORS)], linewidth=2, label=label)
        else:
            ax.plot([], [], style, color=COLORS[color % len(COLORS)], linewidth=2, label=f"{label} (empty)")
        color += 1
    for curve in curves:
        ax.plot(curve.r1, curve.r2, ":", color=COLORS[color % len(COLORS)], linewidth=2,
                label=f"{curve.label} (alpha_opt {curve.alpha_opt:.4f})")
        color += 1

    x_max = max([r.r1_max for r in regions] + [max(c.r1, default=0.0) for c in curves] + [0.0])
    y_max = max([r.r2_max for r in regions] + [max(c.r2, default=0.0) for c in curves] + [0.0])
    ax.set_xlim(0.0, x_max * 1.05 or 1.0)
    ax.set_ylim(0.0, y_max * 1.05 or 1.0)
    ax.set_xlabel(f"R1 ({units.value})")
    ax.set_ylabel(f"R2 ({units.value})")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if regions or curves:
        ax.legend(loc="upper right", fontsize="small")
    return fig


def render_region_svg(regions: Sequence[RateRegion], curves: Sequence[FdmaCurve],
                      title: str = "Rate regions", provenance: str = "") -> str:
    """SVG text; byte-identical for identical inputs. The provenance goes into the SVG metadata."""
    fig = region_figure(regions, curves, title)
    metadata = {"Date": None, "Title": title}
    if provenance:
        metadata["Description"] = provenance

    buffer = io.BytesIO()
    try:
        with plt.rc_context(SVG_RC):
            fig.savefig(buffer, format="svg", metadata=metadata)
    finally:
        plt.close(fig)
    return buffer.getvalue().decode("utf-8")


def emit_region_svg(regions: Sequence[RateRegion], curves: Sequence[FdmaCurve],
                    path: Union[str, Path], title: str = "Rate regions", provenance: str = "") -> Path:
    """Write the plot to path."""
    text = render_region_svg(regions, curves, title, provenance)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}") from e
    logger.info(f"Wrote plot with {len(regions)} region(s) and {len(curves)} curve(s) to {path}")
    return path
