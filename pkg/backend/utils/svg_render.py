"""
SVG rendering of barcodes and complex snapshots.

Figures are drawn with matplotlib's Agg backend and serialized as SVG with a
fixed hash salt and no date stamp, so identical inputs give identical text.
"""
import io
import logging
from typing import Mapping, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Circle, Polygon  # noqa: E402

from complexes.simplicial import SimplicialComplex  # noqa: E402
from zigzag.module import Barcode  # noqa: E402

logger = logging.getLogger(__name__)

plt.rcParams.update({"svg.hashsalt": "evasion", "svg.fonttype": "none"})


def _to_svg(fig) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def render_barcode(barcode: Barcode, title: Optional[str] = None) -> str:
    """One row per interval over slots 1..m; tick labels carry the slot times."""
    m = barcode.m
    rows = max(1, len(barcode.intervals))
    fig, ax = plt.subplots(figsize=(max(4.0, 0.5 * m + 2), 0.3 * rows + 1.5))
    full = (1, m)
    for row, (b, d) in enumerate(barcode.intervals):
        color = "tab:red" if (b, d) == full else "tab:blue"
        ax.plot([b - 0.4, d + 0.4], [row, row], color=color, lw=3, solid_capstyle="butt")
    ax.set_xlim(0.5, m + 0.5)
    ax.set_ylim(-1, rows)
    ax.set_yticks([])
    ax.set_xticks(range(1, m + 1))
    if barcode.slot_times:
        ax.set_xticklabels([f"{k}\n{t:.3f}" for k, t in enumerate(barcode.slot_times, start=1)], fontsize=6)
    degree = "" if barcode.degree is None else f"H_{barcode.degree} "
    ax.set_title(title or f"{degree}barcode over F_{barcode.p}, {len(barcode.intervals)} intervals")
    ax.set_xlabel("slot (time)")
    logger.debug(f"rendered barcode with {len(barcode.intervals)} intervals")
    return _to_svg(fig)


def render_complex(cx: SimplicialComplex, coords: Mapping[str, Sequence[float]], r: Optional[float] = None,
                   fence: Sequence[str] = (), title: Optional[str] = None) -> str:
    """Snapshot of a planar complex: balls (if r), filled triangles, edges and labelled vertices."""
    fig, ax = plt.subplots(figsize=(6, 6))
    if r is not None:
        for v in cx.vertices:
            ax.add_patch(Circle(coords[v][:2], r, color="tab:green", alpha=0.12, lw=0))
    for tri in cx.of_dim(2):
        ax.add_patch(Polygon([coords[v][:2] for v in tri], closed=True, color="tab:orange", alpha=0.4, lw=0))
    for u, v in cx.edges:
        ax.plot([coords[u][0], coords[v][0]], [coords[u][1], coords[v][1]], color="black", lw=0.8)
    fence = set(fence)
    for v in cx.vertices:
        x, y = coords[v][:2]
        ax.plot([x], [y], "s" if v in fence else "o", color="tab:gray" if v in fence else "tab:blue", ms=4)
        ax.annotate(v, (x, y), fontsize=6, xytext=(2, 2), textcoords="offset points")
    ax.set_aspect("equal")
    ax.autoscale_view()
    ax.set_title(title or f"{len(cx.vertices)} vertices, {len(cx.edges)} edges, {len(cx.of_dim(2))} triangles")
    return _to_svg(fig)
