"""SVG figures of packings, single tiles, chase traces and the width/count trend.

Figures are drawn on a bare Figure with the SVG canvas (no pyplot state) and
written with a fixed hash salt and no date, so identical input gives
byte-identical files.
"""
from __future__ import annotations

import math

import matplotlib
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.collections import EllipseCollection
from matplotlib.figure import Figure
from matplotlib.patches import Circle, Ellipse as EllipsePatch, Polygon, Rectangle, Wedge

import numpy as np

from .geometry import canonical_arrays

# Above this many ellipses one collection replaces individual patches.
PATCH_LIMIT = 20_000

PACK_COLOR = "#3b6ea8"
ENLARGED_COLOR = "#d08a2c"
SCAFFOLD_COLOR = "#7a7a7a"


def _figure(size=(6.0, 6.0)):
    fig = Figure(figsize=size)
    FigureCanvasSVG(fig)
    ax = fig.add_subplot(1, 1, 1)
    ax.set_aspect("equal")
    return fig, ax


def _save(fig, path) -> None:
    with matplotlib.rc_context({"svg.hashsalt": "ringcover", "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})


def _ellipses(ax, centers, linears, scale, color, fill, gid, width=0.4):
    a, b, ang = canonical_arrays(linears)
    a, b = scale * a, scale * b
    deg = np.degrees(ang)
    if len(centers) > PATCH_LIMIT:
        coll = EllipseCollection(2 * a, 2 * b, deg, units="xy", offsets=centers,
                                 offset_transform=ax.transData,
                                 facecolors=color if fill else "none",
                                 edgecolors="none" if fill else color, linewidths=width)
        coll.set_gid(gid)
        ax.add_collection(coll)
        return 1
    for k in range(len(centers)):
        ax.add_patch(EllipsePatch(centers[k], 2 * a[k], 2 * b[k], angle=deg[k], gid=f"{gid}-{k}",
                                  facecolor=color if fill else "none",
                                  edgecolor=PACK_COLOR if fill else color,
                                  linewidth=width, alpha=0.55 if fill else 1.0))
    return len(centers)


def render_packing(centers, linears, path, lam: float | None = None, enlarged: bool = False,
                   triangles=(), region=None, title: str = "") -> int:
    """Draw ellipses ``c + M(unit disc)``; optionally their ``lam``-enlargements and triangles.

    Returns the number of drawn ellipse elements.
    """
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    linears = np.asarray(linears, dtype=float).reshape(-1, 2, 2)
    fig, ax = _figure()
    count = _ellipses(ax, centers, linears, 1.0, PACK_COLOR, True, "ellipse") if len(centers) else 0
    if enlarged and lam is not None and len(centers):
        _ellipses(ax, centers, linears, lam, ENLARGED_COLOR, False, "enlarged", width=0.3)
    for k, tri in enumerate(triangles):
        ax.add_patch(Polygon(np.asarray(tri, dtype=float), closed=True, fill=False,
                             edgecolor=SCAFFOLD_COLOR, linewidth=0.5, gid=f"triangle-{k}"))
    if region is not None:
        x0, y0, x1, y1 = region
        ax.set_xlim(x0, x1)
        ax.set_ylim(y0, y1)
    elif len(centers):
        reach = np.sqrt(np.sum(linears ** 2, axis=2)) * (lam if enlarged and lam else 1.0)
        lo = (centers - reach).min(axis=0)
        hi = (centers + reach).max(axis=0)
        pad = 0.02 * float(np.max(hi - lo))
        ax.set_xlim(lo[0] - pad, hi[0] + pad)
        ax.set_ylim(lo[1] - pad, hi[1] + pad)
    if title:
        ax.set_title(title, fontsize=9)
    ax.tick_params(labelsize=7)
    _save(fig, path)
    return count


def render_tile(tile, path, lam: float | None = None, triangle=None) -> None:
    """One inscribed tile: its triangle, polygon, ellipse and optional enlargement."""
    fig, ax = _figure((4.5, 4.5))
    if triangle is not None:
        ax.add_patch(Polygon(triangle.vertices, closed=True, fill=False, edgecolor=SCAFFOLD_COLOR,
                             linewidth=0.8, gid="triangle"))
    ax.add_patch(Polygon(tile.polygon.vertices, closed=True, fill=False, edgecolor="k",
                         linewidth=0.8, gid="polygon"))
    e = tile.ellipse
    _ellipses(ax, e.center[None], e.linear[None], 1.0, PACK_COLOR, True, "ellipse")
    if lam is not None:
        _ellipses(ax, e.center[None], e.linear[None], lam, ENLARGED_COLOR, False, "enlarged", 0.8)
    pts = tile.polygon.vertices if triangle is None else triangle.vertices
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    pad = 0.08 * float(np.max(hi - lo))
    ax.set_xlim(lo[0] - pad, hi[0] + pad)
    ax.set_ylim(lo[1] - pad, hi[1] + pad)
    ax.set_axis_off()
    _save(fig, path)


def _region_patch(region, k):
    kind = region.kind
    if kind == "square":
        h = region.side / 2
        c, s = math.cos(region.angle), math.sin(region.angle)
        corner = np.asarray(region.center) - np.array([c * h - s * h, s * h + c * h])
        return Rectangle(corner, region.side, region.side, angle=math.degrees(region.angle),
                         fill=False, edgecolor="crimson", linewidth=0.6, gid=f"region-{k}")
    sec = region.sector if kind == "crescent" else region
    t0 = math.degrees(sec.axis - sec.half)
    t1 = math.degrees(sec.axis + sec.half)
    return Wedge(sec.center, sec.r_out, t0, t1, width=sec.r_out - sec.r_in, fill=False,
                 edgecolor="crimson", linewidth=0.6, gid=f"region-{k}")


def render_chase(packing, trace, path, zoom: int | None = None) -> None:
    """Discs, the chase regions and the returned point.

    ``zoom`` frames the figure on region ``zoom`` of the trace instead of the start square.
    """
    fig, ax = _figure()
    for k, (c, r) in enumerate(zip(packing.centers, packing.radii)):
        ax.add_patch(Circle(c, r, facecolor=PACK_COLOR, edgecolor="none", alpha=0.45, gid=f"disc-{k}"))
    regions = trace.regions
    for k, reg in enumerate(regions):
        ax.add_patch(_region_patch(reg, k))
    frame = regions[zoom if zoom is not None else 0]
    pts = frame.boundary_sample(64)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    pad = 0.1 * float(np.max(hi - lo))
    ax.set_xlim(lo[0] - pad, hi[0] + pad)
    ax.set_ylim(lo[1] - pad, hi[1] + pad)
    if trace.result is not None:
        ax.plot([trace.result[0]], [trace.result[1]], marker="x", color="k", markersize=6, gid="result")
    ax.set_title(" > ".join(trace.case_labels) or "no step", fontsize=8)
    ax.tick_params(labelsize=7)
    _save(fig, path)


def render_trend(rows, path) -> None:
    """Ellipse count and minimum width against lambda, log scale.

    ``rows`` are dicts with ``lambda``, ``count`` and ``min_width``; rows with
    a None count (not built) are drawn from ``estimated_count`` as open markers.
    """
    fig = Figure(figsize=(7.0, 3.2))
    FigureCanvasSVG(fig)
    left, right = fig.add_subplot(1, 2, 1), fig.add_subplot(1, 2, 2)
    built = [r for r in rows if r.get("count") is not None]
    est = [r for r in rows if r.get("count") is None and r.get("estimated_count")]
    left.plot([r["lambda"] for r in built], [r["count"] for r in built], "o-", color=PACK_COLOR, gid="count")
    if est:
        left.plot([r["lambda"] for r in est], [r["estimated_count"] for r in est], "o", mfc="none",
                  color=ENLARGED_COLOR, gid="count-estimate")
    left.set_yscale("log")
    left.set_xlabel("lambda")
    left.set_ylabel("ellipses per cell")
    widths = [r for r in built if r.get("min_width")]
    right.plot([r["lambda"] for r in widths], [r["min_width"] for r in widths], "s-", color=PACK_COLOR,
               gid="width")
    right.set_yscale("log")
    right.set_xlabel("lambda")
    right.set_ylabel("minimum width")
    for ax in (left, right):
        ax.invert_xaxis()
        ax.tick_params(labelsize=7)
    fig.tight_layout()
    _save(fig, path)


__all__ = ["render_chase", "render_packing", "render_tile", "render_trend"]
