"""Independent checks of a packing: disjoint interiors and covering enlargement."""
from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgument
from .geometry import Ellipse, canonical_arrays, contact_scale_batch, ellipse_arrays
from .spatial import BoxIndex, bboxes

PAIR_BATCH = 200_000
CELL_BATCH = 50_000


def _arrays(ellipses):
    """Accept a list of Ellipse or a (centers, linears) pair."""
    if isinstance(ellipses, tuple) and len(ellipses) == 2 and not isinstance(ellipses[0], Ellipse):
        c = np.asarray(ellipses[0], dtype=float).reshape(-1, 2)
        m = np.asarray(ellipses[1], dtype=float).reshape(-1, 2, 2)
        return c, m
    return ellipse_arrays(ellipses)


def _shape(m: np.ndarray) -> np.ndarray:
    return m @ np.swapaxes(m, 1, 2)


def _ordered(c: np.ndarray, i: np.ndarray, j: np.ndarray):
    # Evaluate every pair in a fixed orientation so the verdict cannot depend
    # on the order in which the ellipses were supplied.
    swap = (c[i, 0] > c[j, 0]) | ((c[i, 0] == c[j, 0]) & (c[i, 1] > c[j, 1]))
    return np.where(swap, j, i), np.where(swap, i, j)


def pair_scales(c: np.ndarray, m: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    a, b = _ordered(c, i, j)
    s = _shape(m)
    out = np.empty(len(a))
    for lo in range(0, len(a), PAIR_BATCH):
        sl = slice(lo, lo + PAIR_BATCH)
        out[sl] = contact_scale_batch(c[a[sl]], s[a[sl]], c[b[sl]], s[b[sl]])
    return out


@dataclass
class PackingCheck:
    ok: bool
    offending: list
    candidate_pairs: int
    pairs_tested: int
    tangent_pairs: int
    seconds: float = 0.0

    def __bool__(self) -> bool:
        return self.ok


def separated(c: np.ndarray, m: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Pairs proven disjoint by a separating axis.

    Axes tried: the line of centers and both principal axes of each
    ellipse.  The support half-width of ``c + M(disc)`` along a unit vector u
    is ``|M^T u|``.  A False entry proves nothing.
    """
    u_axes = np.linalg.svd(m)[0]
    r = c[j] - c[i]
    dist = np.hypot(r[:, 0], r[:, 1])
    dirs = [r / np.where(dist > 0, dist, 1.0)[:, None]]
    for k in (i, j):
        dirs.append(u_axes[k][:, :, 0])
        dirs.append(u_axes[k][:, :, 1])
    out = np.zeros(len(i), dtype=bool)
    for u in dirs:
        hi = np.linalg.norm(np.einsum("nji,nj->ni", m[i], u), axis=1)
        hj = np.linalg.norm(np.einsum("nji,nj->ni", m[j], u), axis=1)
        gap = np.abs(np.sum(r * u, axis=1))
        out |= gap > (hi + hj) * (1.0 + 1e-9)
    return out


def _check_pairs(c, m, pairs, tol):
    offending, candidates, tested, tangent = [], 0, 0, 0
    for i, j in pairs:
        candidates += len(i)
        for lo in range(0, len(i), PAIR_BATCH):
            a, b = i[lo:lo + PAIR_BATCH], j[lo:lo + PAIR_BATCH]
            keep = ~separated(c, m, a, b)
            a, b = a[keep], b[keep]
            scale = pair_scales(c, m, a, b)
            tested += len(a)
            tangent += int(np.sum(np.abs(scale - 1.0) <= tol))
            bad = scale < 1.0 - tol
            offending.extend((int(x), int(y), float(s)) for x, y, s in zip(a[bad], b[bad], scale[bad]))
    offending.sort()
    return offending, candidates, tested, tangent


def verify_packing(ellipses, tol: float = 1e-9) -> PackingCheck:
    """True iff no two ellipses have overlapping interiors.

    Bounding boxes and separating axes discard far pairs; the rest get the
    exact contact test.  A pair whose contact scale is within ``tol`` of 1
    counts as tangent, below ``1 - tol`` as overlapping.
    """
    start = time.perf_counter()
    c, m = _arrays(ellipses)
    pairs = BoxIndex(bboxes(c, m)).iter_overlapping_pairs()
    offending, cand, tested, tangent = _check_pairs(c, m, pairs, tol)
    return PackingCheck(not offending, offending, cand, tested, tangent, time.perf_counter() - start)


def verify_packing_bruteforce(ellipses, tol: float = 1e-9) -> PackingCheck:
    """All-pairs reference for :func:`verify_packing`, exact test on every pair."""
    start = time.perf_counter()
    c, m = _arrays(ellipses)
    i, j = np.triu_indices(len(c), k=1)
    scale = pair_scales(c, m, i, j)
    bad = scale < 1.0 - tol
    tangent = int(np.sum(np.abs(scale - 1.0) <= tol))
    offending = [(int(a), int(b), float(s)) for a, b, s in zip(i[bad], j[bad], scale[bad])]
    return PackingCheck(not offending, offending, len(i), len(i), tangent, time.perf_counter() - start)


@dataclass
class CoverageReport:
    """Outcome of the quadtree covering check.

    ``uncovered_cells`` are smallest cells whose center no enlarged ellipse
    contains; ``needs_refinement`` are smallest cells whose center is covered
    but which no single enlarged ellipse contains entirely.
    """

    region: tuple
    min_cell: float
    uncovered_cells: list = field(default_factory=list)
    needs_refinement: list = field(default_factory=list)
    certified: bool = False
    stats: dict = field(default_factory=dict)
    # Wall time is kept out of the serialized report so reports are reproducible.
    seconds: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("seconds")
        return out

    def save_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kind", "x0", "y0", "x1", "y1"])
            for kind, cells in (("uncovered", self.uncovered_cells), ("needs_refinement", self.needs_refinement)):
                for r in cells:
                    w.writerow([kind, *(repr(float(v)) for v in r)])


def verify_covering(ellipses, lam: float, region, min_cell: float, tol: float = 1e-12,
                    max_cells: int | None = None) -> CoverageReport:
    """Certify that the ``lam``-enlargements cover the rectangle ``region``.

    A cell is certified when its four corners lie inside one enlarged
    ellipse, which by convexity puts the whole cell inside it.  Other cells
    are split in four until their longer side is at most ``min_cell``.
    """
    if not min_cell > 0:
        raise InvalidArgument("min_cell must be positive")
    if not lam > 0:
        raise InvalidArgument("lambda must be positive")
    x0, y0, x1, y1 = (float(v) for v in region)
    if not (x1 > x0 and y1 > y0):
        raise InvalidArgument("region must have positive width and height")
    start = time.perf_counter()
    c, m = _arrays(ellipses)
    big = lam * m
    index = BoxIndex(bboxes(c, big))
    inv = np.linalg.inv(big) if len(big) else np.zeros((0, 2, 2))

    cells = np.array([[x0, y0, x1, y1]])
    certified_count = 0
    depth = 0
    processed = 0
    uncovered, refine = [], []
    while len(cells):
        children = []
        for lo in range(0, len(cells), CELL_BATCH):
            batch = cells[lo:lo + CELL_BATCH]
            ok, center_hit = _certify(batch, c, inv, index, tol)
            certified_count += int(ok.sum())
            rest = batch[~ok]
            if not len(rest):
                continue
            size = np.maximum(rest[:, 2] - rest[:, 0], rest[:, 3] - rest[:, 1])
            small = size <= min_cell
            for r, hit in zip(rest[small], center_hit[~ok][small]):
                (refine if hit else uncovered).append(tuple(float(v) for v in r))
            split = rest[~small]
            if len(split):
                mx = 0.5 * (split[:, 0] + split[:, 2])
                my = 0.5 * (split[:, 1] + split[:, 3])
                children.extend([
                    np.column_stack([split[:, 0], split[:, 1], mx, my]),
                    np.column_stack([mx, split[:, 1], split[:, 2], my]),
                    np.column_stack([split[:, 0], my, mx, split[:, 3]]),
                    np.column_stack([mx, my, split[:, 2], split[:, 3]]),
                ])
        processed += len(cells)
        if max_cells is not None and processed > max_cells:
            raise InvalidArgument(f"more than {max_cells} cells examined; raise min_cell")
        cells = np.concatenate(children) if children else np.zeros((0, 4))
        depth += 1

    a, b, _ = canonical_arrays(m)
    uncovered.sort()
    refine.sort()
    stats = {
        "ellipse_count": int(len(c)),
        "min_width": float(2 * b.min()) if len(b) else 0.0,
        "max_diameter": float(2 * a.max()) if len(a) else 0.0,
        "cells_certified": certified_count,
        "cells_examined": processed,
        "depth": depth,
    }
    return CoverageReport((x0, y0, x1, y1), float(min_cell), uncovered, refine,
                          not uncovered and not refine, stats, time.perf_counter() - start)


def _certify(cells: np.ndarray, c: np.ndarray, inv: np.ndarray, index: BoxIndex, tol: float):
    """Per cell: covered by one enlarged ellipse, and whether its center is covered at all."""
    n = len(cells)
    ok = np.zeros(n, dtype=bool)
    center_hit = np.zeros(n, dtype=bool)
    centers = 0.5 * (cells[:, :2] + cells[:, 2:])
    p, e = index.stabbing_pairs(centers)
    if not len(p):
        return ok, center_hit
    corners = np.stack([
        cells[p][:, [0, 1]], cells[p][:, [2, 1]], cells[p][:, [2, 3]], cells[p][:, [0, 3]], centers[p],
    ], axis=1)
    d = corners - c[e][:, None, :]
    q = np.einsum("nij,nkj->nki", inv[e], d)
    rho2 = np.sum(q * q, axis=2)
    limit = (1.0 - tol) ** 2
    inside_all = np.all(rho2[:, :4] < limit, axis=1)
    np.logical_or.at(ok, p, inside_all)
    np.logical_or.at(center_hit, p, rho2[:, 4] < 1.0)
    return ok, center_hit


def cell_region(lattice) -> tuple[float, float, float, float]:
    """Bounding rectangle of the fundamental parallelogram spanned by ``lattice``."""
    u, v = np.asarray(lattice, dtype=float)
    pts = np.array([[0.0, 0.0], u, u + v, v])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    return (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))


__all__ = [
    "CoverageReport",
    "PackingCheck",
    "cell_region",
    "pair_scales",
    "separated",
    "verify_covering",
    "verify_packing",
    "verify_packing_bruteforce",
]
