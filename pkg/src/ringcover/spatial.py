"""Broad-phase index over axis-aligned boxes.

A single uniform grid sized by the largest box degenerates when box sizes
span many orders of magnitude, as they do in the tilings.  Boxes are instead
binned into levels by size (cell size doubling per level) and hashed by
center; a box of level k overlaps another box of level >= k only if their
centers fall in neighbouring cells of the larger level.
"""
from __future__ import annotations

import numpy as np

# At most 2**30 cells per axis on the finest level, so keys fit in int64.
_AXIS_BITS = 30


def _expand_ranges(lo: np.ndarray, hi: np.ndarray):
    counts = hi - lo
    total = int(counts.sum())
    owner = np.repeat(np.arange(len(lo)), counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    return owner, np.repeat(lo, counts) + offsets


class BoxIndex:
    def __init__(self, boxes):
        boxes = np.asarray(boxes, dtype=float).reshape(-1, 4)
        self.boxes = boxes
        self.n = len(boxes)
        if not self.n:
            self.levels = []
            return
        size = np.maximum(boxes[:, 2] - boxes[:, 0], boxes[:, 3] - boxes[:, 1])
        self.origin = boxes[:, :2].min(axis=0)
        extent = float(np.max(boxes[:, 2:].max(axis=0) - self.origin))
        floor = max(extent, 1e-300) * 2.0 ** -_AXIS_BITS
        self.c0 = max(float(size.min()), floor)
        lvl = np.ceil(np.log2(np.maximum(size, self.c0) / self.c0)).astype(int)
        lvl = np.maximum(lvl, 0)
        # Rounding in log2 can leave a box slightly larger than its cell.
        lvl += (size > self.c0 * 2.0 ** lvl)
        self.level_of = lvl
        self.centers = 0.5 * (boxes[:, :2] + boxes[:, 2:])
        self.levels = []
        for k in range(int(lvl.max()) + 1):
            members = np.flatnonzero(lvl == k)
            if not len(members):
                continue
            cell = self.c0 * 2.0 ** k
            keys = self._keys(self.centers[members], cell)
            order = np.argsort(keys, kind="stable")
            self.levels.append((k, cell, keys[order], members[order]))

    def _cells(self, pts, cell):
        # Far-away queries are clamped; the exact box test discards false hits.
        c = np.floor((pts - self.origin) / cell)
        return np.clip(c, -2, 2.0 ** _AXIS_BITS + 2).astype(np.int64) + 4

    @staticmethod
    def _combine(ix, iy):
        return (ix << (_AXIS_BITS + 2)) + iy

    def _keys(self, pts, cell):
        c = self._cells(pts, cell)
        return self._combine(c[:, 0], c[:, 1])

    def _lookup(self, pts, min_level=None):
        """All (query, box) pairs with the box center in a cell next to the query's."""
        qs, bs = [], []
        for k, cell, keys, members in self.levels:
            if min_level is None:
                sel = np.arange(len(pts))
            else:
                sel = np.flatnonzero(min_level <= k)
                if not len(sel):
                    continue
            c = self._cells(pts[sel], cell)
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    q = self._combine(c[:, 0] + dx, c[:, 1] + dy)
                    lo = np.searchsorted(keys, q, "left")
                    hi = np.searchsorted(keys, q, "right")
                    hit = hi > lo
                    if not np.any(hit):
                        continue
                    owner, pos = _expand_ranges(lo[hit], hi[hit])
                    qs.append(sel[np.flatnonzero(hit)][owner])
                    bs.append(members[pos])
        if not qs:
            return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
        return np.concatenate(qs), np.concatenate(bs)

    def iter_overlapping_pairs(self, chunk: int = 20_000):
        """Yield arrays (i, j) of box pairs that intersect (touching counts).

        Every unordered pair is produced exactly once, with i < j.
        """
        b = self.boxes
        for start in range(0, self.n, chunk):
            q = np.arange(start, min(start + chunk, self.n))
            a, j = self._lookup(self.centers[q], min_level=self.level_of[q])
            i = q[a]
            li, lj = self.level_of[i], self.level_of[j]
            keep = (li < lj) | ((li == lj) & (i < j))
            i, j = i[keep], j[keep]
            hit = (b[i, 0] <= b[j, 2]) & (b[j, 0] <= b[i, 2]) & (b[i, 1] <= b[j, 3]) & (b[j, 1] <= b[i, 3])
            i, j = i[hit], j[hit]
            if len(i):
                yield np.minimum(i, j), np.maximum(i, j)

    def overlapping_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """All intersecting box pairs (i < j), sorted."""
        parts = list(self.iter_overlapping_pairs()) if self.n >= 2 else []
        if not parts:
            return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
        lo = np.concatenate([p[0] for p in parts])
        hi = np.concatenate([p[1] for p in parts])
        order = np.lexsort((hi, lo))
        return lo[order], hi[order]

    def stabbing_pairs(self, points) -> tuple[np.ndarray, np.ndarray]:
        """(point, box) index pairs with the point inside the closed box."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        if not self.n or not len(pts):
            return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
        # A box of level k containing p has its center within half a cell of p.
        p, j = self._lookup(pts)
        b = self.boxes
        hit = (b[j, 0] <= pts[p, 0]) & (pts[p, 0] <= b[j, 2]) & (b[j, 1] <= pts[p, 1]) & (pts[p, 1] <= b[j, 3])
        return p[hit], j[hit]


def bboxes(centers, linears) -> np.ndarray:
    """Axis-aligned bounding boxes of ellipses ``c + M(unit disc)``."""
    c = np.asarray(centers, dtype=float).reshape(-1, 2)
    m = np.asarray(linears, dtype=float).reshape(-1, 2, 2)
    half = np.sqrt(np.sum(m * m, axis=2))
    return np.concatenate([c - half, c + half], axis=1)


__all__ = ["BoxIndex", "bboxes"]
