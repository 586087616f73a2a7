"""Greedy tallest-first tiling of a triangle by affine copies of the 2n-gon.

A triangle minus its inscribed tile splits into 2n - 2 pockets, all with
their base on the original base line and their apex at a tile vertex.
Repeatedly tiling the tallest pending pocket drives the maximum apex height
to zero, so any strip above the base is eventually all that is left.

Two engines share the pocket arithmetic.  ``next_tile`` performs one greedy
step on an immutable :class:`TilingState`.  ``tile_until`` expands whole
generations at once with numpy; whether a pocket gets tiled depends only on
the pocket itself, so the final tile set is the greedy one and only the
order of placement differs.
"""
from __future__ import annotations

import heapq
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, InternalError, InvalidArgument, InvalidState
from .geometry import AffineMap2, ConvexPolygon, Ellipse, Triangle
from .inscription import ProperTile, RegularGonSpec, mu

# Frontier chunk size for the batch engine; budgets are checked between chunks.
CHUNK = 1 << 15


class _BaseLine:
    def __init__(self, left, right):
        self.x0, self.y0 = float(left[0]), float(left[1])
        dx, dy = float(right[0]) - self.x0, float(right[1]) - self.y0
        length = math.hypot(dx, dy)
        self.ux, self.uy = dx / length, dy / length

    def height(self, pts: np.ndarray) -> np.ndarray:
        return self.ux * (pts[..., 1] - self.y0) - self.uy * (pts[..., 0] - self.x0)


def _expand(L: np.ndarray, R: np.ndarray, A: np.ndarray, spec: RegularGonSpec, line: _BaseLine):
    """Tile a batch of triangles (base L -> R, apex A) and cut out their pockets.

    Returns tile vertices ``(m, 2n, 2)``, tile linear parts ``(m, 2, 2)``,
    translations ``(m, 2)`` and the pockets as three ``(m, 2n - 2, 2)``
    arrays of base-left, base-right and apex points.
    """
    n = spec.n
    ref = spec.reference_triangle
    e1 = R - L
    e2 = A - L
    coef = spec.coef
    V = L[:, None, :] + coef[None, :, 0, None] * e1[:, None, :] + coef[None, :, 1, None] * e2[:, None, :]
    V[:, 0] = A
    mid = 0.5 * (L + R)
    V[:, n] = mid
    # The linear part sends the reference frame onto (e1, e2).
    ref_frame = np.array([np.subtract(ref.b, ref.a), np.subtract(ref.c, ref.a)]).T
    lin = np.stack([e1, e2], axis=-1) @ np.linalg.inv(ref_frame)
    trans = L - lin @ np.asarray(ref.a)

    h = line.height(V)
    pl, pr, pa = [], [], []
    for chain, corner in ((spec.left_chain, L), (spec.right_chain, R)):
        # feet[j]: where the line through chain[j-1], chain[j] meets the base line.
        feet = [corner]
        for j in range(2, len(chain) - 1):
            p, q = V[:, chain[j - 1]], V[:, chain[j]]
            hp, hq = h[:, chain[j - 1], None], h[:, chain[j], None]
            feet.append(p + (q - p) * (hp / (hp - hq)))
        feet.append(mid)
        for j in range(1, len(chain) - 1):
            first, second = feet[j - 1], feet[j]
            if corner is R:
                first, second = second, first
            pl.append(first)
            pr.append(second)
            pa.append(V[:, chain[j]])
    return V, lin, trans, np.stack(pl, 1), np.stack(pr, 1), np.stack(pa, 1)


def _check_batch(L, R, A, V, spec: RegularGonSpec, rel: float = 1e-10) -> None:
    # Every tile vertex inside its triangle; apex neighbours on the two sides.
    sides = [np.hypot(*(q - p).T) for p, q in ((L, R), (R, A), (A, L))]
    tol = rel * np.max(np.stack(sides), axis=0)
    for p, q in ((L, R), (R, A), (A, L)):
        e = q - p
        length = np.hypot(e[:, 0], e[:, 1])
        d = (e[:, None, 0] * (V[..., 1] - p[:, None, 1]) - e[:, None, 1] * (V[..., 0] - p[:, None, 0]))
        if np.any(d / length[:, None] < -tol[:, None]):
            raise InternalError("tile leaves its triangle")
    for idx, (p, q) in ((1, (A, L)), (2 * spec.n - 1, (R, A))):
        e = q - p
        off = e[:, 0] * (V[:, idx, 1] - p[:, 1]) - e[:, 1] * (V[:, idx, 0] - p[:, 0])
        if np.any(np.abs(off / np.hypot(e[:, 0], e[:, 1])) > tol):
            raise InternalError("apex angle of the tile differs from that of the triangle")


def _tri_arrays(tri: Triangle):
    left, right = tri.base
    return (np.array([left], dtype=float), np.array([right], dtype=float), np.array([tri.apex], dtype=float))


def _make_tile(V, lin, trans, source: Triangle | None) -> ProperTile:
    amap = AffineMap2(lin, trans)
    return ProperTile(ConvexPolygon(V), Ellipse(amap), source, amap)


def pocket_triangles(tri: Triangle, spec: RegularGonSpec, base_line=None):
    """Inscribe the tile in ``tri`` and return it with its 2n - 2 pockets.

    The pocket at a chain vertex w is cut out by the two tile edges through
    w, both extended down to the base line.  Each edge line meets the base
    line once, so neighbouring pockets share their base vertices exactly.
    """
    line = _BaseLine(*(base_line or tri.base))
    L, R, A = _tri_arrays(tri)
    V, lin, trans, pl, pr, pa = _expand(L, R, A, spec, line)
    _check_batch(L, R, A, V, spec)
    tile = _make_tile(V[0], lin[0], trans[0], tri)
    kids = [Triangle.with_base(pl[0, k], pr[0, k], pa[0, k]) for k in range(pl.shape[1])]
    return tile, kids


def pockets(tri: Triangle, tile: ProperTile, spec: RegularGonSpec) -> list[Triangle]:
    """The 2n - 2 triangles partitioning ``tri`` minus ``tile``."""
    own, kids = pocket_triangles(tri, spec)
    if np.max(np.abs(own.polygon.vertices - tile.polygon.vertices)) > 1e-10 * tri.diameter:
        raise InternalError("tile is not the proper inscription in this triangle")
    return kids


@dataclass(frozen=True)
class TilingState:
    """Snapshot of the greedy tiling: placed tiles plus pending pockets.

    ``pending`` holds ``(-height, creation_index, triangle)`` entries, so the
    smallest entry is the tallest pocket, earliest created on ties.  Heights
    are measured from the root triangle's base line.
    """

    root: Triangle
    placed: tuple = ()
    pending: tuple = ()
    step: int = 0
    created: int = 0

    @classmethod
    def start(cls, tri: Triangle) -> "TilingState":
        return cls(root=tri, pending=((-tri.height, 0, tri),), created=1)

    @property
    def y_max(self) -> float:
        return -min(self.pending)[0] if self.pending else 0.0

    def pending_triangles(self) -> list[Triangle]:
        return [entry[2] for entry in sorted(self.pending)]

    def pending_heights(self) -> list[float]:
        return [-entry[0] for entry in sorted(self.pending)]


def next_tile(state: TilingState, spec: RegularGonSpec) -> TilingState:
    """Tile a tallest pending triangle and replace it by its pockets."""
    if not state.pending:
        raise InvalidState("no pending triangle left to tile")
    heap = list(state.pending)
    heapq.heapify(heap)
    before = -heap[0][0]
    _, _, tri = heapq.heappop(heap)
    line = _BaseLine(*state.root.base)
    tile, kids = pocket_triangles(tri, spec, state.root.base)
    created = state.created
    for kid in kids:
        heapq.heappush(heap, (-float(line.height(np.asarray(kid.apex))), created, kid))
        created += 1
    after = TilingState(state.root, state.placed + (tile,), tuple(heap), state.step + 1, created)
    if after.y_max > before * (1 + 1e-12):
        raise InternalError("maximum pending height increased")
    return after


def greedy_trace(tri: Triangle, spec: RegularGonSpec, steps: int):
    """Run up to ``steps`` greedy steps.

    Returns the states, the height of the triangle tiled at each step and
    the heights of the pockets it produced.
    """
    state = TilingState.start(tri)
    states, heights, children = [state], [], []
    for _ in range(steps):
        if not state.pending:
            break
        heights.append(state.y_max)
        new = next_tile(state, spec)
        children.append([-e[0] for e in new.pending if e[1] >= state.created])
        state = new
        states.append(state)
    return states, heights, children


def decay_counts(heights: Sequence[float], children: Sequence[Sequence[float]], start: int,
                 mu_value: float, rel_tol: float = 1e-9) -> list[int]:
    """Count pending apexes above ``mu * y_start`` along a greedy trace.

    Returns the count before each step from ``start`` on, until it reaches
    zero or the trace ends.
    """
    pending = [heights[0]]
    for i in range(start):
        pending.remove(heights[i])
        pending.extend(children[i])
    if not pending:
        return []
    threshold = mu_value * max(pending) * (1.0 + rel_tol)
    count = sum(1 for h in pending if h > threshold)
    counts = [count]
    for i in range(start, len(heights)):
        if count == 0:
            break
        count -= heights[i] > threshold
        count += sum(1 for h in children[i] if h > threshold)
        counts.append(count)
    return counts


@dataclass
class TilingResult:
    """Tiles and leftover triangles of one ``tile_until`` run.

    Tiles are held as arrays (vertices, linear parts, translations) and
    turned into :class:`ProperTile` objects on demand.
    """

    vertices: np.ndarray
    linear: np.ndarray
    translation: np.ndarray
    residual_arrays: np.ndarray  # (k, 3, 2): base-left, base-right, apex
    delta: float
    generations: int = 0
    source_arrays: np.ndarray | None = field(default=None, repr=False)

    @property
    def count(self) -> int:
        return len(self.vertices)

    @property
    def tiles(self) -> list[ProperTile]:
        out = []
        for k in range(self.count):
            src = None
            if self.source_arrays is not None:
                s = self.source_arrays[k]
                src = Triangle.with_base(s[0], s[1], s[2])
            out.append(_make_tile(self.vertices[k], self.linear[k], self.translation[k], src))
        return out

    @property
    def residual(self) -> list[Triangle]:
        return [Triangle.with_base(t[0], t[1], t[2]) for t in self.residual_arrays]

    @property
    def tile_area(self) -> float:
        v = self.vertices
        if not len(v):
            return 0.0
        x, y = v[..., 0], v[..., 1]
        return float(0.5 * np.sum(x * np.roll(y, -1, axis=1) - y * np.roll(x, -1, axis=1)))

    @property
    def residual_area(self) -> float:
        t = self.residual_arrays
        if not len(t):
            return 0.0
        e1, e2 = t[:, 1] - t[:, 0], t[:, 2] - t[:, 0]
        return float(0.5 * np.sum(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]))


def tile_until(tri: Triangle, delta: float, spec: RegularGonSpec, *,
               cover: Ellipse | None = None, max_tiles: int | None = None,
               time_budget: float | None = None, keep_sources: bool = False,
               check: bool = True) -> TilingResult:
    """Tile ``tri`` until every pending triangle has apex height <= ``delta``.

    With ``cover`` given, a pending triangle whose vertices all lie strictly
    inside that ellipse is left untiled as well, so the leftover region is
    whatever the ellipse already covers rather than a full strip.

    ``max_tiles`` and ``time_budget`` (seconds) bound the run and raise
    :class:`BudgetExceeded` when exhausted.
    """
    if not delta > 0:
        raise InvalidArgument(f"delta must be positive, got {delta}")
    start = time.perf_counter()
    line = _BaseLine(*tri.base)
    cover_inv = cover.map.inverse() if cover is not None else None

    tiles_v, tiles_l, tiles_t, srcs, residual = [], [], [], [], []
    placed = 0
    generations = 0
    frontier = [_tri_arrays(tri)]
    while frontier:
        nxt = []
        for L, R, A in frontier:
            for lo in range(0, len(L), CHUNK):
                l, r, a = L[lo:lo + CHUNK], R[lo:lo + CHUNK], A[lo:lo + CHUNK]
                active = line.height(a) > delta
                if cover_inv is not None:
                    inside = np.ones(len(l), dtype=bool)
                    for p in (l, r, a):
                        q = p @ cover_inv.linear.T + cover_inv.translation
                        inside &= np.einsum("ij,ij->i", q, q) < 1.0 - 1e-12
                    active &= ~inside
                if not np.all(active):
                    residual.append(np.stack([l[~active], r[~active], a[~active]], axis=1))
                    l, r, a = l[active], r[active], a[active]
                if not len(l):
                    continue
                if max_tiles is not None and placed + len(l) > max_tiles:
                    raise BudgetExceeded(f"tile budget of {max_tiles} exhausted", placed,
                                         time.perf_counter() - start)
                elapsed = time.perf_counter() - start
                if time_budget is not None and elapsed > time_budget:
                    raise BudgetExceeded(f"time budget of {time_budget:.1f} s exhausted after "
                                         f"{placed} tiles", placed, elapsed)
                V, lin, trans, pl, pr, pa = _expand(l, r, a, spec, line)
                if check:
                    _check_batch(l, r, a, V, spec)
                tiles_v.append(V)
                tiles_l.append(lin)
                tiles_t.append(trans)
                if keep_sources:
                    srcs.append(np.stack([l, r, a], axis=1))
                placed += len(l)
                nxt.append((pl.reshape(-1, 2), pr.reshape(-1, 2), pa.reshape(-1, 2)))
        frontier = nxt
        generations += 1

    k = 2 * spec.n
    vertices = np.concatenate(tiles_v) if tiles_v else np.zeros((0, k, 2))
    linear = np.concatenate(tiles_l) if tiles_l else np.zeros((0, 2, 2))
    translation = np.concatenate(tiles_t) if tiles_t else np.zeros((0, 2))
    res = np.concatenate(residual) if residual else np.zeros((0, 3, 2))
    sources = None
    if keep_sources:
        sources = np.concatenate(srcs) if srcs else np.zeros((0, 3, 2))
    # Greedy placement order: taller source triangles first, stable otherwise.
    if placed:
        order = np.argsort(-line.height(vertices[:, 0]), kind="stable")
        vertices, linear, translation = vertices[order], linear[order], translation[order]
        if sources is not None:
            sources = sources[order]
    return TilingResult(vertices, linear, translation, res, float(delta), generations - 1, sources)


def predicted_tile_count(n: int, height_over_delta: float, cap: int = 10**12) -> int:
    """Exact number of tiles ``tile_until`` places for a given height/delta ratio.

    Pocket apex heights are fixed fractions (1 + cos(k pi / n)) / 2 of the
    parent apex height, two pockets per fraction, independent of the
    triangle's shape, so the count depends on n and h / delta alone.
    Returns ``cap`` when the count exceeds it.
    """
    ratios = [0.5 * (1.0 + math.cos(k * math.pi / n)) for k in range(1, n)]
    logs = [math.log(r) for r in ratios]
    limit = -math.log(height_over_delta)
    memo: dict = {}

    def count(exps: tuple) -> int:
        if exps in memo:
            return memo[exps]
        level = sum(e * lg for e, lg in zip(exps, logs))
        if level <= limit + 1e-12:
            memo[exps] = 0
            return 0
        total = 1
        for i in range(len(ratios)):
            nxt = exps[:i] + (exps[i] + 1,) + exps[i + 1:]
            total += 2 * count(nxt)
            if total > cap:
                break
        memo[exps] = min(total, cap)
        return memo[exps]

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10000))
    try:
        return count(tuple([0] * len(ratios)))
    finally:
        sys.setrecursionlimit(old)


__all__ = [
    "TilingResult",
    "TilingState",
    "decay_counts",
    "greedy_trace",
    "mu",
    "next_tile",
    "pocket_triangles",
    "pockets",
    "predicted_tile_count",
    "tile_until",
]
