"""The regular 2n-gon and its affine copies properly inscribed in triangles.

The reference configuration is the 2n-gon circumscribed about the unit
disc with a vertex at the top.  Its two upper edges, extended down to the
horizontal line through the bottom vertex, cut out the reference triangle.
Any other triangle receives its tile by the affine map that sends the
reference triangle onto it apex-to-apex and base-to-base.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InternalError, InvalidArgument
from .geometry import AffineMap2, ConvexPolygon, Ellipse, Triangle, line_intersection


def choose_n(lam: float) -> int:
    """Least n >= 2 whose circumscribed 2n-gon fits inside the lam-enlarged disc."""
    if not lam > 1.0:
        raise InvalidArgument(f"lambda must exceed 1, got {lam}")
    n = 2
    while not math.cos(math.pi / (2 * n)) * lam > 1.0:
        n += 1
    return n


def mu(n: int) -> float:
    """Height bound, relative to the triangle height, for non-apex tile vertices."""
    if n < 2:
        raise InvalidArgument("n must be at least 2")
    return 0.5 * (1.0 + math.cos(math.pi / n))


def circumradius(n: int) -> float:
    return 1.0 / math.cos(math.pi / (2 * n))


def reference_margin(n: int, lam: float) -> float:
    """Gap between the lam-enlarged unit disc and the 2n-gon, at its vertices."""
    return lam - circumradius(n)


@dataclass(frozen=True, eq=False)
class RegularGonSpec:
    n: int
    vertices: np.ndarray
    reference_triangle: Triangle
    # vertex k = L + coef[k, 0] (R - L) + coef[k, 1] (apex - L)
    coef: np.ndarray

    @property
    def v_plus(self) -> np.ndarray:
        return self.vertices[0]

    @property
    def v_minus(self) -> np.ndarray:
        return self.vertices[self.n]

    @property
    def circumradius(self) -> float:
        return circumradius(self.n)

    @property
    def left_chain(self) -> list[int]:
        """Vertex indices from the apex down the left side to the bottom vertex."""
        return list(range(0, self.n + 1))

    @property
    def right_chain(self) -> list[int]:
        return [0] + list(range(2 * self.n - 1, self.n - 1, -1))

    @property
    def polygon(self) -> ConvexPolygon:
        return ConvexPolygon(self.vertices)


@lru_cache(maxsize=None)
def reference_polygon(n: int) -> RegularGonSpec:
    if n < 2:
        raise InvalidArgument("n must be at least 2")
    radius = circumradius(n)
    angles = math.pi / 2 + np.arange(2 * n) * math.pi / n
    verts = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    # Snap the two poles so the main diagonal is exactly vertical.
    verts[0] = (0.0, radius)
    verts[n] = (0.0, -radius)
    base_y = -radius
    apex = tuple(verts[0])
    left = line_intersection(verts[0], verts[1], (0.0, base_y), (1.0, base_y))
    left = (left[0], base_y)
    right = (-left[0], base_y)
    tri = Triangle.with_base(left, right, apex)
    frame = np.column_stack([np.subtract(right, left), np.subtract(apex, left)])
    coef = np.linalg.solve(frame, (verts - np.asarray(left)).T).T
    verts.flags.writeable = False
    coef.flags.writeable = False
    return RegularGonSpec(n=n, vertices=verts, reference_triangle=tri, coef=coef)


@dataclass(frozen=True, eq=False)
class ProperTile:
    polygon: ConvexPolygon
    ellipse: Ellipse
    source: Triangle
    map: AffineMap2


def inscription_map(tri: Triangle, spec: RegularGonSpec) -> AffineMap2:
    ref = spec.reference_triangle
    left, right = tri.base
    return AffineMap2.from_triangles(
        [ref.a, ref.b, ref.c], [left, right, tri.apex]
    )


def properly_inscribe(tri: Triangle, spec: RegularGonSpec, check: bool = True) -> ProperTile:
    """Affine copy of the 2n-gon properly inscribed in ``tri``.

    The copy sits inside the triangle, sends the bottom vertex to the base
    midpoint and the top vertex to the apex, and shares the apex angle.
    """
    amap = inscription_map(tri, spec)
    verts = amap(spec.vertices)
    # Poles land exactly on the apex and the base midpoint.
    verts[0] = tri.apex
    verts[spec.n] = tri.base_midpoint
    tile = ProperTile(ConvexPolygon(verts), Ellipse(amap), tri, amap)
    if check:
        _check_inscription(tile, spec)
    return tile


def _check_inscription(tile: ProperTile, spec: RegularGonSpec, rel: float = 1e-10) -> None:
    tri = tile.source
    tol = rel * tri.diameter
    verts = tile.polygon.vertices
    if not all(tri.contains(v, tol) for v in verts):
        raise InternalError("tile leaves its triangle")
    if math.dist(verts[0], tri.apex) > tol or math.dist(verts[spec.n], tri.base_midpoint) > tol:
        raise InternalError("tile poles are not at the apex and base midpoint")
    k = tri.designated_base
    # Apex-adjacent tile vertices lie on the two non-base sides.
    left_side = (tri.vertex(k + 2), tri.vertex(k))
    right_side = (tri.vertex(k + 1), tri.vertex(k + 2))
    for idx, (p, q) in ((1, left_side), (2 * spec.n - 1, right_side)):
        e = np.subtract(q, p)
        off = abs(e[0] * (verts[idx][1] - p[1]) - e[1] * (verts[idx][0] - p[0])) / math.hypot(*e)
        if off > tol:
            raise InternalError("apex angle of the tile differs from that of the triangle")


def apex_chord_ratio(tile: ProperTile, spec: RegularGonSpec) -> float:
    """Apex-to-chord distance over the triangle height (the chord joins the apex neighbours)."""
    tri = tile.source
    v1 = tile.polygon.vertices[1]
    v2 = tile.polygon.vertices[2 * spec.n - 1]
    e = v2 - v1
    apex = np.asarray(tri.apex)
    dist = abs(e[0] * (apex[1] - v1[1]) - e[1] * (apex[0] - v1[0])) / math.hypot(*e)
    return dist / tri.height
