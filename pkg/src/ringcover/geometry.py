"""Planar primitives: affine maps, triangles, convex polygons, ellipses, discs.

Everything here is an immutable value.  Ellipses are stored as the affine
image of the closed unit disc, which keeps enlargement, half-turns and the
tiling maps exact compositions instead of re-fitting axes.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgument

# Degeneracy threshold for determinants and (relative) areas.
DEGENERACY_TOL = 1e-12


class Location(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


class Contact(enum.Enum):
    DISJOINT = "disjoint"
    TANGENT = "tangent"
    OVERLAP = "overlap"


def as_point(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float).reshape(2)
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument(f"non-finite point {p!r}")
    return arr


def cross(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def polygon_area(vertices) -> float:
    """Signed shoelace area; positive for counterclockwise order."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def line_intersection(p1, p2, q1, q2) -> tuple[float, float]:
    """Intersection of line p1p2 with line q1q2 (plain floats, no checks)."""
    d1x, d1y = p2[0] - p1[0], p2[1] - p1[1]
    d2x, d2y = q2[0] - q1[0], q2[1] - q1[1]
    den = d1x * d2y - d1y * d2x
    s = ((q1[0] - p1[0]) * d2y - (q1[1] - p1[1]) * d2x) / den
    return (p1[0] + s * d1x, p1[1] + s * d1y)


@dataclass(frozen=True, eq=False)
class AffineMap2:
    linear: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        lin = np.array(self.linear, dtype=float).reshape(2, 2)
        tr = np.array(self.translation, dtype=float).reshape(2)
        lin.flags.writeable = False
        tr.flags.writeable = False
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", tr)
        # Tiles shrink geometrically, so only exact singularity is rejected here;
        # triangles and polygons carry the scale-aware degeneracy checks.
        if np.linalg.det(lin) == 0.0 or not np.all(np.isfinite(lin)):
            raise InvalidArgument("affine map has singular linear part")

    @classmethod
    def identity(cls) -> "AffineMap2":
        return cls(np.eye(2), np.zeros(2))

    @classmethod
    def rotation(cls, angle: float, center=(0.0, 0.0)) -> "AffineMap2":
        c, s = math.cos(angle), math.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        ctr = as_point(center)
        return cls(rot, ctr - rot @ ctr)

    @classmethod
    def from_triangles(cls, src: Sequence, dst: Sequence) -> "AffineMap2":
        """The unique affine map sending src[i] to dst[i] for i = 0, 1, 2."""
        s = np.asarray(src, dtype=float)
        d = np.asarray(dst, dtype=float)
        S = np.column_stack([s[1] - s[0], s[2] - s[0]])
        D = np.column_stack([d[1] - d[0], d[2] - d[0]])
        if abs(np.linalg.det(S)) == 0.0:
            raise InvalidArgument("source triangle is degenerate")
        lin = D @ np.linalg.inv(S)
        return cls(lin, d[0] - lin @ s[0])

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.linear))

    def __call__(self, points):
        pts = np.asarray(points, dtype=float)
        return pts @ self.linear.T + self.translation

    def __matmul__(self, other: "AffineMap2") -> "AffineMap2":
        return AffineMap2(self.linear @ other.linear, self.linear @ other.translation + self.translation)

    def inverse(self) -> "AffineMap2":
        inv = np.linalg.inv(self.linear)
        return AffineMap2(inv, -inv @ self.translation)

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.linear, compute_uv=False)


@dataclass(frozen=True)
class Triangle:
    """Counterclockwise triangle with one designated base side.

    Side ``k`` runs from vertex ``k`` to vertex ``k + 1``; the apex is the
    vertex opposite the designated base.
    """

    a: tuple[float, float]
    b: tuple[float, float]
    c: tuple[float, float]
    designated_base: int = 0

    def __post_init__(self):
        for name in ("a", "b", "c"):
            p = getattr(self, name)
            x, y = float(p[0]), float(p[1])
            if not (math.isfinite(x) and math.isfinite(y)):
                raise InvalidArgument(f"non-finite triangle vertex {p!r}")
            object.__setattr__(self, name, (x, y))
        if self.designated_base not in (0, 1, 2):
            raise InvalidArgument("designated_base must be 0, 1 or 2")
        area = self.signed_area
        scale = max(self.edge_lengths()) ** 2
        if not area > DEGENERACY_TOL * scale:
            raise InvalidArgument(f"degenerate or clockwise triangle (signed area {area:.3e})")

    @classmethod
    def with_base(cls, left, right, apex) -> "Triangle":
        """Triangle with base ``left -> right`` and the apex to its left."""
        return cls(tuple(left), tuple(right), tuple(apex), 0)

    @property
    def vertices(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    def vertex(self, k: int) -> tuple[float, float]:
        return (self.a, self.b, self.c)[k % 3]

    @property
    def signed_area(self) -> float:
        (ax, ay), (bx, by), (cx, cy) = self.a, self.b, self.c
        return 0.5 * ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))

    @property
    def area(self) -> float:
        return abs(self.signed_area)

    def edge_lengths(self) -> tuple[float, float, float]:
        pts = (self.a, self.b, self.c)
        return tuple(math.dist(pts[k], pts[(k + 1) % 3]) for k in range(3))

    @property
    def diameter(self) -> float:
        return max(self.edge_lengths())

    @property
    def base(self) -> tuple[tuple[float, float], tuple[float, float]]:
        k = self.designated_base
        return self.vertex(k), self.vertex(k + 1)

    @property
    def apex(self) -> tuple[float, float]:
        return self.vertex(self.designated_base + 2)

    @property
    def base_midpoint(self) -> tuple[float, float]:
        (x0, y0), (x1, y1) = self.base
        return (0.5 * (x0 + x1), 0.5 * (y0 + y1))

    def height_of(self, p) -> float:
        """Signed distance of ``p`` from the base line (positive on the apex side)."""
        (x0, y0), (x1, y1) = self.base
        dx, dy = x1 - x0, y1 - y0
        return (dx * (p[1] - y0) - dy * (p[0] - x0)) / math.hypot(dx, dy)

    @property
    def height(self) -> float:
        return self.height_of(self.apex)

    def contains(self, p, tol: float = 0.0) -> bool:
        pts = (self.a, self.b, self.c)
        for k in range(3):
            (x0, y0), (x1, y1) = pts[k], pts[(k + 1) % 3]
            edge = math.hypot(x1 - x0, y1 - y0)
            if ((x1 - x0) * (p[1] - y0) - (y1 - y0) * (p[0] - x0)) / edge < -tol:
                return False
        return True


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise InvalidArgument("a convex polygon needs at least three 2D vertices")
        if not np.all(np.isfinite(v)):
            raise InvalidArgument("non-finite polygon vertex")
        edges = np.roll(v, -1, axis=0) - v
        turns = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
        scale = float(np.max(np.sum(edges**2, axis=1)))
        if not np.all(turns > DEGENERACY_TOL * scale):
            raise InvalidArgument("polygon is not strictly convex and counterclockwise")
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return len(self.vertices)

    @property
    def area(self) -> float:
        return polygon_area(self.vertices)

    def edges(self) -> list[tuple[np.ndarray, np.ndarray]]:
        v = self.vertices
        return [(v[k], v[(k + 1) % len(v)]) for k in range(len(v))]

    def contains(self, p, tol: float = 0.0) -> bool:
        for p0, p1 in self.edges():
            e = p1 - p0
            if cross(e, np.asarray(p) - p0) / math.hypot(*e) < -tol:
                return False
        return True

    @property
    def diameter(self) -> float:
        v = self.vertices
        return float(np.max(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1)))


@dataclass(frozen=True, eq=False)
class Ellipse:
    """The closed set ``map(unit disc)``."""

    map: AffineMap2

    def __post_init__(self):
        if abs(self.map.det) == 0.0:
            raise InvalidArgument("ellipse map must be invertible")

    @classmethod
    def from_axes(cls, center, semi_axes, angle: float = 0.0) -> "Ellipse":
        a, b = float(semi_axes[0]), float(semi_axes[1])
        if not (a > 0 and b > 0):
            raise InvalidArgument("semi-axes must be positive")
        c, s = math.cos(angle), math.sin(angle)
        lin = np.array([[c, -s], [s, c]]) @ np.diag([a, b])
        return cls(AffineMap2(lin, as_point(center)))

    @classmethod
    def disc(cls, center, radius: float) -> "Ellipse":
        return cls.from_axes(center, (radius, radius), 0.0)

    @property
    def center(self) -> np.ndarray:
        return self.map.translation

    @property
    def linear(self) -> np.ndarray:
        return self.map.linear

    def canonical(self) -> tuple[float, float, float, float, float]:
        """(cx, cy, semi_major, semi_minor, angle in [0, pi))."""
        u, s, _ = np.linalg.svd(self.linear)
        a, b = float(s[0]), float(s[1])
        if a - b <= 1e-12 * a:
            angle = 0.0
        else:
            angle = math.atan2(u[1, 0], u[0, 0]) % math.pi
            if angle >= math.pi - 1e-15:
                angle = 0.0
        cx, cy = self.center
        return (float(cx), float(cy), a, b, angle)

    @property
    def semi_axes(self) -> tuple[float, float]:
        _, _, a, b, _ = self.canonical()
        return a, b

    @property
    def angle(self) -> float:
        return self.canonical()[4]

    @property
    def diameter(self) -> float:
        return 2.0 * self.semi_axes[0]

    @property
    def width(self) -> float:
        return 2.0 * self.semi_axes[1]

    @property
    def shape_matrix(self) -> np.ndarray:
        """Sigma with the ellipse equal to {x : (x-c)^T Sigma^-1 (x-c) <= 1}."""
        return self.linear @ self.linear.T

    def bbox(self) -> tuple[float, float, float, float]:
        half = np.sqrt(np.sum(self.linear**2, axis=1))
        cx, cy = self.center
        return (cx - half[0], cy - half[1], cx + half[0], cy + half[1])

    def normalized_radius(self, points) -> np.ndarray:
        """|map^-1(p)| for each point; < 1 inside, > 1 outside."""
        pts = np.asarray(points, dtype=float)
        q = (pts - self.center) @ np.linalg.inv(self.linear).T
        return np.sqrt(np.sum(q * q, axis=-1))

    def boundary_points(self, count: int = 64) -> np.ndarray:
        t = np.linspace(0.0, 2.0 * math.pi, count, endpoint=False)
        return self.map(np.column_stack([np.cos(t), np.sin(t)]))

    def transformed(self, amap: AffineMap2) -> "Ellipse":
        return Ellipse(amap @ self.map)

    def translated(self, offset) -> "Ellipse":
        return Ellipse(AffineMap2(self.linear, self.center + as_point(offset)))

    def same_as(self, other: "Ellipse", tol: float = 1e-12) -> bool:
        x = self.canonical()
        y = other.canonical()
        scale = max(1.0, abs(x[2]))
        if any(abs(p - q) > tol * scale for p, q in zip(x[:4], y[:4])):
            return False
        if x[2] - x[3] <= 1e-9 * x[2]:
            return True  # near-circular: the angle carries no information
        d = abs(x[4] - y[4])
        return min(d, math.pi - d) <= tol * 1e3


@dataclass(frozen=True)
class Disc:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if not self.radius > 0:
            raise InvalidArgument("disc radius must be positive")

    def enlarged(self, eps: float) -> "Disc":
        return Disc(self.center, (1.0 + eps) * self.radius)

    def as_ellipse(self) -> Ellipse:
        return Ellipse.disc(self.center, self.radius)


def enlarge(ellipse: Ellipse, lam: float) -> Ellipse:
    """Homothety of ``ellipse`` by ``lam`` about its own center."""
    if not lam > 0:
        raise InvalidArgument(f"enlargement factor must be positive, got {lam}")
    if lam == 1.0:
        return ellipse
    return Ellipse(AffineMap2(lam * ellipse.linear, ellipse.center))


def point_location(ellipse: Ellipse, p, tol: float = 1e-12) -> Location:
    if tol < 0:
        raise InvalidArgument("tol must be non-negative")
    rho = float(ellipse.normalized_radius(as_point(p)))
    if rho < 1.0 - tol:
        return Location.INTERIOR
    if rho > 1.0 + tol:
        return Location.EXTERIOR
    return Location.BOUNDARY


# -- contact function ------------------------------------------------------

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def contact_scale_batch(c1, s1, c2, s2, iterations: int = 64) -> np.ndarray:
    """Contact scale factor for many ellipse pairs at once.

    ``c*`` are (N, 2) centers and ``s*`` are (N, 2, 2) shape matrices.  The
    result is the common factor by which both ellipses of a pair must be
    scaled about their centers to touch: < 1 means overlapping interiors,
    exactly 1 tangency, > 1 disjoint.  It is the square root of the maximum
    over t in [0, 1] of

        t (1 - t) r^T [(1 - t) S1 + t S2]^-1 r,    r = c2 - c1,

    which is concave in t, so a golden-section search is reliable.
    """
    c1 = np.asarray(c1, dtype=float).reshape(-1, 2)
    c2 = np.asarray(c2, dtype=float).reshape(-1, 2)
    s1 = np.asarray(s1, dtype=float).reshape(-1, 2, 2)
    s2 = np.asarray(s2, dtype=float).reshape(-1, 2, 2)
    r = c2 - c1
    r0, r1 = r[:, 0], r[:, 1]

    def f(t):
        g = (1.0 - t)[:, None, None] * s1 + t[:, None, None] * s2
        det = g[:, 0, 0] * g[:, 1, 1] - g[:, 0, 1] * g[:, 1, 0]
        quad = (g[:, 1, 1] * r0 * r0 - (g[:, 0, 1] + g[:, 1, 0]) * r0 * r1 + g[:, 0, 0] * r1 * r1) / det
        return t * (1.0 - t) * quad

    n = len(r)
    lo = np.zeros(n)
    hi = np.ones(n)
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iterations):
        left = f1 < f2
        lo = np.where(left, x1, lo)
        hi = np.where(left, hi, x2)
        nx1 = np.where(left, x2, hi - _GOLDEN * (hi - lo))
        nx2 = np.where(left, lo + _GOLDEN * (hi - lo), x1)
        fn = f(np.where(left, nx2, nx1))
        f1, f2 = np.where(left, f2, fn), np.where(left, fn, f1)
        x1, x2 = nx1, nx2
    best = np.maximum(np.maximum(f1, f2), f(0.5 * (lo + hi)))
    return np.sqrt(np.maximum(best, 0.0))


def _canonical_pair(e1: Ellipse, e2: Ellipse) -> tuple[Ellipse, Ellipse]:
    return (e1, e2) if e1.canonical() <= e2.canonical() else (e2, e1)


def contact_scale(e1: Ellipse, e2: Ellipse) -> float:
    a, b = _canonical_pair(e1, e2)
    return float(contact_scale_batch(a.center, a.shape_matrix, b.center, b.shape_matrix)[0])


def classify_contact(scale, tol: float):
    if np.ndim(scale) == 0:
        if scale < 1.0 - tol:
            return Contact.OVERLAP
        if scale > 1.0 + tol:
            return Contact.DISJOINT
        return Contact.TANGENT
    return [classify_contact(float(s), tol) for s in scale]


def interiors_disjoint(e1: Ellipse, e2: Ellipse, tol: float = 1e-12) -> Contact:
    """Disjoint, tangent (closures meet, interiors do not) or overlapping."""
    return classify_contact(contact_scale(e1, e2), tol)


# -- distances to an ellipse boundary ---------------------------------------

def _root_bisect(r0: float, z0: float, z1: float, g: float) -> float:
    n0 = r0 * z0
    s0 = z1 - 1.0
    s1 = 0.0 if g < 0 else math.hypot(n0, z1) - 1.0
    s = 0.0
    for _ in range(1100):
        s = 0.5 * (s0 + s1)
        if s == s0 or s == s1:
            break
        ratio0 = n0 / (s + r0)
        ratio1 = z1 / (s + 1.0)
        g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0
        if g > 0:
            s0 = s
        elif g < 0:
            s1 = s
        else:
            break
    return s


def _distance_first_quadrant(e0: float, e1: float, y0: float, y1: float) -> float:
    # Axis-aligned ellipse with e0 >= e1 > 0 and a query point with y0, y1 >= 0.
    if y1 > 0:
        if y0 > 0:
            z0, z1 = y0 / e0, y1 / e1
            g = z0 * z0 + z1 * z1 - 1.0
            if g == 0:
                return 0.0
            r0 = (e0 / e1) ** 2
            sbar = _root_bisect(r0, z0, z1, g)
            x0 = r0 * y0 / (sbar + r0)
            x1 = y1 / (sbar + 1.0)
            return math.hypot(x0 - y0, x1 - y1)
        return abs(y1 - e1)
    numer0 = e0 * y0
    denom0 = e0 * e0 - e1 * e1
    if numer0 < denom0:
        xde0 = numer0 / denom0
        x0 = e0 * xde0
        x1 = e1 * math.sqrt(max(0.0, 1.0 - xde0 * xde0))
        return math.hypot(x0 - y0, x1)
    return abs(y0 - e0)


def signed_boundary_distance(ellipse: Ellipse, p) -> float:
    """Euclidean distance from ``p`` to the ellipse boundary, positive inside."""
    cx, cy, a, b, angle = ellipse.canonical()
    c, s = math.cos(angle), math.sin(angle)
    dx, dy = float(p[0]) - cx, float(p[1]) - cy
    x, y = abs(c * dx + s * dy), abs(-s * dx + c * dy)
    inside = (x / a) ** 2 + (y / b) ** 2 <= 1.0
    if a - b <= 1e-14 * a:
        d = abs(math.hypot(x, y) - a)
    else:
        d = _distance_first_quadrant(a, b, x, y)
    return d if inside else -d


def coverage_margin(enlarged: Ellipse, polygon: ConvexPolygon) -> float:
    """Largest rho such that the rho-neighbourhood of ``polygon`` lies in ``enlarged``.

    The distance to the boundary of a convex set is concave on that set, so
    its minimum over the polygon sits at a vertex; the result is therefore
    exact up to rounding.  A negative value means some vertex lies outside.
    """
    return min(signed_boundary_distance(enlarged, v) for v in polygon.vertices)


def segment_margin(enlarged: Ellipse, p, q) -> float:
    return min(signed_boundary_distance(enlarged, p), signed_boundary_distance(enlarged, q))


def rect_inside_ellipse(ellipse: Ellipse, rect, tol: float = 1e-12) -> bool:
    x0, y0, x1, y1 = rect
    corners = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    return bool(np.all(ellipse.normalized_radius(corners) < 1.0 - tol))


def ellipse_arrays(ellipses: Iterable[Ellipse]) -> tuple[np.ndarray, np.ndarray]:
    """Stack centers (N, 2) and linear parts (N, 2, 2) for vectorised work."""
    ells = list(ellipses)
    if not ells:
        return np.zeros((0, 2)), np.zeros((0, 2, 2))
    centers = np.array([e.center for e in ells])
    linears = np.array([e.linear for e in ells])
    return centers, linears


def canonical_arrays(linears) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised semi-major, semi-minor and angle in [0, pi) for (N, 2, 2) maps."""
    lin = np.asarray(linears, dtype=float).reshape(-1, 2, 2)
    if not len(lin):
        return np.zeros(0), np.zeros(0), np.zeros(0)
    u, s, _ = np.linalg.svd(lin)
    a, b = s[:, 0], s[:, 1]
    angle = np.arctan2(u[:, 1, 0], u[:, 0, 0]) % math.pi
    angle = np.where((a - b <= 1e-12 * a) | (angle >= math.pi - 1e-15), 0.0, angle)
    return a, b, angle


def maps_from_axes(semi_axes, angles) -> np.ndarray:
    """Linear parts (N, 2, 2) of ellipses given by semi-axes and angles."""
    ax = np.asarray(semi_axes, dtype=float).reshape(-1, 2)
    t = np.asarray(angles, dtype=float).reshape(-1)
    c, s = np.cos(t), np.sin(t)
    out = np.empty((len(t), 2, 2))
    out[:, 0, 0] = c * ax[:, 0]
    out[:, 0, 1] = -s * ax[:, 1]
    out[:, 1, 0] = s * ax[:, 0]
    out[:, 1, 1] = c * ax[:, 1]
    return out
