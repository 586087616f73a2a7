"""Probe regions of the disc chase and the bite relation.

A disc C bites into X when its (1 + eps)-enlargement meets X.  For every
region type the test reduces to ``dist(center, X) <= (1 + eps) * radius``
with an exact point-to-region distance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def wrap_angle(t):
    """Angle difference folded into (-pi, pi]."""
    return -((-np.asarray(t, dtype=float) + math.pi) % (2 * math.pi) - math.pi)


@dataclass(frozen=True)
class Square:
    """Square of side ``side`` centred at ``center``, rotated by ``angle``.

    As a chase region its scale is ``side / 4``.
    """

    center: tuple
    side: float
    angle: float = 0.0

    kind = "square"

    @property
    def scale(self) -> float:
        return self.side / 4.0

    def _local(self, pts):
        p = np.asarray(pts, dtype=float) - np.asarray(self.center)
        c, s = math.cos(self.angle), math.sin(self.angle)
        x = c * p[..., 0] + s * p[..., 1]
        y = -s * p[..., 0] + c * p[..., 1]
        return x, y

    def distance(self, pts) -> np.ndarray:
        x, y = self._local(pts)
        h = 0.5 * self.side
        return np.hypot(np.maximum(np.abs(x) - h, 0.0), np.maximum(np.abs(y) - h, 0.0))

    def contains(self, pts, tol: float = 0.0) -> np.ndarray:
        x, y = self._local(pts)
        h = 0.5 * self.side + tol
        return (np.abs(x) <= h) & (np.abs(y) <= h)

    def boundary_sample(self, count: int = 64) -> np.ndarray:
        h = 0.5 * self.side
        t = np.linspace(0.0, 4.0, count, endpoint=False)
        side = np.floor(t).astype(int)
        f = t - side
        local = np.empty((count, 2))
        starts = np.array([[-h, -h], [h, -h], [h, h], [-h, h]])
        dirs = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]]) * self.side
        local[:] = starts[side] + f[:, None] * dirs[side]
        c, s = math.cos(self.angle), math.sin(self.angle)
        rot = np.array([[c, -s], [s, c]])
        return local @ rot.T + np.asarray(self.center)

    def interior_point(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)

    def to_dict(self) -> dict:
        return {"kind": "square", "center": list(map(float, self.center)), "side": self.side,
                "angle": self.angle}


@dataclass(frozen=True)
class AnnularSector:
    """Points at distance [r_in, r_out] from ``center`` within ``half`` of direction ``axis``.

    ``half`` must not exceed pi / 2.
    """

    center: tuple
    r_in: float
    r_out: float
    axis: float
    half: float

    kind = "sector"

    @property
    def scale(self) -> float:
        return self.r_in

    def _polar(self, pts):
        p = np.asarray(pts, dtype=float) - np.asarray(self.center)
        rho = np.hypot(p[..., 0], p[..., 1])
        ang = wrap_angle(np.arctan2(p[..., 1], p[..., 0]) - self.axis)
        return rho, ang

    def distance(self, pts) -> np.ndarray:
        rho, ang = self._polar(pts)
        radial = np.maximum(np.maximum(self.r_in - rho, rho - self.r_out), 0.0)
        inside_wedge = np.abs(ang) <= self.half
        # Outside the wedge the nearest point lies on the nearer radial edge.
        side = np.where(ang >= 0, self.half, -self.half) + self.axis
        u = np.stack([np.cos(side), np.sin(side)], axis=-1)
        p = np.asarray(pts, dtype=float) - np.asarray(self.center)
        t = np.clip(np.sum(p * u, axis=-1), self.r_in, self.r_out)
        edge = np.hypot(p[..., 0] - t * u[..., 0], p[..., 1] - t * u[..., 1])
        return np.where(inside_wedge, radial, edge)

    def contains(self, pts, tol: float = 0.0) -> np.ndarray:
        rho, ang = self._polar(pts)
        ok = (rho >= self.r_in - tol) & (rho <= self.r_out + tol)
        # Angular slack converted from length at the outer radius.
        return ok & (np.abs(ang) <= self.half + tol / max(self.r_in, 1e-300))

    def point(self, radius: float, offset: float) -> np.ndarray:
        """Point at ``radius`` from the center, ``offset`` radians from the axis."""
        t = self.axis + offset
        return np.asarray(self.center, dtype=float) + radius * np.array([math.cos(t), math.sin(t)])

    def boundary_sample(self, count: int = 64) -> np.ndarray:
        q = count // 4
        ts = np.linspace(-self.half, self.half, q + 1)
        outer = [self.point(self.r_out, t) for t in ts[:-1]]
        rs = np.linspace(self.r_out, self.r_in, q + 1)
        right = [self.point(r, self.half) for r in rs[:-1]]
        inner = [self.point(self.r_in, t) for t in ts[::-1][:-1]]
        left = [self.point(r, -self.half) for r in rs[::-1][:-1]]
        pts = np.array(outer + right + inner + left)
        return pts[:count]

    def interior_point(self) -> np.ndarray:
        return self.point(0.5 * (self.r_in + self.r_out), 0.0)

    def to_dict(self) -> dict:
        return {"kind": "sector", "center": list(map(float, self.center)), "r_in": self.r_in,
                "r_out": self.r_out, "axis": self.axis, "half": self.half}


@dataclass(frozen=True)
class Crescent:
    """Crescent of disc ``disc_index``: angle ``alpha`` at its center within its beta-ring."""

    disc_index: int
    center: tuple
    radius: float
    axis: float
    alpha: float
    beta: float

    kind = "crescent"

    @property
    def scale(self) -> float:
        return self.radius

    @property
    def sector(self) -> AnnularSector:
        return AnnularSector(self.center, self.radius, (1.0 + self.beta) * self.radius,
                             self.axis, 0.5 * self.alpha)

    def distance(self, pts):
        return self.sector.distance(pts)

    def contains(self, pts, tol: float = 0.0):
        return self.sector.contains(pts, tol)

    def boundary_sample(self, count: int = 64):
        return self.sector.boundary_sample(count)

    def interior_point(self):
        return self.sector.interior_point()

    def to_dict(self) -> dict:
        return {"kind": "crescent", "disc": self.disc_index, "center": list(map(float, self.center)),
                "radius": self.radius, "axis": self.axis, "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class DiscProbe:
    """Closed disc used as a probe set (the D of the square step)."""

    center: tuple
    radius: float

    kind = "disc"

    def distance(self, pts) -> np.ndarray:
        p = np.asarray(pts, dtype=float) - np.asarray(self.center)
        return np.maximum(np.hypot(p[..., 0], p[..., 1]) - self.radius, 0.0)

    def contains(self, pts, tol: float = 0.0) -> np.ndarray:
        p = np.asarray(pts, dtype=float) - np.asarray(self.center)
        return np.hypot(p[..., 0], p[..., 1]) <= self.radius + tol

    def interior_point(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray

    kind = "points"

    def distance(self, pts) -> np.ndarray:
        p = np.asarray(pts, dtype=float).reshape(-1, 2)
        diff = p[:, None, :] - np.asarray(self.points, dtype=float).reshape(-1, 2)[None, :, :]
        return np.linalg.norm(diff, axis=-1).min(axis=1)


def bite_mask(centers, radii, region, eps: float) -> np.ndarray:
    """Which discs bite into ``region`` (their enlargement meets it)."""
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    radii = np.asarray(radii, dtype=float).reshape(-1)
    if not len(radii):
        return np.zeros(0, dtype=bool)
    return region.distance(centers) <= (1.0 + eps) * radii


def bites(disc, region, eps: float) -> bool:
    """Single-disc form: ``disc`` has ``center`` and ``radius``; ``region`` may be a point."""
    if not hasattr(region, "distance"):
        region = PointSet(np.asarray(region, dtype=float).reshape(-1, 2))
    return bool(bite_mask([disc.center], [disc.radius], region, eps)[0])


__all__ = [
    "AnnularSector",
    "Crescent",
    "DiscProbe",
    "PointSet",
    "Square",
    "bite_mask",
    "bites",
    "wrap_angle",
]
