"""Disc packings: container, file format, seeded generator and a brute-force probe."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import InvalidArgument

FORMAT = "ringcover-discs"


@dataclass
class DiscPacking:
    centers: np.ndarray
    radii: np.ndarray
    eps: float = 1e-5

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=float).reshape(-1, 2)
        self.radii = np.asarray(self.radii, dtype=float).reshape(-1)
        if len(self.centers) != len(self.radii):
            raise InvalidArgument("centers and radii differ in length")
        if not (np.all(np.isfinite(self.centers)) and np.all(np.isfinite(self.radii))):
            raise InvalidArgument("non-finite disc data")
        if np.any(self.radii <= 0) or np.any(self.radii > 1):
            raise InvalidArgument("disc radii must lie in (0, 1]")
        if not self.eps > 0:
            raise InvalidArgument("eps must be positive")

    def __len__(self) -> int:
        return len(self.radii)

    def overlapping_pairs(self, tol: float = 1e-12) -> list[tuple[int, int]]:
        c, r = self.centers, self.radii
        out = []
        for i in range(len(r) - 1):
            d = np.hypot(*(c[i + 1:] - c[i]).T)
            bad = np.flatnonzero(d < r[i] + r[i + 1:] - tol)
            out.extend((i, i + 1 + int(j)) for j in bad)
        return out

    def validate(self, tol: float = 1e-12) -> None:
        bad = self.overlapping_pairs(tol)
        if bad:
            raise InvalidArgument(f"discs {bad[0]} overlap ({len(bad)} overlapping pairs)")

    def uncovered(self, pts, eps: float | None = None) -> np.ndarray:
        """Mask of points outside every (1 + eps)-enlarged disc."""
        eps = self.eps if eps is None else eps
        p = np.asarray(pts, dtype=float).reshape(-1, 2)
        out = np.ones(len(p), dtype=bool)
        for lo in range(0, len(p), 4096):
            d = np.linalg.norm(p[lo:lo + 4096, None, :] - self.centers[None], axis=2)
            out[lo:lo + 4096] = np.all(d > (1 + eps) * self.radii, axis=1)
        return out

    def density(self, region, step: float = 0.02) -> float:
        """Fraction of ``region`` covered by the discs, on a grid."""
        x0, y0, x1, y1 = region
        xs = np.arange(x0 + step / 2, x1, step)
        ys = np.arange(y0 + step / 2, y1, step)
        gx, gy = np.meshgrid(xs, ys)
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        return float(1.0 - self.uncovered(pts, eps=0.0).mean())

    def to_dict(self) -> dict:
        return {"format": FORMAT, "eps": self.eps,
                "discs": [{"c": [float(x), float(y)], "r": float(r)}
                          for (x, y), r in zip(self.centers, self.radii)]}

    @classmethod
    def from_dict(cls, data: dict) -> "DiscPacking":
        try:
            discs = data["discs"]
            centers = [d["c"] for d in discs]
            radii = [d["r"] for d in discs]
            eps = float(data.get("eps", 1e-5))
        except (KeyError, TypeError) as exc:
            raise InvalidArgument(f"malformed disc packing: {exc}") from None
        packing = cls(np.array(centers, dtype=float).reshape(-1, 2), np.array(radii, dtype=float), eps)
        packing.validate()
        return packing

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "DiscPacking":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidArgument(f"{path}: not JSON ({exc})") from None
        return cls.from_dict(data)


def random_greedy_packing(seed: int, region=(-3.0, -3.0, 3.0, 3.0), radius_range=(0.05, 1.0),
                          max_failures: int = 1000, eps: float = 1e-5, batch: int = 512) -> DiscPacking:
    """Random sequential packing: candidates (center uniform in ``region``,
    radius uniform in ``radius_range``) are kept when disjoint from every kept
    disc, until ``max_failures`` consecutive rejections."""
    lo_r, hi_r = radius_range
    if not (0 < lo_r <= hi_r <= 1):
        raise InvalidArgument("radius_range must satisfy 0 < lo <= hi <= 1")
    x0, y0, x1, y1 = region
    if not (x1 > x0 and y1 > y0):
        raise InvalidArgument("region must have positive width and height")
    rng = np.random.Generator(np.random.Philox(seed))
    centers = np.zeros((0, 2))
    radii = np.zeros(0)
    failures = 0
    while failures < max_failures:
        pts = np.column_stack([rng.uniform(x0, x1, batch), rng.uniform(y0, y1, batch)])
        rad = rng.uniform(lo_r, hi_r, batch)
        if len(radii):
            d = np.linalg.norm(pts[:, None, :] - centers[None], axis=2)
            clash = np.any(d < rad[:, None] + radii[None, :], axis=1)
        else:
            clash = np.zeros(batch, dtype=bool)
        new_c, new_r = [], []
        last = -1
        stop = False
        # Walk the candidates in order; runs of clashing ones only add to the
        # failure count.
        for k in np.flatnonzero(~clash):
            failures += k - last - 1
            if failures >= max_failures:
                stop = True
                break
            last = k
            ok = True
            for c, r in zip(new_c, new_r):
                if np.hypot(*(pts[k] - c)) < rad[k] + r:
                    ok = False
                    break
            if ok:
                new_c.append(pts[k])
                new_r.append(rad[k])
                failures = 0
            else:
                failures += 1
                if failures >= max_failures:
                    stop = True
                    break
        if not stop:
            failures += batch - 1 - last
        if new_c:
            centers = np.concatenate([centers, np.array(new_c)])
            radii = np.concatenate([radii, np.array(new_r)])
    return DiscPacking(centers, radii, eps)


def brute_force_uncovered(packing: DiscPacking, region, grid_step: float, eps: float | None = None):
    """Grid point of ``region`` outside every enlarged disc, nearest the region's center; or None."""
    if not grid_step > 0:
        raise InvalidArgument("grid_step must be positive")
    x0, y0, x1, y1 = region
    mid = np.array([(x0 + x1) / 2, (y0 + y1) / 2])
    if not len(packing):
        return mid
    xs = np.arange(x0, x1 + 0.5 * grid_step, grid_step)
    ys = np.arange(y0, y1 + 0.5 * grid_step, grid_step)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    free = pts[packing.uncovered(pts, eps)]
    if not len(free):
        return None
    d = np.hypot(*(free - mid).T)
    return free[int(np.argmin(d))]


__all__ = ["DiscPacking", "brute_force_uncovered", "random_greedy_packing"]
