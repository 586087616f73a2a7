"""Periodic ellipse packing of the plane whose enlargement covers it.

Each upward triangle of the unit equilateral lattice receives an initial
tile.  The rest of the triangle is fanned into 2n - 2 triangles, each with
one full edge on that tile.  The enlarged initial ellipse covers a
neighbourhood of those edges, so every fan triangle only needs tiling down
to a thin strip above its tile edge.  Downward triangles are the half-turn
image of the upward pattern.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BudgetExceeded, CertificationError, ConfigurationError, InvalidArgument
from .geometry import (
    AffineMap2,
    Ellipse,
    Triangle,
    canonical_arrays,
    coverage_margin,
    enlarge,
    maps_from_axes,
    segment_margin,
)
from .inscription import ProperTile, RegularGonSpec, choose_n, circumradius, properly_inscribe, reference_polygon
from .tiler import predicted_tile_count, tile_until

FORMAT = "ringcover-packing"
VERSION = 1
DELTA_POLICIES = ("auto", "fixed", "cover")
MAX_RETRIES = 6


@dataclass(frozen=True)
class PackingConfig:
    """Construction parameters.

    ``delta_policy``:
      * ``auto``: each fan triangle is tiled down to half the coverage
        margin of its tile edge inside the enlarged initial ellipse;
      * ``fixed``: every fan triangle uses ``delta``;
      * ``cover``: as ``auto``, but triangles already inside the enlarged
        initial ellipse are not tiled further (far fewer tiles).
    """

    lam: float
    n_override: int | None = None
    delta_policy: str = "auto"
    delta: float | None = None
    triangle_side: float = 1.0
    max_tiles: int | None = None

    def __post_init__(self):
        if not (isinstance(self.lam, (int, float)) and math.isfinite(self.lam) and self.lam > 1.0):
            raise InvalidArgument(f"lambda must be a finite number > 1, got {self.lam!r}")
        if self.delta_policy not in DELTA_POLICIES:
            raise InvalidArgument(f"delta_policy must be one of {DELTA_POLICIES}")
        if self.delta_policy == "fixed":
            if self.delta is None or not self.delta > 0:
                raise InvalidArgument("the fixed policy needs a positive delta")
        elif self.delta is not None:
            raise InvalidArgument("delta is only used with the fixed policy")
        if self.n_override is not None:
            if int(self.n_override) != self.n_override or self.n_override < 2:
                raise InvalidArgument("n_override must be an integer >= 2")
            if not circumradius(self.n_override) < self.lam:
                raise ConfigurationError(
                    f"the 2n-gon for n={self.n_override} does not fit in the "
                    f"{self.lam}-enlarged disc")
        if not self.triangle_side > 0:
            raise InvalidArgument("triangle_side must be positive")

    @property
    def n(self) -> int:
        return int(self.n_override) if self.n_override is not None else choose_n(self.lam)


def lattice_basis(side: float = 1.0) -> np.ndarray:
    return side * np.array([[1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])


def upward_triangle(side: float = 1.0) -> Triangle:
    u, v = lattice_basis(side)
    return Triangle.with_base((0.0, 0.0), tuple(u), tuple(v))


def half_turn(side: float = 1.0) -> AffineMap2:
    """Half-turn about the midpoint of the upward triangle's right side."""
    u, v = lattice_basis(side)
    return AffineMap2(-np.eye(2), u + v)


def fan_pockets(tri: Triangle, initial: ProperTile, spec: RegularGonSpec) -> list[Triangle]:
    """Fan triangulation of ``tri`` minus its initial tile.

    Each tile edge facing the base is joined to the base endpoint on its
    side; that edge becomes the designated base of the fan triangle.
    """
    left, right = tri.base
    v = initial.polygon.vertices
    n = spec.n
    out = []
    for j in range(1, 2 * n - 1):
        corner = left if j < n else right
        # Polygon order is counterclockwise, so the outside lies to the right
        # of v[j] -> v[j+1]; reversing the edge puts the corner on the left.
        p, q = v[(j + 1) % (2 * n)], v[j]
        out.append(Triangle.with_base(tuple(p), tuple(q), corner))
    return out


def choose_delta(tile: ProperTile, lam: float) -> float:
    """Half the distance from the tile to the boundary of its enlarged ellipse."""
    margin = coverage_margin(enlarge(tile.ellipse, lam), tile.polygon)
    if not margin > 0:
        raise ConfigurationError(f"enlargement {lam} leaves no margin around the tile; n is too small")
    return 0.5 * margin


@dataclass
class PocketRecord:
    index: int
    delta: float
    retries: int
    tiles: int
    residual: int


@dataclass
class PeriodicPacking:
    """Ellipses of one fundamental cell (upward plus downward triangle)."""

    lam: float
    n: int
    lattice: np.ndarray
    centers: np.ndarray
    linears: np.ndarray
    provenance: list
    stats: dict = field(default_factory=dict)
    pockets: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.centers)

    @property
    def ellipses(self) -> list[Ellipse]:
        return [Ellipse(AffineMap2(m, c)) for c, m in zip(self.centers, self.linears)]

    def translates(self, radius: int = 1) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Centers, linear parts and lattice offsets of the cell and its neighbours.

        ``radius = 1`` gives the cell plus its 8 surrounding translates.
        """
        cs, ls, offs = [], [], []
        u, v = self.lattice
        for i in range(-radius, radius + 1):
            for j in range(-radius, radius + 1):
                shift = i * u + j * v
                cs.append(self.centers + shift)
                ls.append(self.linears)
                offs.append(np.repeat([[i, j]], len(self.centers), axis=0))
        return np.concatenate(cs), np.concatenate(ls), np.concatenate(offs)

    def summary(self) -> dict:
        a, b, _ = canonical_arrays(self.linears)
        return {
            "lambda": self.lam,
            "n": self.n,
            "ellipse_count": len(self),
            "min_width": float(2 * b.min()) if len(b) else 0.0,
            "max_diameter": float(2 * a.max()) if len(a) else 0.0,
            **self.stats,
        }

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        a, b, ang = canonical_arrays(self.linears)
        ellipses = [
            {"center": [float(c[0]), float(c[1])], "semi_axes": [float(x), float(y)],
             "angle": float(t), "provenance": p}
            for c, x, y, t, p in zip(self.centers, a, b, ang, self.provenance)
        ]
        return {
            "format": FORMAT,
            "version": VERSION,
            "lambda": self.lam,
            "n": self.n,
            "lattice": self.lattice.tolist(),
            "stats": self.stats,
            "ellipses": ellipses,
        }

    def save(self, path) -> None:
        # json writes floats with repr, i.e. round-trip exact (17 significant digits).
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def from_dict(cls, data: dict) -> "PeriodicPacking":
        if data.get("format") != FORMAT:
            raise InvalidArgument("not a packing file")
        if data.get("version") != VERSION:
            raise InvalidArgument(f"unsupported packing file version {data.get('version')!r}")
        ells = data["ellipses"]
        centers = np.array([e["center"] for e in ells], dtype=float).reshape(-1, 2)
        axes = np.array([e["semi_axes"] for e in ells], dtype=float).reshape(-1, 2)
        angles = np.array([e["angle"] for e in ells], dtype=float)
        return cls(
            lam=float(data["lambda"]),
            n=int(data["n"]),
            lattice=np.array(data["lattice"], dtype=float),
            centers=centers,
            linears=maps_from_axes(axes, angles),
            provenance=[e.get("provenance", "") for e in ells],
            stats=dict(data.get("stats", {})),
        )

    @classmethod
    def load(cls, path) -> "PeriodicPacking":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _residual_inside(residual: np.ndarray, cover: Ellipse) -> bool:
    if not len(residual):
        return True
    pts = residual.reshape(-1, 2)
    return bool(np.all(cover.normalized_radius(pts) <= 1.0))


def build_cell(cfg: PackingConfig, time_budget: float | None = None) -> PeriodicPacking:
    """Construct the fundamental cell for ``cfg``.

    Every leftover triangle of every fan triangle is checked to lie inside
    the enlarged initial ellipse; on failure that fan triangle is redone
    with half the strip height, at most six times.
    """
    start = time.perf_counter()
    spec = reference_polygon(cfg.n)
    tri = upward_triangle(cfg.triangle_side)
    initial = properly_inscribe(tri, spec)
    cover = enlarge(initial.ellipse, cfg.lam)
    base_delta = choose_delta(initial, cfg.lam) if cfg.delta_policy != "fixed" else cfg.delta

    centers = [initial.ellipse.center[None, :]]
    linears = [initial.ellipse.linear[None, :, :]]
    provenance = ["up/initial"]
    records = []
    placed = 1
    for k, pocket in enumerate(fan_pockets(tri, initial, spec)):
        if cfg.delta_policy == "fixed":
            delta = base_delta
        else:
            p, q = pocket.base
            delta = max(base_delta, 0.5 * segment_margin(cover, p, q))
        retries = 0
        while True:
            remaining = None if time_budget is None else time_budget - (time.perf_counter() - start)
            if remaining is not None and remaining <= 0:
                raise BudgetExceeded(f"time budget of {time_budget:.1f} s exhausted", placed,
                                     time.perf_counter() - start)
            budget = None if cfg.max_tiles is None else cfg.max_tiles - placed
            try:
                res = tile_until(pocket, delta, spec,
                                 cover=cover if cfg.delta_policy == "cover" else None,
                                 max_tiles=budget, time_budget=remaining)
            except BudgetExceeded as exc:
                raise BudgetExceeded(f"{exc} (fan triangle {k})", placed + exc.tiles_placed,
                                     time.perf_counter() - start) from None
            if _residual_inside(res.residual_arrays, cover):
                break
            retries += 1
            if retries > MAX_RETRIES:
                raise CertificationError(
                    f"fan triangle {k}: leftover strip not covered after {MAX_RETRIES} halvings")
            delta *= 0.5
        placed += res.count
        centers.append(res.translation)
        linears.append(res.linear)
        provenance.extend(f"up/fan{k}/tile{i}" for i in range(res.count))
        records.append(PocketRecord(k, float(delta), retries, res.count, len(res.residual_arrays)))

    up_c = np.concatenate(centers)
    up_l = np.concatenate(linears)
    turn = half_turn(cfg.triangle_side)
    down_c = up_c @ turn.linear.T + turn.translation
    down_l = np.einsum("ij,njk->nik", turn.linear, up_l)
    prov = provenance + ["down/" + p[3:] for p in provenance]
    stats = {
        "delta_policy": cfg.delta_policy,
        "tiles_per_triangle": int(len(up_c)),
        "retries": int(sum(r.retries for r in records)),
        "min_delta": float(min(r.delta for r in records)),
    }
    return PeriodicPacking(
        lam=float(cfg.lam),
        n=cfg.n,
        lattice=lattice_basis(cfg.triangle_side),
        centers=np.concatenate([up_c, down_c]),
        linears=np.concatenate([up_l, down_l]),
        provenance=prov,
        stats=stats,
        pockets=records,
    )


def estimate_tiles(cfg: PackingConfig, cap: int = 10**15) -> int | None:
    """Exact tiles per triangle for the ``auto`` and ``fixed`` policies, before any retry.

    Returns None for the ``cover`` policy, whose count depends on geometry.
    """
    if cfg.delta_policy == "cover":
        return None
    spec = reference_polygon(cfg.n)
    tri = upward_triangle(cfg.triangle_side)
    initial = properly_inscribe(tri, spec)
    cover = enlarge(initial.ellipse, cfg.lam)
    base_delta = choose_delta(initial, cfg.lam) if cfg.delta_policy != "fixed" else cfg.delta
    total = 1
    for pocket in fan_pockets(tri, initial, spec):
        delta = base_delta
        if cfg.delta_policy == "auto":
            delta = max(base_delta, 0.5 * segment_margin(cover, *pocket.base))
        total += predicted_tile_count(spec.n, pocket.height / delta, cap)
    return min(total, cap)


__all__ = [
    "PackingConfig",
    "PeriodicPacking",
    "build_cell",
    "choose_delta",
    "estimate_tiles",
    "fan_pockets",
    "half_turn",
    "lattice_basis",
    "upward_triangle",
]
