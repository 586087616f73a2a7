"""Chase for an uncovered point: square and crescent probe regions, refined step by step.

Each region carries a scale r_k.  Before every step the runtime checks that
no disc larger than r_k bites into the region; each new region is checked to
sit inside the previous one, and scales must halve at least every two steps.
The chase stops at the first probe set no eligible disc bites into and
returns a point of it, which is then checked against every disc.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConstantsInfeasible, InvalidArgument, InvariantViolation
from .constants import Constants, arc_halfwidth, calibrate
from .generators import DiscPacking
from .regions import AnnularSector, Crescent, DiscProbe, Square, bite_mask, wrap_angle

LABELS = ("square_a", "square_b", "crescent_1", "crescent_2", "crescent_3")
NEST_TOL = 1e-9
SCALE_TOL = 1e-12
TURN_STEPS = 9
MAX_WINDOWS = 8


@dataclass
class ChaseStep:
    label: str
    region: object
    scale: float
    biter: int | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"label": self.label, "scale": self.scale, "biter": self.biter,
                "region": self.region.to_dict(), "detail": self.detail}


@dataclass
class ChaseTrace:
    start: Square
    steps: list = field(default_factory=list)
    result: np.ndarray | None = None
    final_probe: str = ""
    diagnostic: str = ""

    @property
    def regions(self) -> list:
        return [self.start] + [s.region for s in self.steps]

    @property
    def scales(self) -> list[float]:
        return [self.start.scale] + [s.scale for s in self.steps]

    @property
    def case_labels(self) -> list[str]:
        return [s.label for s in self.steps]

    def shrinks(self) -> bool:
        r = self.scales
        return all(r[k + 2] <= 0.5 * r[k] * (1 + SCALE_TOL) for k in range(len(r) - 2))

    def to_dict(self) -> dict:
        return {
            "start": self.start.to_dict(),
            "steps": [s.to_dict() for s in self.steps],
            "result": None if self.result is None else [float(v) for v in self.result],
            "final_probe": self.final_probe,
            "diagnostic": self.diagnostic,
        }


@dataclass
class _Found:
    point: np.ndarray
    probe: str


# -- helpers ------------------------------------------------------------------

def _largest(mask: np.ndarray, radii: np.ndarray) -> int | None:
    idx = np.flatnonzero(mask)
    if not len(idx):
        return None
    # Largest radius, lowest index on ties.
    return int(idx[np.argmax(radii[idx])])


def check_hypothesis(region, scale: float, packing: DiscPacking) -> None:
    """No disc with radius above ``scale`` may bite into ``region``."""
    big = packing.radii > scale * (1 + SCALE_TOL)
    if not np.any(big):
        return
    idx = np.flatnonzero(big)
    hit = bite_mask(packing.centers[idx], packing.radii[idx], region, packing.eps)
    if np.any(hit):
        j = int(idx[np.flatnonzero(hit)[0]])
        raise InvariantViolation(
            f"disc {j} (radius {packing.radii[j]:.6g}) bites into a {region.kind} region of scale {scale:.6g}")


def check_nested(inner, outer) -> None:
    pts = inner.boundary_sample(64)
    tol = NEST_TOL * max(outer.scale, 1e-300)
    inside = outer.contains(pts, tol)
    if not np.all(inside):
        k = int(np.flatnonzero(~inside)[0])
        raise InvariantViolation(f"{inner.kind} region leaves its parent {outer.kind} at {pts[k].tolist()}")


def _crescent_corners(cr: Crescent) -> dict:
    s = cr.sector
    return {
        "u": [s.point(s.r_in, -s.half).tolist(), s.point(s.r_in, s.half).tolist()],
        "v": [s.point(s.r_out, -s.half).tolist(), s.point(s.r_out, s.half).tolist()],
    }


def _check_corners(new: Crescent, parent_center, parent_radius: float, parent_axis: float,
                   consts: Constants) -> dict:
    """The corner bounds of a crescent grown from a smaller disc near C_n.

    u (inner corners) must be outside C_n's eps-enlargement, v and w (outer
    corners) inside its beta-ring and within its angle alpha.
    """
    c = np.asarray(parent_center, dtype=float)
    corners = _crescent_corners(new)
    du = [math.dist(p, c) / parent_radius for p in corners["u"]]
    dv = [math.dist(p, c) / parent_radius for p in corners["v"]]
    ang = [abs(float(wrap_angle(math.atan2(p[1] - c[1], p[0] - c[0]) - parent_axis)))
           for p in corners["u"] + corners["v"]]
    if min(du) <= 1 + consts.eps:
        raise InvariantViolation(f"inner corner u at relative distance {min(du):.8f} within the eps-ring")
    if max(dv) >= 1 + consts.beta:
        raise InvariantViolation(f"outer corner v at relative distance {max(dv):.6f} beyond the beta-ring")
    if max(ang) > consts.alpha / 2 + NEST_TOL:
        raise InvariantViolation(f"corner w at angle {max(ang):.6f} outside the crescent angle")
    return {"cn_u": min(du), "cn_v": max(dv), "angle_w": max(ang)}


# -- steps --------------------------------------------------------------------

def square_step(region: Square, packing: DiscPacking, consts: Constants):
    """One step from a square region: an uncovered point, a half-size square, or a crescent."""
    scale = region.scale
    check_hypothesis(region, scale, packing)
    q = np.asarray(region.center, dtype=float)
    probe = DiscProbe(tuple(q), 1.5 * scale)
    j = _largest(bite_mask(packing.centers, packing.radii, probe, packing.eps), packing.radii)
    if j is None:
        return _Found(q, "disc D")
    r = float(packing.radii[j])
    if r <= 0.5 * scale:
        new = Square(tuple(q), 2.0 * scale, region.angle)
        return ChaseStep("square_a", new, 0.5 * scale, j, {"biter_radius": r})
    c = packing.centers[j]
    d = q - c
    axis = 0.0 if np.hypot(*d) == 0.0 else math.atan2(d[1], d[0])
    new = Crescent(j, tuple(map(float, c)), r, axis, consts.alpha, consts.beta)
    return ChaseStep("square_b", new, r, j, {"biter_radius": r})


def _case_two(cn, rho, axis, j, packing, consts):
    """Candidate crescents of the biter j, best first.

    The first has its axis 5/2 alpha off the direction from the biter's center
    to c_n, on the probe-axis side of line c_n c.  When the biter sits near
    the edge of the angle that crescent can stick out sideways, so larger
    turns toward the axis follow, then the mirrored side.
    """
    c = packing.centers[j]
    r = float(packing.radii[j])
    w = c - cn
    phi0 = math.atan2(-w[1], -w[0])
    ax = np.array([math.cos(axis), math.sin(axis)])
    side = np.sign(w[0] * ax[1] - w[1] * ax[0]) or 1.0
    # The turn direction whose axis lands on the probe-axis side.
    t = phi0 + 2.5 * consts.alpha
    d = np.array([math.cos(t), math.sin(t)])
    sigma = 1.0 if np.sign(w[0] * d[1] - w[1] * d[0]) == side else -1.0
    turns = [2.5 * consts.alpha + k * consts.alpha / 4 for k in range(TURN_STEPS)]
    out = []
    for sg in (sigma, -sigma):
        for turn in turns:
            a = float(wrap_angle(phi0 + sg * turn))
            out.append((Crescent(j, tuple(map(float, c)), r, a, consts.alpha, consts.beta), turn / consts.alpha))
    return out


def _footprint(cn, outer, axis, center, radius, eps):
    """Angular interval (relative to ``axis``) of the band covered by a disc's enlargement.

    The disc lies outside C_n, so its widest reach is at the outer radius.
    """
    d = float(np.hypot(*(center - cn)))
    h = arc_halfwidth(outer, d, (1 + eps) * radius)
    mid = float(wrap_angle(math.atan2(center[1] - cn[1], center[0] - cn[0]) - axis))
    return mid - h, mid + h


def _window(probe: AnnularSector, region: Crescent, cn, j, packing, length=None):
    """Sub-sector of ``probe`` beside disc j's footprint, on its longer free side.

    ``length`` fixes the window's angular length; by default the whole free
    side is used.  Returns the window and the free length.
    """
    lo, hi = _footprint(cn, probe.r_out, probe.axis, packing.centers[j], packing.radii[j], packing.eps)
    half = probe.half
    left = max(0.0, min(half, lo) + half)
    right = max(0.0, half - max(-half, hi))
    # Longer side; on a tie the side whose inner end is nearer the parent's axis.
    to_axis = float(wrap_angle(region.axis - probe.axis))
    if left > right or (left == right and to_axis < 0):
        end = min(half, lo)
        span = (end - (left if length is None else length), end)
        free = left
    else:
        start = max(-half, hi)
        span = (start, start + (right if length is None else length))
        free = right
    mid = 0.5 * (span[0] + span[1])
    window = AnnularSector(tuple(cn), probe.r_in, probe.r_out, float(probe.axis + mid),
                           0.5 * (span[1] - span[0]))
    return window, free, span


def _case_one(cn, rho, probe, consts):
    side = consts.sq_side_factor * rho
    margin = 0.5 * (consts.ring_frac - consts.eps - consts.sq_side_factor) * rho
    radial = (1 + consts.ring_frac) * rho - margin - 0.5 * side
    center = cn + radial * np.array([math.cos(probe.axis), math.sin(probe.axis)])
    return Square(tuple(map(float, center)), side, probe.axis)


def crescent_step(region: Crescent, packing: DiscPacking, consts: Constants):
    """One step from a crescent region of C_n, in the three cases of the biter's size.

    The probe starts as the band I next to C_n.  A biter larger than r_big
    moves the probe to a window of length arc_prime beside it (this happens at
    most once); a mid-size biter whose crescent cannot be placed inside the
    parent moves it to the free side of I next to that biter.
    """
    if not consts.calibrated:
        raise InvalidArgument("constants must be calibrated (arc_prime, r_prime_max)")
    check_hypothesis(region, region.radius, packing)
    cn = np.asarray(region.center, dtype=float)
    rho = region.radius
    outer = (1 + consts.ring_frac) * rho
    probe = AnnularSector(tuple(cn), rho, outer, region.axis, 0.5 * consts.alpha)
    exclude = {region.disc_index}
    windows = []
    large = False
    for _ in range(MAX_WINDOWS):
        mask = bite_mask(packing.centers, packing.radii, probe, packing.eps)
        mask[sorted(exclude)] = False
        j = _largest(mask, packing.radii)
        name = "window I'" if large else ("side window" if windows else "band I")
        if j is None:
            return _Found(probe.point(0.5 * (probe.r_in + probe.r_out), 0.0), name)
        r = float(packing.radii[j])
        rel = r / rho
        if large and rel > consts.r_prime_max:
            raise InvariantViolation(
                f"disc {j} of relative radius {rel:.6g} bites the window; bound is {consts.r_prime_max:.6g}")
        detail = {"biter_radius": r, "relative": rel}
        if windows:
            detail["windows"] = windows

        step = None
        if rel <= consts.r_small:
            new = _case_one(cn, rho, probe, consts)
            step = ChaseStep("crescent_1", new, new.side / 4, j, detail)
        elif rel <= consts.r_big:
            for new, turn in _case_two(cn, rho, probe.axis, j, packing, consts):
                try:
                    corners = _check_corners(new, cn, rho, region.axis, consts)
                    check_nested(new, region)
                    check_hypothesis(new, new.radius, packing)
                except InvariantViolation:
                    continue
                step = ChaseStep("crescent_2", new, new.radius, j,
                                 {**detail, "turn_over_alpha": turn, **corners})
                break
        if step is not None:
            if large:
                step.detail = {"sub_case": step.label, **step.detail}
                step.label = "crescent_3"
            return step

        if rel > consts.r_big:
            if large:
                raise InvariantViolation("case 3 recurred inside the window")
            probe, free, span = _window(probe, region, cn, j, packing, consts.arc_prime)
            if free < consts.arc_prime:
                raise ConstantsInfeasible(
                    f"free arc {free:.6g} next to disc {j} is shorter than arc_prime {consts.arc_prime:.6g}")
            large = True
            reason = "large biter"
        else:
            probe, free, span = _window(probe, region, cn, j, packing)
            if not free > consts.sq_side_factor:
                raise InvariantViolation(f"no room beside disc {j} for a window")
            reason = "crescent does not fit"
        windows.append({"biter": j, "relative": rel, "reason": reason, "free": free,
                        "span": [float(v) for v in span]})
        exclude.add(j)
    raise InvariantViolation(f"more than {MAX_WINDOWS} windows in one crescent step")


def chase(packing: DiscPacking, square: Square | None = None, consts: Constants | None = None,
          max_steps: int = 10_000) -> tuple[np.ndarray, ChaseTrace]:
    """Find a point outside every (1 + eps)-enlarged disc of ``packing`` inside ``square``.

    ``square`` defaults to the side-4 square at the origin (scale 1).  Raises
    InvariantViolation if any runtime check fails.
    """
    if consts is None:
        consts = calibrate(Constants.derived_defaults(eps=packing.eps), with_eps_max=False)
    if not consts.calibrated:
        consts = calibrate(consts, with_eps_max=False)
    if abs(consts.eps - packing.eps) > 1e-15 * max(1.0, consts.eps):
        raise InvalidArgument("packing eps and constants eps differ")
    if np.any(packing.radii > 1):
        raise InvalidArgument("disc radii must not exceed 1")
    square = square or Square((0.0, 0.0), 4.0)
    trace = ChaseTrace(square)
    region = square
    for _ in range(max_steps):
        if isinstance(region, Square):
            out = square_step(region, packing, consts)
        else:
            out = crescent_step(region, packing, consts)
        if isinstance(out, _Found):
            point = np.asarray(out.point, dtype=float)
            trace.final_probe = out.probe
            if not packing.uncovered(point[None])[0]:
                trace.diagnostic = "returned point is covered"
                raise InvariantViolation(f"chase returned covered point {point.tolist()}")
            trace.result = point
            return point, trace
        check_nested(out.region, region)
        trace.steps.append(out)
        if not trace.shrinks():
            raise InvariantViolation(f"scales {trace.scales[-3:]} do not halve within two steps")
        region = out.region
    raise InvariantViolation(f"no uncovered point after {max_steps} steps")


__all__ = [
    "ChaseStep",
    "ChaseTrace",
    "LABELS",
    "chase",
    "check_hypothesis",
    "check_nested",
    "crescent_step",
    "square_step",
]
