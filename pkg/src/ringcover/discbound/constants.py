"""Constants of the disc chase, the audit of their inequality chain, and calibration.

All lengths are in units of the radius of the disc whose crescent is being
refined.  The audit re-evaluates each inequality the chase relies on:

A  outer corner v of a case-2 crescent stays inside the beta-ring;
B  inner corner u stays out of the eps-enlargement of that disc;
C  the angular corner w stays inside the parent crescent's angle;
D  a large biter leaves a free arc of length >= arc_prime on the outer arc;
E  discs able to bite the window I' are no larger than r_prime_max < r_big;
F  the replacement squares fit where they are placed.
"""
from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ..errors import CalibrationError, ConstantsInfeasible, InvalidArgument

SAFETY = 0.1


@dataclass(frozen=True)
class Constants:
    eps: float = 1e-5
    alpha: float = math.pi / 16
    beta: float = 1.0 / 16
    ring_frac: float = 1.0 / 256
    r_small: float = 1.0 / 1280
    r_big: float = 1.0 / 8
    sq_side_factor: float = 4.0 / 1280
    arc_prime: float | None = None
    r_prime_max: float | None = None
    eps_max: float | None = None

    def __post_init__(self):
        for name in ("eps", "alpha", "beta", "ring_frac", "r_small", "r_big", "sq_side_factor"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise InvalidArgument(f"{name} must be a positive finite number, got {v!r}")
        if not (self.eps < self.beta < self.alpha < math.pi / 2):
            raise InvalidArgument("constants must satisfy 0 < eps < beta < alpha < pi/2")

    @classmethod
    def derived_defaults(cls, **overrides) -> "Constants":
        """Defaults tied together the way the proof uses them.

        ring_frac = beta / 16, r_small = beta / 80 and the case-1 square side
        4 * r_small follow beta unless overridden.
        """
        beta = overrides.get("beta", 1.0 / 16)
        base = {
            "ring_frac": beta / 16,
            "r_small": beta / 80,
        }
        base.update(overrides)
        base.setdefault("sq_side_factor", 4 * base["r_small"])
        return cls(**base)

    @property
    def calibrated(self) -> bool:
        return self.arc_prime is not None and self.r_prime_max is not None

    def to_dict(self) -> dict:
        return asdict(self)


# -- the individual inequalities ---------------------------------------------

def check_a_value(c: Constants) -> float:
    """Upper bound on |c_n v|^2 for the outer corner v of a case-2 crescent."""
    rf, rb = c.ring_frac, c.r_big
    return (1 + rf + c.eps * rb) ** 2 + 2 * (1 + rf + (1 + c.eps) * rb) * rb * (1 - math.cos(3 * c.alpha))


def check_b_value(c: Constants) -> float:
    """Lower bound on |c_n u|^2 for the inner corner u of a case-2 crescent."""
    return 1 + 2 * c.r_small * (1 - math.cos(2 * c.alpha) - c.beta)


def arc_halfwidth(outer: float, d: float, reach: float) -> float:
    """Half the angle of the circle of radius ``outer`` (about the origin)
    inside the disc of radius ``reach`` centred at distance ``d``."""
    if d - reach >= outer:
        return 0.0
    if d + outer <= reach:
        return math.pi
    cos_t = (outer * outer + d * d - reach * reach) / (2 * outer * d)
    return math.acos(min(1.0, max(-1.0, cos_t)))


def worst_free_arc(c: Constants) -> float:
    """Longer component of the outer arc left free by the worst large biter.

    The worst biter has the largest radius (1) and touches the refined disc
    on the crescent's axis; moving it off-axis lengthens one side and moving
    it away shrinks the part it covers.
    """
    outer = 1 + c.ring_frac
    theta0 = arc_halfwidth(outer, 2.0, 1 + c.eps)
    return 0.5 * c.alpha - theta0


def _can_bite_window(rp: float, r: float, d: float, start: float, length: float, c: Constants) -> bool:
    # Is there a disc of radius rp, disjoint from the unit disc and from the
    # disc (radius r, center (d, 0)), biting the window?  Candidate centres:
    # tangent to the unit disc, tangent to the big disc, and tangent to both.
    outer = 1 + c.ring_frac
    reach = (1 + c.eps) * rp
    slack = 2 * rp * math.sqrt(2 * c.eps) + 1e-9
    psi = np.linspace(start - slack, start + length + slack, 401)
    cand = [(1 + rp + 1e-15) * np.stack([np.cos(psi), np.sin(psi)], axis=1)]
    phi = np.linspace(0.0, math.pi, 401)
    cand.append(np.array([d, 0.0]) + (r + rp + 1e-15) * np.stack([-np.cos(phi), np.sin(phi)], axis=1))
    a, b = 1 + rp, r + rp
    x = (a * a - b * b + d * d) / (2 * d)
    if a * a - x * x > 0:
        cand.append(np.array([[x, math.sqrt(a * a - x * x)]]))
    pts = np.concatenate(cand)
    ok = np.hypot(pts[:, 0], pts[:, 1]) >= 1 + rp
    ok &= np.hypot(pts[:, 0] - d, pts[:, 1]) >= r + rp
    if not np.any(ok):
        return False
    pts = pts[ok]
    # Distance to the window (annular sector, radii 1..outer, angles start..start+length).
    from .regions import AnnularSector

    window = AnnularSector((0.0, 0.0), 1.0, outer, start + 0.5 * length, 0.5 * length)
    return bool(np.any(window.distance(pts) <= reach))


def squeezed_radius(c: Constants, arc_prime: float) -> float:
    """Largest radius of a disc that can bite the window I' next to a large biter.

    Scans the large biter's radius (from r_big up) and its distance from the
    refined disc, and bisects on the radius of the squeezed disc.
    """
    return _squeezed(c.eps, c.ring_frac, c.r_big, float(arc_prime))


def _largest_biter(r, d, arc_prime, c, iterations=26):
    # Largest disc biting the window when the big disc (radius r) sits at distance d.
    start = arc_halfwidth(1 + c.ring_frac, d, (1 + c.eps) * r)
    if start <= 0.0:
        return 0.0
    lo, hi = 0.0, min(r, 1.0)
    if _can_bite_window(hi, r, d, start, arc_prime, c):
        return hi
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if _can_bite_window(mid, r, d, start, arc_prime, c):
            lo = mid
        else:
            hi = mid
    return hi


@functools.lru_cache(maxsize=256)
def _squeezed(eps, ring_frac, r_big, arc_prime, samples=13):
    c = Constants.derived_defaults(eps=eps, ring_frac=ring_frac, r_big=r_big)
    outer = 1 + ring_frac
    worst = 0.0
    for r in (r_big, 1.5 * r_big, 2 * r_big, 0.5, 1.0):
        ds = np.linspace(1 + r, outer + (1 + eps) * r, samples)[:-1]
        vals = [_largest_biter(r, d, arc_prime, c) for d in ds]
        k = int(np.argmax(vals))
        worst = max(worst, vals[k])
        # Refine around the worst placement on a finer grid.
        lo, hi = ds[max(k - 1, 0)], ds[min(k + 1, len(ds) - 1)]
        for d in np.linspace(lo, hi, 9)[1:-1]:
            worst = max(worst, _largest_biter(r, d, arc_prime, c))
    return worst


# -- audit ----------------------------------------------------------------------

@dataclass
class Check:
    name: str
    value: float
    bound: float
    passed: bool
    detail: str = ""


@dataclass
class AuditReport:
    constants: dict
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ch.passed for ch in self.checks)

    def check(self, name: str) -> Check:
        for ch in self.checks:
            if ch.name == name:
                return ch
        raise KeyError(name)

    def failed(self) -> list[str]:
        return [ch.name for ch in self.checks if not ch.passed]

    def to_dict(self) -> dict:
        return {"constants": self.constants, "passed": self.passed,
                "checks": [asdict(ch) for ch in self.checks]}

    def lines(self) -> list[str]:
        out = []
        for ch in self.checks:
            flag = "PASS" if ch.passed else "FAIL"
            out.append(f"{ch.name:<9} {flag}  value={ch.value:.7f}  bound={ch.bound:.7f}  {ch.detail}")
        return out


def audit_constants(c: Constants) -> AuditReport:
    checks = []
    a = check_a_value(c)
    ok_a = a < (1 + c.beta) ** 2
    checks.append(Check("A", a, (1 + c.beta) ** 2, ok_a,
                        f"|c_n v| <= {math.sqrt(a):.5f} < 1 + beta = {1 + c.beta:.5f}"))
    checks.append(Check("A.root", math.sqrt(a), 1.03, math.sqrt(a) < 1.03, "square root below 1.03"))
    b = check_b_value(c)
    checks.append(Check("B", b, (1 + c.eps) ** 2, b > (1 + c.eps) ** 2,
                        "inner corner outside the eps-enlargement"))
    lhs = math.sin(c.alpha / 2)
    rhs = (1 + c.beta) * c.r_big * math.sin(3 * c.alpha)
    checks.append(Check("C", lhs, rhs, lhs > rhs, "sin(alpha/2) > (1+beta) r_big sin(3 alpha)"))

    free = worst_free_arc(c)
    arc = c.arc_prime
    if arc is None:
        checks.append(Check("D", free, float("nan"), False, "arc_prime not calibrated"))
    else:
        checks.append(Check("D", free, arc, 0 < arc <= free, "worst free arc >= arc_prime > 0"))

    rpm = c.r_prime_max
    if arc is None or rpm is None or not arc > 0:
        checks.append(Check("E", float("nan"), float("nan"), False, "r_prime_max not calibrated"))
    else:
        squeezed = squeezed_radius(c, arc)
        checks.append(Check("E", squeezed, rpm, squeezed <= rpm < c.r_big,
                            f"squeezed radius <= r_prime_max < r_big = {c.r_big}"))
        # A case-2 crescent grown from a disc biting I' must fit in the window.
        corner = (1 + c.beta) * rpm * math.sin(3 * c.alpha)
        checks.append(Check("E.room", corner, arc, corner < arc,
                            "case-2 corner offset inside the window"))

    side = c.sq_side_factor
    checks.append(Check("F.a", math.sqrt(2.0), 1.5, math.sqrt(2.0) <= 1.5,
                        "half-size square fits in the probe disc"))
    checks.append(Check("F.radial", side, c.ring_frac - c.eps, side < c.ring_frac - c.eps,
                        "case-1 square inside the ring band"))
    width = 2 * (1 + c.eps) * math.sin(min(c.alpha, arc or c.alpha) / 2)
    checks.append(Check("F.angular", side, width, side < width, "case-1 square inside the angle"))
    checks.append(Check("F.scale", side / 4, c.r_small, side / 4 >= c.r_small,
                        "case-1 square scale at least r_small"))
    return AuditReport(c.to_dict(), checks)


# -- calibration ----------------------------------------------------------------

def derive_window_constants(c: Constants) -> Constants:
    """arc_prime and r_prime_max for ``c``, each with a 10% safety factor."""
    free = worst_free_arc(c)
    if not free > 0:
        raise ConstantsInfeasible(f"a large biter leaves no free arc (free arc {free:.4g})")
    arc = (1 - SAFETY) * free
    # The squeezed radius is an upper bound, so the safety factor enlarges it.
    rpm = (1 + SAFETY) * squeezed_radius(c, arc)
    return replace(c, arc_prime=arc, r_prime_max=rpm)


def _closed_form_ok(c: Constants) -> bool:
    free = worst_free_arc(c)
    side = c.sq_side_factor
    return (check_a_value(c) < (1 + c.beta) ** 2
            and check_b_value(c) > (1 + c.eps) ** 2
            and math.sin(c.alpha / 2) > (1 + c.beta) * c.r_big * math.sin(3 * c.alpha)
            and free > 0
            and side < c.ring_frac - c.eps)


def max_feasible_eps(c: Constants, iterations: int = 50) -> float:
    """Largest eps for which the audit passes, other constants fixed.

    Bisects on the closed-form checks, then runs the full audit (including
    the numeric squeeze bound) at the result and backs off until it passes.
    """

    def cheap(e):
        try:
            return _closed_form_ok(replace(c, eps=e))
        except InvalidArgument:
            return False

    def full(e):
        try:
            return audit_constants(derive_window_constants(replace(c, eps=e))).passed
        except (ConstantsInfeasible, InvalidArgument):
            return False

    lo, hi = 0.0, min(c.beta, c.ring_frac)
    if not cheap(1e-15):
        return 0.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if cheap(mid):
            lo = mid
        else:
            hi = mid
    for _ in range(20):
        if full(lo):
            return lo
        lo *= 0.99
    return 0.0


def calibrate(c: Constants | None = None, with_eps_max: bool = True) -> Constants:
    """Fill arc_prime and r_prime_max, find eps_max, and insist the audit passes."""
    c = c or Constants.derived_defaults()
    try:
        filled = derive_window_constants(c)
    except ConstantsInfeasible as exc:
        raise CalibrationError(str(exc)) from None
    report = audit_constants(filled)
    if not report.passed:
        raise CalibrationError("audit fails after calibration: checks " + ", ".join(report.failed()))
    if with_eps_max:
        filled = replace(filled, eps_max=max_feasible_eps(filled))
    return filled


__all__ = [
    "AuditReport",
    "Check",
    "Constants",
    "arc_halfwidth",
    "audit_constants",
    "calibrate",
    "check_a_value",
    "check_b_value",
    "derive_window_constants",
    "max_feasible_eps",
    "squeezed_radius",
    "worst_free_arc",
]
